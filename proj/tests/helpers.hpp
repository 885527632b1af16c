#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "occulstm/dataio.hpp"
#include "occulstm/model.hpp"

namespace occulstm::test {

inline SensorReading make_reading(std::int64_t ts, double temp = 21.5,
                                  double hum = 43.0, double co2 = 482.0,
                                  double noise = 53.0, double pressure = 1020.8,
                                  std::optional<int> people = 0) {
  SensorReading r;
  r.timestamp = ts;
  r.temperature = temp;
  r.humidity = hum;
  r.co2 = co2;
  r.noise = noise;
  r.pressure = pressure;
  r.people = people;
  return r;
}

// n_days day-groups of rows_per_day readings at a fixed cadence
inline std::vector<SensorReading> make_days(int n_days, int rows_per_day,
                                            int cadence_s = 300,
                                            std::int64_t base_ts = 1704067200) {
  std::vector<SensorReading> out;
  for (int d = 0; d < n_days; ++d) {
    for (int r = 0; r < rows_per_day; ++r) {
      out.push_back(make_reading(base_ts + d * 86400 + r * cadence_s,
                                 21.0 + d, 40.0 + r % 7, 420.0 + 3 * r,
                                 38.0 + r % 5, 1015.0, d + r % 3));
    }
  }
  return out;
}

inline bool params_equal(const LstmParams& a_lstm, const HeadParams& a_head,
                         const LstmParams& b_lstm, const HeadParams& b_head) {
  auto a = collect_arrays(a_lstm, a_head);
  auto b = collect_arrays(b_lstm, b_head);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows != b[i].rows || a[i].cols != b[i].cols) return false;
    for (std::size_t k = 0; k < a[i].size(); ++k)
      if (a[i].data[k] != b[i].data[k]) return false;
  }
  return true;
}

}  // namespace occulstm::test

#include "occulstm/synth.hpp"

#include <algorithm>
#include <cmath>

#include "occulstm/rng.hpp"

namespace occulstm {

namespace {

// 2024-01-01T00:00:00Z; generated corpora start here so outputs are
// reproducible byte for byte.
constexpr std::int64_t kBaseTimestamp = 1704067200;

}  // namespace

OccupancySchedule gen_schedule(int days, std::uint64_t seed, int steps_per_day) {
  if (days < 1) throw Error("days must be >= 1");
  if (steps_per_day < 1) throw Error("steps_per_day must be >= 1");

  OccupancySchedule schedule;
  schedule.steps_per_day = steps_per_day;
  schedule.days.resize(static_cast<std::size_t>(days));

  // The room hosts a handful of recurring course sections. Each section has a
  // fixed head count, a fixed slot inside the 08:00-20:00 class hours and
  // meets on roughly half of the days, so every section size shows up across
  // the whole corpus rather than only on isolated days.
  const int open = steps_per_day / 3;
  const int close = steps_per_day * 5 / 6;
  const int min_len = std::max(1, steps_per_day / 24);  // about one hour

  Rng pool_rng(derive_seed(seed, "schedule.sections"));
  const std::size_t n_sections = 3 + uniform_index(pool_rng, 3);

  // Section sizes stay at least 3 apart (and at least 3 above empty), so
  // distinct sections remain separable at the default sensor noise.
  std::vector<int> sizes;
  for (int attempts = 0; sizes.size() < n_sections && attempts < 256; ++attempts) {
    const int c = 3 + static_cast<int>(uniform_index(pool_rng, 13));
    bool ok = true;
    for (int s : sizes)
      if (std::abs(s - c) < 3) ok = false;
    if (ok) sizes.push_back(c);
  }

  struct Section {
    int start, len, people;
  };
  std::vector<Section> sections;
  const int slot_width = (close - open) / static_cast<int>(sizes.size());
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const int slot_open = open + static_cast<int>(k) * slot_width;
    const int max_len = std::max(min_len + 1, slot_width - min_len / 2);
    const int len = min_len + static_cast<int>(uniform_index(
                                  pool_rng,
                                  static_cast<std::uint64_t>(max_len - min_len)));
    sections.push_back({slot_open, std::min(len, slot_width - 2), sizes[k]});
  }

  for (int d = 0; d < days; ++d) {
    Rng rng(derive_seed(seed, "schedule.day", static_cast<std::uint64_t>(d)));
    auto& sessions = schedule.days[static_cast<std::size_t>(d)];
    for (const auto& sec : sections) {
      const bool meets = uniform_index(rng, 2) == 0;
      const int jitter = static_cast<int>(uniform_index(rng, 3)) - 1;
      if (!meets || sessions.size() >= 3) continue;
      const int start = std::max(open, sec.start + jitter);
      const int end = std::min(close, start + sec.len);
      if (end > start) sessions.push_back({start, end, sec.people});
    }
  }
  return schedule;
}

int occupancy_at(const OccupancySchedule& schedule, int day, int step) {
  if (day < 0 || day >= static_cast<int>(schedule.days.size())) return 0;
  for (const auto& s : schedule.days[static_cast<std::size_t>(day)]) {
    if (step >= s.start_step && step < s.end_step) return s.people;
  }
  return 0;
}

std::vector<SensorReading> gen_readings(const OccupancySchedule& schedule,
                                        const RoomParams& params,
                                        std::uint64_t seed) {
  if (params.air_exchange <= 0.0 || params.air_exchange > 1.0)
    throw Error("air_exchange must be in (0, 1]");
  if (params.co2_per_person <= 0.0) throw Error("co2_per_person must be > 0");
  if (params.step_minutes < 1) throw Error("step_minutes must be >= 1");
  if (static_cast<std::int64_t>(schedule.steps_per_day) * params.step_minutes > 1440)
    throw Error("steps_per_day * step_minutes must fit inside one day");

  const int steps = schedule.steps_per_day;
  const double k = params.air_exchange;

  std::vector<SensorReading> out;
  out.reserve(schedule.days.size() * static_cast<std::size_t>(steps));

  for (int d = 0; d < static_cast<int>(schedule.days.size()); ++d) {
    Rng rng(derive_seed(seed, "readings.day", static_cast<std::uint64_t>(d)));
    double co2 = params.ambient_co2;
    double temp = params.base_temp;

    for (int t = 0; t < steps; ++t) {
      const int people = occupancy_at(schedule, d, t);

      SensorReading r;
      r.timestamp = kBaseTimestamp + static_cast<std::int64_t>(d) * 86400 +
                    static_cast<std::int64_t>(t) * params.step_minutes * 60;
      r.temperature = temp;
      r.humidity = std::clamp(params.base_humidity +
                                  params.humidity_per_person * people +
                                  gaussian(rng, 0.0, params.sensor_noise_sd[1]),
                              0.0, 100.0);
      r.co2 = std::max(co2, 1.0);
      r.noise = params.base_noise_db + params.noise_per_person * people +
                gaussian(rng, 0.0, params.sensor_noise_sd[3]);
      r.pressure = std::max(params.base_pressure +
                                params.pressure_per_person * people +
                                gaussian(rng, 0.0, params.sensor_noise_sd[4]),
                            1.0);
      r.people = people;
      out.push_back(r);

      // First-order mass balance: emission source, exchange with ambient.
      co2 = co2 + params.co2_per_person * people - k * (co2 - params.ambient_co2) +
            gaussian(rng, 0.0, params.sensor_noise_sd[2]);
      const double temp_target =
          params.base_temp + params.temp_per_person * people;
      temp = temp + k * (temp_target - temp) +
             gaussian(rng, 0.0, params.sensor_noise_sd[0]);
    }
  }
  return out;
}

std::string schedule_to_csv(const OccupancySchedule& schedule) {
  std::string out = "day,start_step,end_step,people\n";
  for (std::size_t d = 0; d < schedule.days.size(); ++d) {
    for (const auto& s : schedule.days[d]) {
      out += std::to_string(d) + ',' + std::to_string(s.start_step) + ',' +
             std::to_string(s.end_step) + ',' + std::to_string(s.people) + '\n';
    }
  }
  return out;
}

}  // namespace occulstm

#include "occulstm/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "occulstm/format.hpp"

namespace occulstm {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

double parse_number(const std::string& field, const char* column,
                    std::size_t line_no) {
  if (field.empty())
    throw ParseError(std::string("empty ") + column + " field", line_no);
  char* end = nullptr;
  double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size() || !std::isfinite(v))
    throw ParseError(std::string("cannot parse ") + column + " value '" + field + "'",
                     line_no);
  return v;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// civil-days algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text) {
  std::string s = trim(text);
  if (all_digits(s)) {
    return std::strtoll(s.c_str(), nullptr, 10);
  }
  // ISO-8601: YYYY-MM-DD[T ]HH:MM:SS with optional trailing Z
  if (s.size() != 19 && !(s.size() == 20 && s.back() == 'Z'))
    throw Error("cannot parse timestamp '" + s + "'");
  int y, mo, d, h, mi, sec;
  char sep;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &y, &mo, &d, &sep, &h,
                  &mi, &sec) != 7 ||
      (sep != 'T' && sep != ' '))
    throw Error("cannot parse timestamp '" + s + "'");
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
      mi > 59 || sec < 0 || sec > 60)
    throw Error("timestamp out of range '" + s + "'");
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec;
}

std::string format_timestamp(std::int64_t ts) {
  std::int64_t days = ts >= 0 ? ts / 86400 : (ts - 86399) / 86400;
  int sod = static_cast<int>(ts - days * 86400);
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                sod / 3600, (sod / 60) % 60, sod % 60);
  return buf;
}

std::int64_t day_index(std::int64_t ts) {
  return ts >= 0 ? ts / 86400 : (ts - 86399) / 86400;
}

std::vector<SensorReading> parse_sensor_csv(std::string_view text) {
  std::vector<SensorReading> out;
  std::size_t pos = 0, line_no = 0;
  bool header_seen = false;
  bool has_people_col = true;

  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = (eol == std::string_view::npos)
                               ? text.substr(pos)
                               : text.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (trim(raw).empty()) continue;

    auto fields = split_fields(raw);

    if (!header_seen) {
      static const char* expected[] = {"timestamp", "temp",     "hum", "co2",
                                       "noise",     "pressure", "people"};
      if (fields.size() != 7 && fields.size() != 6)
        throw ParseError("header must have 6 or 7 columns, got " +
                             std::to_string(fields.size()),
                         line_no);
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (lower(fields[i]) != expected[i])
          throw ParseError("unexpected header column '" + fields[i] +
                               "', expected '" + expected[i] + "'",
                           line_no);
      }
      has_people_col = fields.size() == 7;
      header_seen = true;
      continue;
    }

    const std::size_t want = has_people_col ? 7 : 6;
    if (fields.size() != want)
      throw ParseError("expected " + std::to_string(want) + " columns, got " +
                           std::to_string(fields.size()),
                       line_no);

    SensorReading r;
    try {
      r.timestamp = parse_timestamp(fields[0]);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    r.temperature = parse_number(fields[1], "temp", line_no);
    r.humidity = parse_number(fields[2], "hum", line_no);
    r.co2 = parse_number(fields[3], "co2", line_no);
    r.noise = parse_number(fields[4], "noise", line_no);
    r.pressure = parse_number(fields[5], "pressure", line_no);

    if (r.co2 <= 0.0)
      throw ParseError("co2 must be > 0, got " + fields[3], line_no);
    if (r.humidity < 0.0 || r.humidity > 100.0)
      throw ParseError("hum must be in [0, 100], got " + fields[2], line_no);
    if (r.pressure <= 0.0)
      throw ParseError("pressure must be > 0, got " + fields[5], line_no);

    if (has_people_col && !fields[6].empty()) {
      if (!all_digits(fields[6]) || fields[6][0] == '-')
        throw ParseError("people must be a non-negative integer, got '" +
                             fields[6] + "'",
                         line_no);
      r.people = static_cast<int>(std::strtol(fields[6].c_str(), nullptr, 10));
    }

    if (!out.empty() && r.timestamp <= out.back().timestamp)
      throw ParseError("NonMonotonicTimestamp: " + std::to_string(r.timestamp) +
                           " does not increase past " +
                           std::to_string(out.back().timestamp),
                       line_no);
    out.push_back(std::move(r));
  }

  if (!header_seen) throw ParseError("missing header row", 1);
  return out;
}

std::string serialize_sensor_csv(const std::vector<SensorReading>& readings) {
  std::string out = "timestamp,temp,hum,co2,noise,pressure,people\n";
  for (const auto& r : readings) {
    out += format_timestamp(r.timestamp);
    for (double v : r.features()) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    if (r.people) out += std::to_string(*r.people);
    out += '\n';
  }
  return out;
}

void require_labels(const std::vector<SensorReading>& readings) {
  for (std::size_t i = 0; i < readings.size(); ++i) {
    if (!readings[i].people)
      throw MissingLabel("row " + std::to_string(i + 1) + " (timestamp " +
                         format_timestamp(readings[i].timestamp) +
                         ") has no people label");
  }
}

std::vector<DayGroup> group_by_day(const std::vector<SensorReading>& readings) {
  std::vector<DayGroup> groups;
  for (const auto& r : readings) {
    if (groups.empty() || day_index(groups.back().back().timestamp) != day_index(r.timestamp))
      groups.emplace_back();
    groups.back().push_back(r);
  }
  return groups;
}

DatasetSplit split_by_days(const std::vector<SensorReading>& readings,
                           int n_train, int n_val, int n_test) {
  auto groups = group_by_day(readings);
  const int need = n_train + n_val + n_test;
  if (static_cast<int>(groups.size()) < need)
    throw InsufficientDays(need, static_cast<int>(groups.size()));

  DatasetSplit split;
  int i = 0;
  for (; i < n_train; ++i) split.train.push_back(std::move(groups[i]));
  for (; i < n_train + n_val; ++i) split.val.push_back(std::move(groups[i]));
  for (; i < need; ++i) split.test.push_back(std::move(groups[i]));
  return split;
}

NormStats compute_norm_stats(const std::vector<DayGroup>& day_groups) {
  std::size_t n = 0;
  std::array<double, kNumFeatures> sum{};
  for (const auto& day : day_groups) {
    for (const auto& r : day) {
      auto f = r.features();
      for (int k = 0; k < kNumFeatures; ++k) sum[k] += f[k];
      ++n;
    }
  }
  if (n == 0) throw EmptyInput("no readings to normalize");

  NormStats stats;
  for (int k = 0; k < kNumFeatures; ++k) stats.mean[k] = sum[k] / static_cast<double>(n);

  std::array<double, kNumFeatures> sq{};
  for (const auto& day : day_groups) {
    for (const auto& r : day) {
      auto f = r.features();
      for (int k = 0; k < kNumFeatures; ++k) {
        double d = f[k] - stats.mean[k];
        sq[k] += d * d;
      }
    }
  }
  for (int k = 0; k < kNumFeatures; ++k) {
    double sd = std::sqrt(sq[k] / static_cast<double>(n));
    stats.std[k] = sd > 0.0 ? sd : 1.0;
  }
  return stats;
}

WindowedDataset make_windows(const std::vector<DayGroup>& day_groups,
                             const NormStats& stats, int window_len, int stride) {
  if (window_len < 1 || stride < 1)
    throw Error("window_len and stride must be >= 1");

  WindowedDataset ds;
  ds.window_len = window_len;
  ds.stride = stride;

  for (const auto& day : day_groups) {
    const std::size_t rows = day.size();
    if (rows < static_cast<std::size_t>(window_len)) {
      ++ds.short_days;
      continue;
    }
    for (std::size_t start = 0; start + window_len <= rows;
         start += static_cast<std::size_t>(stride)) {
      Matrix w(static_cast<std::size_t>(window_len), kNumFeatures);
      for (int t = 0; t < window_len; ++t) {
        auto f = day[start + t].features();
        for (int k = 0; k < kNumFeatures; ++k)
          w(t, k) = (f[k] - stats.mean[k]) / stats.std[k];
      }
      const auto& last = day[start + window_len - 1];
      ds.windows.push_back(std::move(w));
      ds.labels.push_back(last.people ? *last.people : -1);
      ds.end_timestamps.push_back(last.timestamp);
    }
  }
  return ds;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed: " + path);
}

}  // namespace occulstm

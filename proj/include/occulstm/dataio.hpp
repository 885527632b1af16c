#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "occulstm/errors.hpp"
#include "occulstm/matrix.hpp"

namespace occulstm {

// Feature order used everywhere: temp, hum, co2, noise, pressure.
constexpr int kNumFeatures = 5;

struct SensorReading {
  std::int64_t timestamp = 0;  // seconds since Unix epoch, UTC
  double temperature = 0.0;    // degrees C
  double humidity = 0.0;       // % relative humidity, [0, 100]
  double co2 = 0.0;            // ppm, > 0
  double noise = 0.0;          // dB
  double pressure = 0.0;       // mbar, > 0
  std::optional<int> people;   // absent for unlabeled inference input

  std::array<double, kNumFeatures> features() const {
    return {temperature, humidity, co2, noise, pressure};
  }
  bool operator==(const SensorReading&) const = default;
};

using DayGroup = std::vector<SensorReading>;

struct DatasetSplit {
  std::vector<DayGroup> train, val, test;
};

struct NormStats {
  std::array<double, kNumFeatures> mean{};
  std::array<double, kNumFeatures> std{};  // zero variance coerced to 1
  bool operator==(const NormStats&) const = default;
};

struct WindowedDataset {
  std::vector<Matrix> windows;  // each window_len x kNumFeatures, normalized
  std::vector<int> labels;      // people at the window's last step; -1 if unlabeled
  std::vector<std::int64_t> end_timestamps;
  int window_len = 0;
  int stride = 0;
  std::size_t short_days = 0;  // day-groups too short to yield any window

  std::size_t size() const { return windows.size(); }
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line_number)
      : Error(what + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  std::size_t line;
};

struct InsufficientDays : Error {
  InsufficientDays(int required_days, int available_days)
      : Error("need " + std::to_string(required_days) + " distinct days, have " +
              std::to_string(available_days)),
        required(required_days),
        available(available_days) {}
  int required, available;
};

struct MissingLabel : Error {
  using Error::Error;
};

// Timestamps: integer epoch seconds or ISO-8601 "YYYY-MM-DD[T ]HH:MM:SS[Z]", UTC only.
std::int64_t parse_timestamp(std::string_view text);
std::string format_timestamp(std::int64_t ts);
std::int64_t day_index(std::int64_t ts);  // UTC calendar day, floor(ts / 86400)

// CSV schema: timestamp,temp,hum,co2,noise,pressure,people
// Header row is mandatory and validated by column name (case-insensitive);
// the people column may be omitted entirely for inference input.
std::vector<SensorReading> parse_sensor_csv(std::string_view text);
std::string serialize_sensor_csv(const std::vector<SensorReading>& readings);

// Labeled pipelines reject inputs with any missing people value.
void require_labels(const std::vector<SensorReading>& readings);

std::vector<DayGroup> group_by_day(const std::vector<SensorReading>& readings);

// Chronological assignment: earliest n_train days to train, next n_val to val,
// next n_test to test. Extra trailing days are ignored.
DatasetSplit split_by_days(const std::vector<SensorReading>& readings,
                           int n_train, int n_val, int n_test);

// Per-feature mean and population standard deviation over all rows,
// fit on the training split only.
NormStats compute_norm_stats(const std::vector<DayGroup>& day_groups);

// Sliding windows within each day-group; windows never cross a day boundary.
// A day with R rows yields floor((R - window_len) / stride) + 1 windows.
WindowedDataset make_windows(const std::vector<DayGroup>& day_groups,
                             const NormStats& stats, int window_len, int stride);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace occulstm

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "occulstm/dataio.hpp"
#include "occulstm/encoding.hpp"
#include "occulstm/model.hpp"

namespace occulstm {

struct LengthMismatch : Error {
  using Error::Error;
};

struct ConfusionCounts {
  std::array<long, kNumClasses> tp{}, fp{}, fn{};
  long samples = 0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::array<ClassMetrics, kNumClasses> per_class{};
  ClassMetrics micro{};
  ConfusionCounts counts{};
  long samples = 0;
};

// One (truth, prediction) pair per evaluated window, for the timeline plot.
// prediction is the decoded class in classifier mode and the raw model output
// in regressor mode, so fractional values survive into the series.
struct SeriesPoint {
  std::int64_t timestamp = 0;
  int truth = 0;
  double prediction = 0.0;
  bool operator==(const SeriesPoint&) const = default;
};

struct Evaluation {
  MetricsReport report;
  std::vector<SeriesPoint> series;
};

ConfusionCounts confusion(const std::vector<int>& preds,
                          const std::vector<int>& truths);

// tp/(tp+fp) and tp/(tp+fn); 0 when the denominator is 0
std::pair<double, double> precision_recall(const ConfusionCounts& counts, int k);

// 2pr/(p+r); 0 when p + r = 0
double f1_score(double precision, double recall);

// Round half away from zero, then clamp to [0, 15].
int round_to_class(double pred);

MetricsReport metrics_from_counts(const ConfusionCounts& counts);

// Runs the model over every window. Regressor predictions pass through
// round_to_class before the confusion counts.
Evaluation evaluate_model(const Model& model, const WindowedDataset& data);

std::string metrics_to_csv(const MetricsReport& report);
std::string metrics_to_text(const MetricsReport& report);

// CSV schema: timestamp,truth,prediction
std::string series_to_csv(const std::vector<SeriesPoint>& series);
std::vector<SeriesPoint> parse_series_csv(std::string_view text);

}  // namespace occulstm

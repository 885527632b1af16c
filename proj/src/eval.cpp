#include "occulstm/eval.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "occulstm/format.hpp"

namespace occulstm {

ConfusionCounts confusion(const std::vector<int>& preds,
                          const std::vector<int>& truths) {
  if (preds.size() != truths.size())
    throw LengthMismatch("confusion: " + std::to_string(preds.size()) +
                         " predictions vs " + std::to_string(truths.size()) +
                         " truths");
  if (preds.empty()) throw EmptyInput("confusion: no samples");

  ConfusionCounts c;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    int p = preds[n], t = truths[n];
    if (p < 0 || p >= kNumClasses || t < 0 || t >= kNumClasses)
      throw Error("class label out of range at sample " + std::to_string(n));
    if (p == t) {
      ++c.tp[static_cast<std::size_t>(t)];
    } else {
      ++c.fp[static_cast<std::size_t>(p)];
      ++c.fn[static_cast<std::size_t>(t)];
    }
  }
  c.samples = static_cast<long>(preds.size());
  return c;
}

std::pair<double, double> precision_recall(const ConfusionCounts& counts, int k) {
  const auto i = static_cast<std::size_t>(k);
  const double tp = static_cast<double>(counts.tp[i]);
  const double fp = static_cast<double>(counts.fp[i]);
  const double fn = static_cast<double>(counts.fn[i]);
  double p = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
  double r = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
  return {p, r};
}

double f1_score(double precision, double recall) {
  double denom = precision + recall;
  if (denom <= 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

int round_to_class(double pred) {
  double r = std::round(pred);  // half away from zero
  if (r < 0.0) return 0;
  if (r > kNumClasses - 1) return kNumClasses - 1;
  return static_cast<int>(r);
}

MetricsReport metrics_from_counts(const ConfusionCounts& counts) {
  MetricsReport report;
  report.counts = counts;
  report.samples = counts.samples;

  long tp_sum = 0, fp_sum = 0, fn_sum = 0;
  for (int k = 0; k < kNumClasses; ++k) {
    auto [p, r] = precision_recall(counts, k);
    report.per_class[static_cast<std::size_t>(k)] = {p, r, f1_score(p, r)};
    tp_sum += counts.tp[static_cast<std::size_t>(k)];
    fp_sum += counts.fp[static_cast<std::size_t>(k)];
    fn_sum += counts.fn[static_cast<std::size_t>(k)];
  }
  double mp = (tp_sum + fp_sum) > 0 ? static_cast<double>(tp_sum) /
                                          static_cast<double>(tp_sum + fp_sum)
                                    : 0.0;
  double mr = (tp_sum + fn_sum) > 0 ? static_cast<double>(tp_sum) /
                                          static_cast<double>(tp_sum + fn_sum)
                                    : 0.0;
  report.micro = {mp, mr, f1_score(mp, mr)};
  return report;
}

Evaluation evaluate_model(const Model& model, const WindowedDataset& data) {
  if (data.size() == 0) throw EmptyInput("evaluate_model: no windows");

  Evaluation ev;
  ev.series.reserve(data.size());
  std::vector<int> preds, truths;
  preds.reserve(data.size());
  truths.reserve(data.size());

  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] < 0) throw MissingLabel("evaluation data has unlabeled rows");
    ForwardPass pass = forward_sequence(model.lstm, model.head, data.windows[i],
                                        model.config.mode);
    int truth = clamp_count(data.labels[i]);
    double raw;
    int pred;
    if (model.config.mode == Mode::classifier) {
      pred = decode_argmax(pass.probs);
      raw = static_cast<double>(pred);
    } else {
      raw = pass.logits[0];
      pred = round_to_class(raw);
    }
    preds.push_back(pred);
    truths.push_back(truth);
    ev.series.push_back({data.end_timestamps[i], truth, raw});
  }

  ev.report = metrics_from_counts(confusion(preds, truths));
  return ev;
}

std::string metrics_to_csv(const MetricsReport& report) {
  std::string out = "class,tp,fp,fn,precision,recall,f1\n";
  for (int k = 0; k < kNumClasses; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out += std::to_string(k) + ',' + std::to_string(report.counts.tp[i]) + ',' +
           std::to_string(report.counts.fp[i]) + ',' +
           std::to_string(report.counts.fn[i]) + ',' +
           format_double(report.per_class[i].precision) + ',' +
           format_double(report.per_class[i].recall) + ',' +
           format_double(report.per_class[i].f1) + '\n';
  }
  long tp_sum = 0, fp_sum = 0, fn_sum = 0;
  for (int k = 0; k < kNumClasses; ++k) {
    tp_sum += report.counts.tp[static_cast<std::size_t>(k)];
    fp_sum += report.counts.fp[static_cast<std::size_t>(k)];
    fn_sum += report.counts.fn[static_cast<std::size_t>(k)];
  }
  out += "micro," + std::to_string(tp_sum) + ',' + std::to_string(fp_sum) + ',' +
         std::to_string(fn_sum) + ',' + format_double(report.micro.precision) +
         ',' + format_double(report.micro.recall) + ',' +
         format_double(report.micro.f1) + '\n';
  return out;
}

std::string metrics_to_text(const MetricsReport& report) {
  char buf[128];
  std::string out;
  out += "class      tp      fp      fn  precision  recall      f1\n";
  for (int k = 0; k < kNumClasses; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (report.counts.tp[i] + report.counts.fp[i] + report.counts.fn[i] == 0)
      continue;  // class absent from both predictions and truths
    std::snprintf(buf, sizeof(buf), "%5d %7ld %7ld %7ld     %6.4f  %6.4f  %6.4f\n",
                  k, report.counts.tp[i], report.counts.fp[i],
                  report.counts.fn[i], report.per_class[i].precision,
                  report.per_class[i].recall, report.per_class[i].f1);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "micro over %ld samples: precision %.4f  recall %.4f  f1 %.4f\n",
                report.samples, report.micro.precision, report.micro.recall,
                report.micro.f1);
  out += buf;
  return out;
}

std::string series_to_csv(const std::vector<SeriesPoint>& series) {
  std::string out = "timestamp,truth,prediction\n";
  for (const auto& p : series) {
    out += format_timestamp(p.timestamp) + ',' + std::to_string(p.truth) + ',' +
           format_double(p.prediction) + '\n';
  }
  return out;
}

std::vector<SeriesPoint> parse_series_csv(std::string_view text) {
  std::vector<SeriesPoint> out;
  std::size_t pos = 0, line_no = 0;
  bool header_seen = false;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = (eol == std::string_view::npos)
                               ? text.substr(pos)
                               : text.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (raw.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::string line(raw);
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 3)
      throw ParseError("series row must have 3 columns", line_no);

    if (!header_seen) {
      header_seen = true;
      continue;  // header names validated loosely; the plot needs only values
    }

    SeriesPoint p;
    try {
      p.timestamp = parse_timestamp(fields[0]);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    char* end = nullptr;
    double truth = std::strtod(fields[1].c_str(), &end);
    if (fields[1].empty() || end != fields[1].c_str() + fields[1].size() ||
        !std::isfinite(truth))
      throw ParseError("bad truth value '" + fields[1] + "'", line_no);
    p.truth = static_cast<int>(truth);
    p.prediction = std::strtod(fields[2].c_str(), &end);
    if (fields[2].empty() || end != fields[2].c_str() + fields[2].size() ||
        !std::isfinite(p.prediction))
      throw ParseError("bad prediction value '" + fields[2] + "'", line_no);
    out.push_back(p);
  }
  if (!header_seen) throw ParseError("missing series header", 1);
  return out;
}

}  // namespace occulstm

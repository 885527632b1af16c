#include "occulstm/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "occulstm/dataio.hpp"

namespace occulstm {

namespace {

constexpr int kWidth = 960;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 56;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Step-after polyline: hold each value until the next sample.
std::string step_points(const std::vector<SeriesPoint>& series,
                        double (*value)(const SeriesPoint&),
                        double x0, double x_scale, std::int64_t t0,
                        double y_base, double y_scale) {
  std::string pts;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double x = x0 + static_cast<double>(series[i].timestamp - t0) * x_scale;
    const double y = y_base - value(series[i]) * y_scale;
    if (i) {
      // horizontal run at the previous level up to this sample's time
      const double py = y_base - value(series[i - 1]) * y_scale;
      pts += ' ' + fmt(x) + ',' + fmt(py);
    }
    if (!pts.empty()) pts += ' ';
    pts += fmt(x) + ',' + fmt(y);
  }
  return pts;
}

}  // namespace

std::string render_series_svg(const std::vector<SeriesPoint>& series) {
  if (series.empty()) throw EmptyInput("plot: empty series");

  const std::int64_t t0 = series.front().timestamp;
  const std::int64_t t1 = series.back().timestamp;
  double y_max = 15.0, y_min = 0.0;
  for (const auto& p : series) {
    y_max = std::max({y_max, static_cast<double>(p.truth), p.prediction});
    y_min = std::min({y_min, static_cast<double>(p.truth), p.prediction});
  }
  y_max = std::ceil(y_max);
  y_min = std::floor(y_min);

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const double x_scale = t1 > t0 ? plot_w / static_cast<double>(t1 - t0) : 0.0;
  const double x0 = kMarginLeft + (t1 > t0 ? 0.0 : plot_w / 2.0);
  const double y_scale = plot_h / (y_max - y_min);
  const double y_base = kMarginTop + plot_h + y_min * y_scale;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(kWidth) + "\" height=\"" + std::to_string(kHeight) +
         "\" viewBox=\"0 0 " + std::to_string(kWidth) + ' ' +
         std::to_string(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  const double ax_bottom = kMarginTop + plot_h;
  svg += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" + fmt(kMarginTop) +
         "\" x2=\"" + fmt(kMarginLeft) + "\" y2=\"" + fmt(ax_bottom) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" + fmt(ax_bottom) +
         "\" x2=\"" + fmt(kWidth - kMarginRight) + "\" y2=\"" + fmt(ax_bottom) +
         "\" stroke=\"black\"/>\n";

  // y ticks at integer steps, thinned to at most 8 labels
  const int y_span = static_cast<int>(y_max - y_min);
  const int y_tick = std::max(1, (y_span + 7) / 8);
  for (int v = static_cast<int>(y_min); v <= static_cast<int>(y_max); v += y_tick) {
    const double y = y_base - v * y_scale;
    svg += "<line x1=\"" + fmt(kMarginLeft - 4) + "\" y1=\"" + fmt(y) +
           "\" x2=\"" + fmt(kMarginLeft) + "\" y2=\"" + fmt(y) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(kMarginLeft - 8) + "\" y=\"" + fmt(y + 4) +
           "\" font-size=\"12\" text-anchor=\"end\">" + std::to_string(v) +
           "</text>\n";
  }

  // x range labels: first and last timestamp
  svg += "<text x=\"" + fmt(kMarginLeft) + "\" y=\"" + fmt(ax_bottom + 18) +
         "\" font-size=\"12\" text-anchor=\"start\">" + format_timestamp(t0) +
         "</text>\n";
  if (t1 > t0) {
    svg += "<text x=\"" + fmt(kWidth - kMarginRight) + "\" y=\"" +
           fmt(ax_bottom + 18) + "\" font-size=\"12\" text-anchor=\"end\">" +
           format_timestamp(t1) + "</text>\n";
  }

  // axis titles
  svg += "<text x=\"" + fmt(kMarginLeft + plot_w / 2.0) + "\" y=\"" +
         fmt(kHeight - 16) + "\" font-size=\"14\" text-anchor=\"middle\">time"
         "</text>\n";
  svg += "<text x=\"18\" y=\"" + fmt(kMarginTop + plot_h / 2.0) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt(kMarginTop + plot_h / 2.0) + ")\">people count</text>\n";

  auto truth_value = [](const SeriesPoint& p) { return static_cast<double>(p.truth); };
  auto pred_value = [](const SeriesPoint& p) { return p.prediction; };
  svg += "<polyline fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"1.5\" points=\"" +
         step_points(series, truth_value, x0, x_scale, t0, y_base, y_scale) +
         "\"/>\n";
  svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"" +
         step_points(series, pred_value, x0, x_scale, t0, y_base, y_scale) +
         "\"/>\n";

  // legend
  const double lx = kWidth - kMarginRight - 180;
  svg += "<line x1=\"" + fmt(lx) + "\" y1=\"20\" x2=\"" + fmt(lx + 28) +
         "\" y2=\"20\" stroke=\"#ff7f0e\" stroke-width=\"1.5\"/>\n";
  svg += "<text x=\"" + fmt(lx + 34) +
         "\" y=\"24\" font-size=\"12\">truth</text>\n";
  svg += "<line x1=\"" + fmt(lx + 90) + "\" y1=\"20\" x2=\"" + fmt(lx + 118) +
         "\" y2=\"20\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
  svg += "<text x=\"" + fmt(lx + 124) +
         "\" y=\"24\" font-size=\"12\">prediction</text>\n";

  svg += "</svg>\n";
  return svg;
}

}  // namespace occulstm

#pragma once

#include <string>
#include <vector>

#include "occulstm/eval.hpp"

namespace occulstm {

// Self-contained SVG with two step-line series (truth in orange, prediction
// in blue), time/people-count axis labels and a legend. Byte-deterministic
// for a fixed input series.
std::string render_series_svg(const std::vector<SeriesPoint>& series);

}  // namespace occulstm

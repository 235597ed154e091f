#ifndef HRPCA_SVG_REPORT_HPP
#define HRPCA_SVG_REPORT_HPP

#include <string>
#include <vector>

#include "hrpca/matrix.hpp"

namespace hrpca {

// Rows-by-features grid of |residual| as a standalone SVG 1.1 document.
// Grayscale ramp: cell value v maps to gray level round(255 * (1 - v/vmax))
// with vmax = max |residual| (white = 0, black = vmax); a zero matrix is a
// uniform white grid.
std::string residual_heatmap_svg(const FeatureMatrix& residuals,
                                 const std::string& title = "residual heatmap");

// Score-per-row-index line plot with one horizontal threshold rule (class
// "threshold-rule") as a standalone SVG 1.1 document.
std::string score_line_plot_svg(const std::vector<double>& scores, double threshold,
                                const std::string& title = "anomaly scores");

}  // namespace hrpca

#endif  // HRPCA_SVG_REPORT_HPP

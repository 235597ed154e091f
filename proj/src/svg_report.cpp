#include "hrpca/svg_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hrpca/errors.hpp"

namespace hrpca {

namespace {

// Fixed two-decimal coordinates keep the documents byte-stable across runs.
std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* kSvgHeader = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

}  // namespace

std::string residual_heatmap_svg(const FeatureMatrix& residuals,
                                 const std::string& title) {
    if (residuals.n_rows == 0 || residuals.n_cols == 0) {
        throw InvalidInput("cannot plot an empty residual matrix");
    }
    const std::size_t n = residuals.n_rows, d = residuals.n_cols;

    double vmax = 0.0;
    for (double v : residuals.values) vmax = std::max(vmax, std::abs(v));

    const double margin = 40.0;
    const double cell_w = std::max(4.0, std::min(24.0, 720.0 / static_cast<double>(d)));
    const double cell_h = std::max(1.0, std::min(16.0, 560.0 / static_cast<double>(n)));
    const double width = margin * 2 + cell_w * static_cast<double>(d);
    const double height = margin * 2 + cell_h * static_cast<double>(n);

    std::ostringstream out;
    out << kSvgHeader << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
        << "width=\"" << coord(width) << "\" height=\"" << coord(height)
        << "\" viewBox=\"0 0 " << coord(width) << ' ' << coord(height) << "\">\n";
    out << "<title>" << escape_xml(title) << "</title>\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << coord(width) << "\" height=\""
        << coord(height) << "\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double v = std::abs(residuals.at(i, j));
            const double t = vmax > 0.0 ? v / vmax : 0.0;
            const int gray = static_cast<int>(std::lround(255.0 * (1.0 - t)));
            out << "<rect class=\"cell\" x=\""
                << coord(margin + cell_w * static_cast<double>(j)) << "\" y=\""
                << coord(margin + cell_h * static_cast<double>(i)) << "\" width=\""
                << coord(cell_w) << "\" height=\"" << coord(cell_h) << "\" fill=\"rgb("
                << gray << ',' << gray << ',' << gray << ")\"/>\n";
        }
    }
    // Feature labels along the top edge.
    for (std::size_t j = 0; j < d; ++j) {
        out << "<text x=\"" << coord(margin + cell_w * (static_cast<double>(j) + 0.5))
            << "\" y=\"" << coord(margin - 6.0)
            << "\" font-size=\"9\" text-anchor=\"middle\">"
            << escape_xml(residuals.col_names[j]) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string score_line_plot_svg(const std::vector<double>& scores, double threshold,
                                const std::string& title) {
    if (scores.empty()) {
        throw InvalidInput("cannot plot empty scores");
    }
    const double margin = 50.0;
    const double plot_w = 700.0, plot_h = 360.0;
    const double width = plot_w + 2 * margin, height = plot_h + 2 * margin;

    double ymax = threshold;
    for (double s : scores) ymax = std::max(ymax, s);
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.05;

    auto x_of = [&](std::size_t i) {
        return scores.size() == 1
                   ? margin + plot_w / 2
                   : margin + plot_w * static_cast<double>(i) /
                                  static_cast<double>(scores.size() - 1);
    };
    auto y_of = [&](double v) { return margin + plot_h * (1.0 - v / ymax); };

    std::ostringstream out;
    out << kSvgHeader << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
        << "width=\"" << coord(width) << "\" height=\"" << coord(height)
        << "\" viewBox=\"0 0 " << coord(width) << ' ' << coord(height) << "\">\n";
    out << "<title>" << escape_xml(title) << "</title>\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << coord(width) << "\" height=\""
        << coord(height) << "\" fill=\"white\"/>\n";
    // Axes.
    out << "<line x1=\"" << coord(margin) << "\" y1=\"" << coord(margin + plot_h)
        << "\" x2=\"" << coord(margin + plot_w) << "\" y2=\"" << coord(margin + plot_h)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << coord(margin) << "\" y1=\"" << coord(margin) << "\" x2=\""
        << coord(margin) << "\" y2=\"" << coord(margin + plot_h)
        << "\" stroke=\"black\"/>\n";
    // Score polyline.
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (i > 0) out << ' ';
        out << coord(x_of(i)) << ',' << coord(y_of(scores[i]));
    }
    out << "\"/>\n";
    // Threshold rule.
    out << "<line class=\"threshold-rule\" x1=\"" << coord(margin) << "\" y1=\""
        << coord(y_of(threshold)) << "\" x2=\"" << coord(margin + plot_w) << "\" y2=\""
        << coord(y_of(threshold)) << "\" stroke=\"red\" stroke-dasharray=\"6,3\"/>\n";
    out << "<text x=\"" << coord(margin + plot_w + 4.0) << "\" y=\""
        << coord(y_of(threshold) + 3.0) << "\" font-size=\"10\" fill=\"red\">"
        << "threshold</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace hrpca

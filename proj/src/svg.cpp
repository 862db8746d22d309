#include <algorithm>
#include <array>
#include <cstdio>

#include "docspace/analysis.hpp"
#include "docspace/error.hpp"
#include "docspace/text_io.hpp"

namespace docspace {

namespace {

constexpr double kSize = 1000.0;
constexpr double kMargin = 0.05 * kSize;

// Tableau 10.
constexpr std::array<const char*, 10> kPalette{"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                               "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

std::string escape(std::string_view s) {
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

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::string layout_svg(const Positions& positions, const std::vector<std::string>& labels) {
    const auto m = positions.rows();
    require(static_cast<Eigen::Index>(labels.size()) == m, ErrorCode::DimensionMismatch,
            "label count differs from layout size");
    require(positions.allFinite(), ErrorCode::InvalidArgument, "layout has non-finite coordinates");

    std::vector<std::string> classes(labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    auto color = [&](const std::string& label) {
        const auto idx = std::lower_bound(classes.begin(), classes.end(), label) - classes.begin();
        return kPalette[static_cast<std::size_t>(idx) % kPalette.size()];
    };

    double scale = 0.0, x0 = 0.0, y1 = 0.0, pad_x = 0.0, pad_y = 0.0;
    if (m > 0) {
        const Eigen::Vector2d lo = positions.colwise().minCoeff();
        const Eigen::Vector2d hi = positions.colwise().maxCoeff();
        const double extent = std::max(hi.x() - lo.x(), hi.y() - lo.y());
        const double inner = kSize - 2.0 * kMargin;
        if (extent > 0.0) {
            scale = inner / extent;
            pad_x = 0.5 * (inner - (hi.x() - lo.x()) * scale);
            pad_y = 0.5 * (inner - (hi.y() - lo.y()) * scale);
        }
        x0 = lo.x();
        y1 = hi.y();
    }

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n<g class=\"points\">\n";
    for (Eigen::Index i = 0; i < m; ++i) {
        double cx = kSize / 2.0, cy = kSize / 2.0;
        if (scale > 0.0) {
            cx = kMargin + pad_x + (positions(i, 0) - x0) * scale;
            cy = kMargin + pad_y + (y1 - positions(i, 1)) * scale;
        }
        svg += "<circle cx=\"" + fixed(cx) + "\" cy=\"" + fixed(cy) + "\" r=\"4\" fill=\"" +
               color(labels[static_cast<std::size_t>(i)]) + "\" fill-opacity=\"0.8\"/>\n";
    }
    svg += "</g>\n<g class=\"legend\" font-family=\"sans-serif\" font-size=\"14\">\n";
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const double y = 10.0 + 20.0 * static_cast<double>(c);
        svg += "<rect x=\"10\" y=\"" + fixed(y) + "\" width=\"12\" height=\"12\" fill=\"" + color(classes[c]) + "\"/>";
        svg += "<text x=\"28\" y=\"" + fixed(y + 11.0) + "\">" + escape(classes[c]) + "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

void export_layout_svg(const Positions& positions, const std::vector<std::string>& labels,
                       const std::filesystem::path& path) {
    text::write_file(path, layout_svg(positions, labels));
}

}  // namespace docspace

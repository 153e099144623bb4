#include "msvar/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace msvar {

namespace {

std::string escape(const std::string& s) {
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

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

std::string small_multiples_svg(const std::string& title, const std::vector<ChartPanel>& panels, int columns) {
    constexpr double kPanelW = 220, kPanelH = 160, kMargin = 30, kHeader = 40;
    columns = std::max(1, std::min<int>(columns, static_cast<int>(std::max<std::size_t>(panels.size(), 1))));
    const int rows = static_cast<int>((panels.size() + static_cast<std::size_t>(columns) - 1) / static_cast<std::size_t>(columns));
    const double width = columns * kPanelW;
    const double height = kHeader + rows * kPanelH;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
        << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
        << "</text>\n";
    for (std::size_t k = 0; k < panels.size(); ++k) {
        const auto& p = panels[k];
        const double ox = static_cast<double>(k % static_cast<std::size_t>(columns)) * kPanelW;
        const double oy = kHeader + static_cast<double>(k / static_cast<std::size_t>(columns)) * kPanelH;
        const double x0 = ox + kMargin, x1 = ox + kPanelW - 10, y0 = oy + 20, y1 = oy + kPanelH - 20;
        double lo = 0.0, hi = 0.0;
        for (double v : p.values)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        if (hi - lo < 1e-300) {
            hi += 1.0;
            lo -= 1.0;
        }
        const auto n = p.values.size();
        auto px = [&](std::size_t i) { return n > 1 ? x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(n - 1) : x0; };
        auto py = [&](double v) { return y1 - (y1 - y0) * (v - lo) / (hi - lo); };

        out << "<g>\n<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(oy + 12) << "\" text-anchor=\"middle\">"
            << escape(p.title) << "</text>\n";
        out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
            << fmt(y1 - y0) << "\" fill=\"none\" stroke=\"#999\"/>\n";
        out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(py(0.0)) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(py(0.0))
            << "\" stroke=\"#bbb\" stroke-dasharray=\"3,3\"/>\n";
        out << "<text x=\"" << fmt(x0 - 2) << "\" y=\"" << fmt(y0 + 8) << "\" text-anchor=\"end\">" << label(hi) << "</text>\n";
        out << "<text x=\"" << fmt(x0 - 2) << "\" y=\"" << fmt(y1) << "\" text-anchor=\"end\">" << label(lo) << "</text>\n";
        out << "<text x=\"" << fmt(x1) << "\" y=\"" << fmt(y1 + 12) << "\" text-anchor=\"end\">" << (n ? n - 1 : 0) << "</text>\n";
        out << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(p.values[i])) continue;
            out << (i ? " " : "") << fmt(px(i)) << ',' << fmt(py(p.values[i]));
        }
        out << "\"/>\n</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace msvar

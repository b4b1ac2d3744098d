#ifndef DUHEM_IO_SVG_HPP
#define DUHEM_IO_SVG_HPP

#include "format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace duhem::io {

struct Point {
    double x;
    double y;
};

enum class LineStyle { solid, dashed, dotted };

struct PlotSeries {
    std::string label;
    std::vector<Point> points; // a NaN coordinate breaks the line
    LineStyle style = LineStyle::solid;
    std::string color = "#1f4e9e";
};

struct PlotSpec {
    std::string title;
    std::string x_label = "u";
    std::string y_label = "y";
    std::vector<PlotSeries> series;
    std::optional<Point> marker;
    // Series that set the axis window; others are clipped to it. Empty means all.
    std::vector<std::size_t> bounds_from;
};

inline constexpr double svg_width = 800.0;
inline constexpr double svg_height = 600.0;

namespace detail {

struct Window {
    double x0, x1, y0, y1;
};

inline double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    const double nice = r <= 1.0 ? 1.0 : r <= 2.0 ? 2.0 : r <= 5.0 ? 5.0 : 10.0;
    return nice * mag;
}

inline int decimals_for(double step) { return std::max(0, -static_cast<int>(std::floor(std::log10(step) + 1e-9))); }

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline void widen(double& lo, double& hi) {
    if (!(hi > lo)) {
        const double pad = std::max(1.0, std::abs(lo));
        lo -= pad;
        hi += pad;
        return;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
}

} // namespace detail

inline std::string render_svg(const PlotSpec& spec) {
    constexpr double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
    const double pw = svg_width - left - right, ph = svg_height - top - bottom;

    detail::Window w{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto include = [&w](const Point& p) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return;
        w.x0 = std::min(w.x0, p.x);
        w.x1 = std::max(w.x1, p.x);
        w.y0 = std::min(w.y0, p.y);
        w.y1 = std::max(w.y1, p.y);
    };
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        if (!spec.bounds_from.empty() &&
            std::find(spec.bounds_from.begin(), spec.bounds_from.end(), i) == spec.bounds_from.end()) {
            continue;
        }
        for (const auto& p : spec.series[i].points) include(p);
    }
    if (spec.marker) include(*spec.marker);
    if (!std::isfinite(w.x0)) w = {-1.0, 1.0, -1.0, 1.0};
    detail::widen(w.x0, w.x1);
    detail::widen(w.y0, w.y1);

    auto sx = [&](double x) { return left + (x - w.x0) / (w.x1 - w.x0) * pw; };
    auto sy = [&](double y) { return top + (w.y1 - y) / (w.y1 - w.y0) * ph; };
    auto px = [](double v) { return format_fixed(v, 2); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    os << "<defs><clipPath id=\"plot\"><rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(pw)
       << "\" height=\"" << px(ph) << "\"/></clipPath></defs>\n";
    if (!spec.title.empty()) {
        os << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
           << detail::escape(spec.title) << "</text>\n";
    }

    // Axes frame and ticks.
    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    os << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(pw) << "\" height=\"" << px(ph)
       << "\"/>\n";
    os << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
    const double xs = detail::nice_step(w.x1 - w.x0, 8), ys = detail::nice_step(w.y1 - w.y0, 6);
    for (double k = std::ceil(w.x0 / xs); k * xs <= w.x1; k += 1.0) {
        const double x = sx(k * xs);
        os << "<line x1=\"" << px(x) << "\" y1=\"" << px(top + ph) << "\" x2=\"" << px(x) << "\" y2=\""
           << px(top + ph + 5) << "\" stroke=\"black\"/>";
        os << "<text x=\"" << px(x) << "\" y=\"" << px(top + ph + 19) << "\" text-anchor=\"middle\">"
           << format_fixed(k * xs, detail::decimals_for(xs)) << "</text>\n";
    }
    for (double k = std::ceil(w.y0 / ys); k * ys <= w.y1; k += 1.0) {
        const double y = sy(k * ys);
        os << "<line x1=\"" << px(left - 5) << "\" y1=\"" << px(y) << "\" x2=\"" << px(left) << "\" y2=\"" << px(y)
           << "\" stroke=\"black\"/>";
        os << "<text x=\"" << px(left - 8) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\">"
           << format_fixed(k * ys, detail::decimals_for(ys)) << "</text>\n";
    }
    os << "<text x=\"" << px(left + pw / 2) << "\" y=\"" << px(svg_height - 10) << "\" text-anchor=\"middle\">"
       << detail::escape(spec.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << px(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << px(top + ph / 2) << ")\">" << detail::escape(spec.y_label) << "</text>\n";
    os << "</g>\n";

    // Series, thinned to points at least half a pixel apart.
    os << "<g clip-path=\"url(#plot)\" fill=\"none\" stroke-width=\"1.5\">\n";
    for (const auto& s : spec.series) {
        std::string dash;
        if (s.style == LineStyle::dashed) dash = " stroke-dasharray=\"8 5\"";
        if (s.style == LineStyle::dotted) dash = " stroke-dasharray=\"2 3\"";
        std::vector<std::vector<Point>> runs(1);
        for (const auto& p : s.points) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                if (!runs.back().empty()) runs.emplace_back();
                continue;
            }
            const Point q{sx(p.x), sy(p.y)};
            auto& run = runs.back();
            if (!run.empty() && std::abs(q.x - run.back().x) < 0.5 && std::abs(q.y - run.back().y) < 0.5) continue;
            run.push_back(q);
        }
        for (const auto& run : runs) {
            if (run.size() < 2) continue;
            os << "<polyline stroke=\"" << s.color << "\"" << dash << " data-label=\"" << detail::escape(s.label)
               << "\" points=\"";
            for (std::size_t i = 0; i < run.size(); ++i) os << (i ? " " : "") << px(run[i].x) << ',' << px(run[i].y);
            os << "\"/>\n";
        }
    }
    os << "</g>\n";
    if (spec.marker) {
        os << "<circle cx=\"" << px(sx(spec.marker->x)) << "\" cy=\"" << px(sy(spec.marker->y))
           << "\" r=\"6\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace duhem::io

#endif // DUHEM_IO_SVG_HPP

#pragma once

// Small deterministic SVG renderers for line plots and heat maps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace cvmdi::io {

struct LineSeries {
    std::string label;
    std::string color = "#000000";
    bool dashed = false;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
};

struct HeatmapSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string z_label;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double width = 720, height = 460;
    double left = 80, right = 170, top = 40, bottom = 60;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

    double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
    double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

inline void axes(std::ostringstream& os, const Frame& f, const std::string& title, const std::string& xl,
                 const std::string& yl, const std::vector<double>& xt, const std::vector<double>& yt,
                 bool log_y) {
    os << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\""
       << num(f.width - f.left - f.right) << "\" height=\"" << num(f.height - f.top - f.bottom)
       << "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (double x : xt)
        os << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(f.height - f.bottom + 18)
           << "\" text-anchor=\"middle\" font-size=\"12\">" << num(x) << "</text>\n";
    for (double y : yt)
        os << "<text x=\"" << num(f.left - 6) << "\" y=\"" << num(f.py(y) + 4)
           << "\" text-anchor=\"end\" font-size=\"12\">" << (log_y ? "1e" + num(y) : num(y)) << "</text>\n";
    os << "<text x=\"" << num(0.5 * (f.left + f.width - f.right)) << "\" y=\"" << num(f.height - 15)
       << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(xl) << "</text>\n";
    os << "<text transform=\"translate(18," << num(0.5 * (f.top + f.height - f.bottom))
       << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"14\">" << escape(yl) << "</text>\n";
    os << "<text x=\"" << num(0.5 * (f.left + f.width - f.right)) << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-size=\"15\">" << escape(title) << "</text>\n";
}

/// Piecewise-linear viridis approximation, t in [0, 1].
inline std::string viridis(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                                                  {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double u = t - static_cast<double>(i);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[i][0] + u * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + u * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + u * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

}  // namespace detail

inline std::string render_line_plot(const LinePlotSpec& spec, const std::vector<LineSeries>& series) {
    using detail::num;
    detail::Frame f;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    auto yval = [&](double y) { return spec.log_y ? (y > 0 ? std::log10(y) : NAN) : y; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double y = yval(s.y[i]);
            if (!std::isfinite(y) || !std::isfinite(s.x[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    if (spec.log_y) {
        ymin = std::floor(ymin);
        ymax = std::ceil(ymax);
    } else {
        const double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }
    f.x0 = xmin;
    f.x1 = xmax;
    f.y0 = ymin;
    f.y1 = ymax;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width) << "\" height=\""
       << num(f.height) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    detail::axes(os, f, spec.title, spec.x_label, spec.y_label, detail::nice_ticks(xmin, xmax),
                 detail::nice_ticks(ymin, ymax), spec.log_y);
    double legend_y = f.top + 10;
    for (const auto& s : series) {
        std::string d;
        bool pen_down = false;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double y = yval(s.y[i]);
            if (!std::isfinite(y)) {
                pen_down = false;
                continue;
            }
            d += (pen_down ? " L" : " M") + num(f.px(s.x[i])) + "," + num(f.py(y));
            pen_down = true;
        }
        if (!d.empty())
            os << "<path d=\"" << d.substr(1) << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\""
               << (s.dashed ? " stroke-dasharray=\"8,4,2,4\"" : "") << "/>\n";
        const double lx = f.width - f.right + 12;
        os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(legend_y) << "\" x2=\"" << num(lx + 24) << "\" y2=\""
           << num(legend_y) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
           << (s.dashed ? " stroke-dasharray=\"8,4,2,4\"" : "") << "/>\n";
        os << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(legend_y + 4) << "\" font-size=\"12\">"
           << detail::escape(s.label) << "</text>\n";
        legend_y += 18;
    }
    os << "</svg>\n";
    return os.str();
}

/// Heat map of z[iy][ix] on the (x, y) grid; non-finite cells are drawn gray.
inline std::string render_heatmap(const HeatmapSpec& spec, const std::vector<double>& x,
                                  const std::vector<double>& y, const std::vector<std::vector<double>>& z) {
    using detail::num;
    detail::Frame f;
    auto edges = [](const std::vector<double>& g) {
        std::vector<double> e(g.size() + 1);
        if (g.size() == 1) return std::vector<double>{g[0] - 0.5, g[0] + 0.5};
        for (std::size_t i = 1; i < g.size(); ++i) e[i] = 0.5 * (g[i - 1] + g[i]);
        e[0] = g[0] - (e[1] - g[0]);
        e[g.size()] = g.back() + (g.back() - e[g.size() - 1]);
        return e;
    };
    const auto xe = edges(x), ye = edges(y);
    f.x0 = xe.front();
    f.x1 = xe.back();
    f.y0 = ye.front();
    f.y1 = ye.back();

    double zmin = std::numeric_limits<double>::infinity(), zmax = -zmin;
    for (const auto& row : z)
        for (double v : row)
            if (std::isfinite(v)) zmin = std::min(zmin, v), zmax = std::max(zmax, v);
    if (!std::isfinite(zmin)) zmin = 0, zmax = 1;
    if (zmax == zmin) zmax = zmin + 1;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width) << "\" height=\""
       << num(f.height) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    for (std::size_t iy = 0; iy < y.size(); ++iy)
        for (std::size_t ix = 0; ix < x.size(); ++ix) {
            const double v = z[iy][ix];
            const std::string fill = std::isfinite(v) ? detail::viridis((v - zmin) / (zmax - zmin)) : "#c8c8c8";
            const double px0 = f.px(xe[ix]), px1 = f.px(xe[ix + 1]);
            const double py0 = f.py(ye[iy + 1]), py1 = f.py(ye[iy]);
            os << "<rect x=\"" << num(px0) << "\" y=\"" << num(py0) << "\" width=\"" << num(px1 - px0 + 0.3)
               << "\" height=\"" << num(py1 - py0 + 0.3) << "\" fill=\"" << fill << "\" shape-rendering=\"crispEdges\"/>\n";
        }
    detail::axes(os, f, spec.title, spec.x_label, spec.y_label, detail::nice_ticks(f.x0, f.x1),
                 detail::nice_ticks(f.y0, f.y1), false);

    // colour bar
    const double bx = f.width - f.right + 30, bw = 18, btop = f.top, bh = f.height - f.top - f.bottom;
    const int steps = 50;
    for (int i = 0; i < steps; ++i) {
        const double t = (i + 0.5) / steps;
        os << "<rect x=\"" << num(bx) << "\" y=\"" << num(btop + bh * (1 - (i + 1.0) / steps)) << "\" width=\""
           << num(bw) << "\" height=\"" << num(bh / steps + 0.3) << "\" fill=\"" << detail::viridis(t) << "\"/>\n";
    }
    for (double t : detail::nice_ticks(zmin, zmax, 5))
        os << "<text x=\"" << num(bx + bw + 4) << "\" y=\"" << num(btop + bh * (1 - (t - zmin) / (zmax - zmin)) + 4)
           << "\" font-size=\"11\">" << num(t) << "</text>\n";
    os << "<text transform=\"translate(" << num(bx + bw + 58) << "," << num(btop + 0.5 * bh)
       << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << detail::escape(spec.z_label) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace cvmdi::io

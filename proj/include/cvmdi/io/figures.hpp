#pragma once

// Plots rebuilt from the CSV tables alone, so a figure can always be
// regenerated from its data file.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvmdi/io/artifacts.hpp"
#include "cvmdi/io/csv.hpp"
#include "cvmdi/io/svg.hpp"

namespace cvmdi::io {

struct Figure {
    std::string suffix;  ///< appended to the CSV stem, e.g. "" or "_2PAS"
    std::string svg;
};

inline std::string kind_color(const std::string& kind) {
    static const std::map<std::string, std::string> colors{
        {"TMSV", "#000000"}, {"1PAS", "#1f77b4"}, {"2PAS", "#d62728"}, {"2PR", "#2ca02c"}};
    auto it = colors.find(kind);
    return it == colors.end() ? "#7f7f7f" : it->second;
}

namespace detail {
// kinds in order of first appearance
inline std::vector<std::string> kinds_in(const CsvTable& t) {
    std::vector<std::string> out;
    for (const auto& k : t.text("kind"))
        if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    return out;
}

inline std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}
}  // namespace detail

inline std::vector<Figure> logneg_figures(const CsvTable& t) {
    const auto kind = t.text("kind");
    const auto T = t.numeric("T"), en = t.numeric("E_N"), p = t.numeric("success_prob");
    std::vector<LineSeries> series;
    std::size_t longest = 0;
    for (const std::string& k : detail::kinds_in(t)) {
        LineSeries e{k + " E_N", kind_color(k), false, {}, {}}, pr{k + " P", kind_color(k), true, {}, {}};
        for (std::size_t i = 0; i < kind.size(); ++i)
            if (kind[i] == k) {
                e.x.push_back(T[i]);
                e.y.push_back(en[i]);
                pr.x.push_back(T[i]);
                pr.y.push_back(p[i]);
            }
        longest = std::max(longest, e.x.size());
        series.push_back(std::move(e));
        if (k != "TMSV") series.push_back(std::move(pr));
    }
    if (longest < 2) return {};
    const std::string r = comment_value(t, "rdb");
    return {{"", render_line_plot({"Log-negativity (solid) and success probability (dashed), r = " + r + " dB",
                                   "beam-splitter transmissivity T", "E_N, P", true},
                                  series)}};
}

inline std::vector<Figure> distance_figures(const CsvTable& t) {
    const auto kind = t.text("kind");
    const auto L = t.numeric("L_km"), skr = t.numeric("skr");
    std::vector<LineSeries> series;
    std::size_t longest = 0;
    for (const std::string& k : detail::kinds_in(t)) {
        LineSeries s{k, kind_color(k), false, {}, {}};
        for (std::size_t i = 0; i < kind.size(); ++i)
            if (kind[i] == k) {
                s.x.push_back(L[i]);
                s.y.push_back(skr[i] >= kSkrFloor ? skr[i] : NAN);
            }
        longest = std::max(longest, s.x.size());
        series.push_back(std::move(s));
    }
    if (longest < 2) return {};
    const std::string title = "SKR vs distance, r = " + comment_value(t, "rdb") +
                              " dB, xi = " + comment_value(t, "xi");
    return {{"", render_line_plot({title, "Alice-Charlie distance (km)", "SKR (bits/pulse)", true}, series)}};
}

/// One heat map of -log10(SKR) per kind; infeasible cells are gray.
inline std::vector<Figure> heatmap_figures(const CsvTable& t) {
    const std::string mode = comment_value(t, "mode");
    const bool noise = mode == "noise";
    const auto kind = t.text("kind");
    const auto r = t.numeric("r_db"), z = t.numeric("neglog10_skr");
    const auto axis = t.numeric(noise ? "xi" : "L_km");
    const auto rs = detail::unique_sorted(r), xs = detail::unique_sorted(axis);
    if (rs.size() < 2 || xs.size() < 2) return {};
    auto pos = [](const std::vector<double>& g, double v) {
        return static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), v) - g.begin());
    };
    std::vector<Figure> out;
    for (const std::string& k : detail::kinds_in(t)) {
        std::vector<std::vector<double>> grid(rs.size(), std::vector<double>(xs.size(), NAN));
        for (std::size_t i = 0; i < kind.size(); ++i)
            if (kind[i] == k) grid[pos(rs, r[i])][pos(xs, axis[i])] = z[i];
        const std::string fixed = noise ? "L = " + comment_value(t, "length") + " km"
                                        : "xi = " + comment_value(t, "xi");
        out.push_back({"_" + k, render_heatmap({k + ": -log10(SKR), " + fixed,
                                                noise ? "total excess noise xi" : "Alice-Charlie distance (km)",
                                                "squeezing (dB)", "-log10(SKR)"},
                                               xs, rs, grid)});
    }
    return out;
}

/// Dispatches on the "command" comment. Frontier tables have no figure.
inline std::vector<Figure> figures_for(const CsvTable& t) {
    const std::string cmd = comment_value(t, "command");
    if (std::find(t.header.begin(), t.header.end(), "max_L_km") != t.header.end() ||
        std::find(t.header.begin(), t.header.end(), "max_xi") != t.header.end())
        return {};
    if (cmd == "logneg") return logneg_figures(t);
    if (cmd == "distance") return distance_figures(t);
    if (cmd == "heatmap") return heatmap_figures(t);
    throw std::invalid_argument("no renderer for command '" + cmd + "'");
}

}  // namespace cvmdi::io

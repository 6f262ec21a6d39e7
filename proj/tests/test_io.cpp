#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "cvmdi/io/artifacts.hpp"
#include "cvmdi/io/config.hpp"
#include "cvmdi/io/csv.hpp"
#include "cvmdi/io/figures.hpp"
#include "cvmdi/io/svg.hpp"

using namespace cvmdi;
using namespace cvmdi::io;

namespace {
RunManifest manifest(const std::string& cmd, std::vector<std::pair<std::string, std::string>> cfg) {
    RunManifest m;
    m.command = cmd;
    m.config = std::move(cfg);
    m.timestamp = "2000-01-01T00:00:00Z";
    return m;
}

CsvTable reparse(const CsvTable& t) {
    std::istringstream in(to_csv_string(t));
    return parse_csv(in);
}

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
    return n;
}
}  // namespace

TEST(FormatNumber, TwelveSignificantDigits) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(-2.5e-17), "-2.5e-17");
    EXPECT_EQ(format_number(NAN), "nan");
    EXPECT_EQ(format_number(-INFINITY), "-inf");
    for (double v : {1.0 / 7.0, 12345.6789012345, 3.3e-9})
        EXPECT_NEAR(std::stod(format_number(v)) / v, 1.0, 1e-11);
    EXPECT_EQ(format_optional(std::nullopt), "");
}

TEST(Csv, RoundTrip) {
    CsvTable t{{"command = demo", "x = 1"}, {"a", "b", "c"}, {{"1", "TMSV", ""}, {"2.5", "2PR", "7"}}};
    const CsvTable u = reparse(t);
    EXPECT_EQ(u.comments, t.comments);
    EXPECT_EQ(u.header, t.header);
    EXPECT_EQ(u.rows, t.rows);
    EXPECT_EQ(to_csv_string(u), to_csv_string(t));
    const auto c = u.numeric("c");
    EXPECT_TRUE(std::isnan(c[0]));
    EXPECT_EQ(c[1], 7.0);
    EXPECT_EQ(u.text("b")[1], "2PR");
    EXPECT_THROW(u.column_index("zz"), std::out_of_range);
}

TEST(Csv, RowWidthMismatch) {
    std::istringstream in("a,b\n1,2\n3\n");
    EXPECT_THROW(parse_csv(in), std::runtime_error);
}

TEST(Config, ParsesKeyValueLines) {
    std::istringstream in("# comment\n\n  gamma = 0.9 \nkinds=1PAS,2PAS\r\nxi =  \n");
    const KeyValueConfig c = KeyValueConfig::parse(in);
    EXPECT_EQ(c.get_double("gamma"), 0.9);
    EXPECT_EQ(c.get("kinds"), "1PAS,2PAS");
    EXPECT_EQ(c.get("xi"), "");
    EXPECT_FALSE(c.get("alpha").has_value());
    EXPECT_THROW(c.get_double("kinds"), std::invalid_argument);
}

TEST(Config, Errors) {
    std::istringstream no_eq("gamma 0.9\n");
    EXPECT_THROW(KeyValueConfig::parse(no_eq), std::invalid_argument);
    std::istringstream no_key(" = 3\n");
    EXPECT_THROW(KeyValueConfig::parse(no_key), std::invalid_argument);
    EXPECT_THROW(KeyValueConfig::load("/nonexistent/cvmdi.cfg"), std::invalid_argument);
}

TEST(Manifest, CommentsOmitTimestampAndReadBackAsConfig) {
    const RunManifest m = manifest("logneg", {{"rdb", "1"}, {"points", "5"}});
    std::string body;
    for (const auto& c : m.csv_comments()) {
        EXPECT_EQ(c.find("2000-01-01"), std::string::npos);
        body += c + "\n";
    }
    std::istringstream in(body);
    const KeyValueConfig c = KeyValueConfig::parse(in);
    EXPECT_EQ(c.get("command"), "logneg");
    EXPECT_EQ(c.get_double("points"), 5.0);
    EXPECT_EQ(m.to_json()["timestamp"], "2000-01-01T00:00:00Z");

    CsvTable t{m.csv_comments(), {"x"}, {}};
    EXPECT_EQ(comment_value(reparse(t), "rdb"), "1");
    EXPECT_EQ(comment_value(t, "missing"), "");
}

TEST(Tables, LognegColumns) {
    const auto s = logneg_scan({StateKind::TMSV, StateKind::PAS2}, 1.0, {0.3, 0.6});
    const CsvTable t = logneg_table(s, manifest("logneg", {{"rdb", "1"}}));
    EXPECT_EQ(t.header, (std::vector<std::string>{"T", "kind", "E_N", "success_prob"}));
    ASSERT_EQ(t.rows.size(), 4u);
    const CsvTable u = reparse(t);
    EXPECT_NEAR(u.numeric("E_N")[3], s[3].log_negativity, 1e-11 * s[3].log_negativity);
}

TEST(Tables, HeatmapColumnsAndInfeasibleCells) {
    SweepConfig cfg;
    cfg.kinds = {StateKind::TMSV, StateKind::PAS1};
    cfg.r_db_grid = {0.0, 2.0};
    cfg.length_grid = {0.0, 10.0};
    const SweepResult res = sweep(cfg);
    const CsvTable t = heatmap_table(res, manifest("heatmap", {{"mode", "distance"}}));
    EXPECT_EQ(t.header.size(), 9u);
    const CsvTable u = reparse(t);
    const auto r = u.numeric("r_db");
    const auto feas = u.text("feasible");
    const auto z = u.text("neglog10_skr");
    const auto Ts = u.text("T_star");
    const auto kind = u.text("kind");
    for (std::size_t i = 0; i < u.rows.size(); ++i) {
        if (r[i] == 0.0) {
            EXPECT_EQ(feas[i], "0");
            EXPECT_EQ(z[i], "");
        }
        EXPECT_EQ(Ts[i].empty(), kind[i] == "TMSV");
    }
}

TEST(Svg, LinePlotIsDeterministicAndSkipsNonPositive) {
    const std::vector<LineSeries> s{{"a", "#ff0000", false, {0, 1, 2, 3}, {1, 0.1, -1, 0.01}},
                                    {"b", "#0000ff", true, {0, 3}, {0.5, 0.5}}};
    const std::string one = render_line_plot({"t", "x", "y", true}, s);
    EXPECT_EQ(one, render_line_plot({"t", "x", "y", true}, s));
    EXPECT_EQ(one.rfind("<svg", 0), 0u);
    EXPECT_NE(one.find("stroke-dasharray"), std::string::npos);
    // the negative point splits series a into two pieces
    EXPECT_EQ(count(one, "<path"), 2u);
    EXPECT_EQ(count(one.substr(one.find("<path")), " M"), 1u);
}

TEST(Svg, HeatmapGraysOutNonFinite) {
    const std::string svg = render_heatmap({"t", "x", "y", "z"}, {0, 1}, {0, 1, 2}, {{1, 2}, {NAN, 3}, {4, NAN}});
    EXPECT_EQ(count(svg, "#c8c8c8"), 2u);
    EXPECT_EQ(svg, render_heatmap({"t", "x", "y", "z"}, {0, 1}, {0, 1, 2}, {{1, 2}, {NAN, 3}, {4, NAN}}));
    EXPECT_EQ(io::detail::viridis(0.0), "#440154");
    EXPECT_EQ(io::detail::viridis(1.0), "#fde725");
}

TEST(Figures, RebuiltFromCsvAlone) {
    const auto s = logneg_scan({StateKind::TMSV, StateKind::PAS1}, 1.0, linspace(0.1, 0.9, 9));
    const CsvTable t = logneg_table(s, manifest("logneg", {{"rdb", "1"}}));
    const auto a = figures_for(t);
    const auto b = figures_for(reparse(t));
    ASSERT_EQ(a.size(), 1u);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(a[0].svg, b[0].svg);
    // solid E_N for both kinds, dashed P only for the heralded one
    EXPECT_EQ(count(a[0].svg, "<path"), 3u);
}

TEST(Figures, HeatmapPerKind) {
    SweepConfig cfg;
    cfg.kinds = {StateKind::TMSV, StateKind::PAS2};
    cfg.r_db_grid = {0.0, 1.0, 2.0};
    cfg.length_grid = {0.0, 10.0, 20.0};
    const CsvTable t = heatmap_table(sweep(cfg), manifest("heatmap", {{"mode", "distance"}, {"xi", "0.004"}}));
    const auto figs = figures_for(reparse(t));
    ASSERT_EQ(figs.size(), 2u);
    EXPECT_EQ(figs[0].suffix, "_TMSV");
    EXPECT_EQ(figs[1].suffix, "_2PAS");
    // the r = 0 row has no key anywhere
    EXPECT_GE(count(figs[1].svg, "#c8c8c8"), 3u);
}

TEST(Figures, DegenerateAndUnknownTables) {
    const auto s = logneg_scan({StateKind::PAS1}, 1.0, {0.5});
    EXPECT_TRUE(figures_for(logneg_table(s, manifest("logneg", {}))).empty());
    const std::vector<FrontierPoint> f{{StateKind::PAS1, 1.0, 27.8, ""}};
    EXPECT_TRUE(figures_for(frontier_table(f, FrontierAxis::distance, manifest("heatmap", {}))).empty());
    EXPECT_THROW(figures_for(CsvTable{{"command = nope"}, {"kind"}, {}}), std::invalid_argument);
}

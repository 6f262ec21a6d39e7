#pragma once

// Result tables and run manifests written by the CLI.

#include <chrono>
#include <cmath>
#include <ctime>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cvmdi/experiments.hpp"
#include "cvmdi/io/csv.hpp"

#ifndef CVMDI_VERSION
#define CVMDI_VERSION "unknown"
#endif

namespace cvmdi::io {

inline constexpr const char* kVersion = CVMDI_VERSION;

/// Everything needed to rerun a command. The timestamp is kept out of the CSV
/// comments so that identical runs give identical CSV bytes.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;  ///< resolved, defaults included
    std::string version = kVersion;
    std::string timestamp;
    std::vector<std::string> outputs;

    /// "key = value" lines; the block parses as a config file for the same command.
    std::vector<std::string> csv_comments() const {
        std::vector<std::string> out{"command = " + command, "version = " + version};
        for (const auto& [k, v] : config) out.push_back(k + " = " + v);
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["version"] = version;
        j["timestamp"] = timestamp;
        j["config"] = nlohmann::json::object();
        for (const auto& [k, v] : config) j["config"][k] = v;
        j["outputs"] = outputs;
        return j;
    }
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Value of a "key = value" comment line, or empty.
inline std::string comment_value(const CsvTable& t, const std::string& key) {
    const std::string prefix = key + " = ";
    for (const auto& c : t.comments)
        if (c.rfind(prefix, 0) == 0) return c.substr(prefix.size());
    return "";
}

inline CsvTable logneg_table(const std::vector<LognegSample>& samples, const RunManifest& m) {
    CsvTable t{m.csv_comments(), {"T", "kind", "E_N", "success_prob"}, {}};
    for (const LognegSample& s : samples)
        t.rows.push_back({format_number(s.T), std::string(to_string(s.kind)), format_number(s.log_negativity),
                          format_number(s.success_prob)});
    return t;
}

/// SKR against distance; the sweep must have a single squeezing and noise value.
inline CsvTable distance_table(const SweepResult& res, const RunManifest& m) {
    CsvTable t{m.csv_comments(), {"L_km", "kind", "skr", "T_star", "P"}, {}};
    for (const SweepCell& c : res.cells)
        t.rows.push_back({format_number(c.length_km), std::string(to_string(c.kind)),
                          c.error.empty() ? format_number(c.report.skr) : "", format_optional(c.T_star),
                          c.error.empty() ? format_number(c.report.success_prob) : ""});
    return t;
}

inline CsvTable heatmap_table(const SweepResult& res, const RunManifest& m) {
    CsvTable t{m.csv_comments(),
               {"kind", "r_db", "L_km", "xi", "skr", "neglog10_skr", "T_star", "P", "feasible"},
               {}};
    for (const SweepCell& c : res.cells) {
        const bool ok = c.error.empty();
        t.rows.push_back({std::string(to_string(c.kind)), format_number(c.r_db), format_number(c.length_km),
                          format_number(c.xi_total), ok ? format_number(c.report.skr) : "",
                          ok && c.feasible ? format_number(-std::log10(c.report.skr)) : "",
                          format_optional(c.T_star), ok ? format_number(c.report.success_prob) : "",
                          c.feasible ? "1" : "0"});
    }
    return t;
}

inline CsvTable frontier_table(const std::vector<FrontierPoint>& pts, FrontierAxis axis, const RunManifest& m) {
    CsvTable t{m.csv_comments(), {"kind", "r_db", axis == FrontierAxis::distance ? "max_L_km" : "max_xi"}, {}};
    for (const FrontierPoint& p : pts)
        t.rows.push_back({std::string(to_string(p.kind)), format_number(p.r_db),
                          p.error.empty() ? format_number(p.value) : ""});
    return t;
}

}  // namespace cvmdi::io

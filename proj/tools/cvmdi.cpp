// cvmdi: validation battery and figure sweeps for CV-MDI-QKD with
// TMSV, photon-added/subtracted and photon-replaced resource states.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cvmdi/experiments.hpp"
#include "cvmdi/io/artifacts.hpp"
#include "cvmdi/io/config.hpp"
#include "cvmdi/io/csv.hpp"
#include "cvmdi/io/figures.hpp"
#include "cvmdi/validation.hpp"

namespace fs = std::filesystem;
using namespace cvmdi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Settings resolved with precedence: command-line flag > config file > default.
class Settings {
public:
    explicit Settings(CLI::App* app) : app_(app) {}

    template <class T>
    void add(const std::string& key, T& target, const std::string& help) {
        std::string flag = key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        CLI::Option* opt = app_->add_option("--" + flag, target, help)->capture_default_str();
        entries_.push_back({key,
                            [opt, &target, key](const io::KeyValueConfig& cfg) {
                                if (opt->count() > 0) return;
                                if (auto v = cfg.get(key)) target = parse<T>(key, *v);
                            },
                            [&target] { return text(target); }});
    }

    void resolve(const std::string& config_path) {
        io::KeyValueConfig cfg;
        if (fs::path(config_path).extension() == ".csv") {
            // replay: the comment block of an earlier output
            std::istringstream in([&] {
                std::string body;
                for (const auto& c : io::read_csv(config_path).comments) body += c + "\n";
                return body;
            }());
            cfg = io::KeyValueConfig::parse(in);
            if (cfg.get("command") != app_->get_name())
                throw UsageError(config_path + " was not written by '" + app_->get_name() + "'");
        } else if (!config_path.empty()) {
            cfg = io::KeyValueConfig::load(config_path);
        }
        for (const auto& [k, v] : cfg.values()) {
            const bool known = std::any_of(entries_.begin(), entries_.end(),
                                           [&](const Entry& e) { return e.key == k; });
            // manifest lines written into CSV headers are accepted back
            if (!known && k != "command" && k != "version")
                throw UsageError("config: unknown key '" + k + "' for " + app_->get_name());
        }
        for (const Entry& e : entries_) e.apply(cfg);
    }

    std::vector<std::pair<std::string, std::string>> echo() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const Entry& e : entries_) out.emplace_back(e.key, e.show());
        return out;
    }

private:
    struct Entry {
        std::string key;
        std::function<void(const io::KeyValueConfig&)> apply;
        std::function<std::string()> show;
    };

    template <class T>
    static T parse(const std::string& key, const std::string& v) {
        if constexpr (std::is_same_v<T, std::string>) {
            return v;
        } else {
            std::istringstream is(v);
            T out{};
            if (!(is >> out) || !is.eof()) throw UsageError("config key " + key + ": cannot parse '" + v + "'");
            return out;
        }
    }

    template <class T>
    static std::string text(const T& v) {
        if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_floating_point_v<T>) return io::format_number(v);
        else return std::to_string(v);
    }

    CLI::App* app_;
    std::vector<Entry> entries_;
};

unsigned thread_count() {
    if (const char* env = std::getenv("CVMDI_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1) throw UsageError("CVMDI_THREADS must be a positive integer");
        return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<StateKind> parse_kinds(const std::string& list) {
    std::vector<StateKind> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto k = parse_kind(item);
        if (!k) throw UsageError("unknown state kind '" + item + "' (expected TMSV, 1PAS, 2PAS, 2PR)");
        out.push_back(*k);
    }
    if (out.empty()) throw UsageError("no state kinds given");
    return out;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw UsageError(what);
}

class Output {
public:
    Output(const std::string& dir, io::RunManifest manifest) : dir_(dir), manifest_(std::move(manifest)) {
        fs::create_directories(dir_);
        manifest_.timestamp = io::utc_timestamp();
    }

    const io::RunManifest& manifest() const { return manifest_; }

    // The CSV lists every file the run writes, so outputs are registered before writing.
    void expect(const std::string& name) { manifest_.outputs.push_back(name); }

    void text(const std::string& name, const std::string& body) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
        f << body;
    }

    /// Writes the CSV, then renders its figures from the file just written.
    void csv_with_figures(const std::string& stem, const io::CsvTable& table) {
        const fs::path path = dir_ / (stem + ".csv");
        io::write_csv(path.string(), table);
        for (const io::Figure& fig : io::figures_for(io::read_csv(path.string())))
            text(stem + fig.suffix + ".svg", fig.svg);
    }

    void finish(const std::string& stem) {
        expect(stem + "_manifest.json");
        text(stem + "_manifest.json", manifest_.to_json().dump(2) + "\n");
    }

private:
    fs::path dir_;
    io::RunManifest manifest_;
};

std::string cell_errors(const SweepResult& res) {
    std::string out;
    for (const SweepCell& c : res.cells)
        if (!c.error.empty())
            out += std::string(to_string(c.kind)) + " r=" + io::format_number(c.r_db) + " L=" +
                   io::format_number(c.length_km) + " xi=" + io::format_number(c.xi_total) + ": " + c.error + "\n";
    return out;
}

// ---- verify ----------------------------------------------------------------

std::string verify_text(const ValidationReport& rep) {
    std::ostringstream os;
    char line[256];
    os << "gates\n";
    for (const GateRow& g : rep.gates) {
        std::snprintf(line, sizeof line, "  %-4s %-62s err=%-12.4g tol=%.0e\n", g.pass ? "ok" : "FAIL",
                      g.name.c_str(), g.error, g.tolerance);
        os << line;
    }
    os << "printed-formula audit\n";
    for (const AuditRow& a : rep.audits) {
        std::snprintf(line, sizeof line, "  %-20s %-58s err=%.4g\n", a.status.c_str(), a.name.c_str(), a.error);
        os << line;
        if (!a.note.empty()) os << "       " << a.note << "\n";
    }
    os << "vacuum limits (lambda = 0)\n";
    for (const LimitRow& l : rep.vacuum_limits) {
        std::snprintf(line, sizeof line, "  %-5s T=%-4g series=%-14.10g expected=%-14.10g printed=%.10g\n",
                      l.name.c_str(), l.T, l.series, l.expected, l.printed);
        os << line;
    }
    os << (rep.passed() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

int cmd_verify(const std::string& out_dir) {
    const ValidationReport rep = run_validation();
    Output out(out_dir, {"verify", {}, io::kVersion, "", {}});
    out.expect("verify_report.json");
    out.expect("verify_report.txt");
    nlohmann::json j = to_json(rep);
    j["version"] = io::kVersion;
    out.text("verify_report.json", j.dump(2) + "\n");
    const std::string txt = verify_text(rep);
    out.text("verify_report.txt", txt);
    out.finish("verify");
    std::cout << txt;
    return rep.passed() ? kExitOk : kExitFailure;
}

// ---- logneg ----------------------------------------------------------------

struct LognegArgs {
    double rdb = 1.0;
    double t_min = 0.01;
    double t_max = 0.99;
    int points = 200;
    std::string kinds = "TMSV,1PAS,2PAS,2PR";
};

int cmd_logneg(const LognegArgs& a, const Settings& s, const std::string& out_dir) {
    require(a.rdb >= 0.0, "--rdb must be nonnegative");
    require(a.points >= 1, "--points must be at least 1");
    require(a.t_min > 0.0 && a.t_max < 1.0 && a.t_min <= a.t_max, "need 0 < t-min <= t-max < 1");
    require(a.points == 1 || a.t_min < a.t_max, "t-min must be below t-max for more than one point");

    const auto samples = logneg_scan(parse_kinds(a.kinds), a.rdb, linspace(a.t_min, a.t_max, a.points));
    Output out(out_dir, {"logneg", s.echo(), io::kVersion, "", {}});
    out.expect("logneg.csv");
    if (a.points > 1) out.expect("logneg.svg");
    out.csv_with_figures("logneg", io::logneg_table(samples, out.manifest()));
    out.finish("logneg");
    return kExitOk;
}

// ---- distance --------------------------------------------------------------

struct DistanceArgs {
    double rdb = 1.0;
    double xi = 0.004;
    double gamma = 0.95;
    double alpha = 0.2;
    double l_min = 0.0;
    double l_max = 80.0;
    int points = 161;
    std::string kinds = "TMSV,1PAS,2PAS,2PR";
};

int cmd_distance(const DistanceArgs& a, const Settings& s, const std::string& out_dir, unsigned threads) {
    require(a.rdb >= 0.0, "--rdb must be nonnegative");
    require(a.xi >= 0.0, "--xi must be nonnegative");
    require(a.points >= 1, "--points must be at least 1");
    require(a.l_min >= 0.0 && a.l_min <= a.l_max, "need 0 <= l-min <= l-max");
    require(a.points == 1 || a.l_min < a.l_max, "l-min must be below l-max for more than one point");

    SweepConfig cfg;
    cfg.kinds = parse_kinds(a.kinds);
    cfg.r_db_grid = {a.rdb};
    cfg.length_grid = linspace(a.l_min, a.l_max, a.points);
    cfg.xi_grid = {a.xi};
    cfg.gamma = a.gamma;
    cfg.protocol.alpha_db_per_km = a.alpha;
    cfg.validate();
    const SweepResult res = sweep(cfg, threads);
    const auto front = frontier_scan(FrontierAxis::distance, cfg.kinds, {a.rdb}, a.xi, a.gamma, cfg.protocol,
                                     cfg.optimizer, {}, threads);

    Output out(out_dir, {"distance", s.echo(), io::kVersion, "", {}});
    out.expect("distance.csv");
    out.expect("distance_frontier.csv");
    if (a.points > 1) out.expect("distance.svg");
    out.csv_with_figures("distance", io::distance_table(res, out.manifest()));
    out.csv_with_figures("distance_frontier", io::frontier_table(front, FrontierAxis::distance, out.manifest()));
    out.finish("distance");

    for (const FrontierPoint& p : front)
        std::printf("%-5s max distance %s km\n", std::string(to_string(p.kind)).c_str(),
                    io::format_number(p.value).c_str());
    if (const std::string err = cell_errors(res); !err.empty()) {
        std::cerr << "evaluation failed in some cells:\n" << err;
        return kExitFailure;
    }
    return kExitOk;
}

// ---- heatmap ---------------------------------------------------------------

struct HeatmapArgs {
    std::string mode = "distance";
    double rdb_min = 0.0;
    double rdb_max = 3.0;
    int rdb_points = 61;
    double axis_min = 0.0;
    double axis_max = -1.0;  // mode default when negative
    int axis_points = 0;     // mode default when zero
    double xi = 0.004;
    double length = 25.0;
    double gamma = 0.95;
    double alpha = 0.2;
    std::string kinds = "TMSV,1PAS,2PAS,2PR";
};

int cmd_heatmap(HeatmapArgs a, Settings& s, const std::string& out_dir, unsigned threads) {
    require(a.mode == "distance" || a.mode == "noise", "--mode must be distance or noise");
    const bool noise = a.mode == "noise";
    if (a.axis_max < 0.0) a.axis_max = noise ? 0.035 : 80.0;
    if (a.axis_points == 0) a.axis_points = noise ? 71 : 81;
    require(a.rdb_min >= 0.0 && a.rdb_min <= a.rdb_max, "need 0 <= rdb-min <= rdb-max");
    require(a.rdb_points >= 1 && a.axis_points >= 1, "point counts must be at least 1");
    require(a.axis_min >= 0.0 && a.axis_min <= a.axis_max, "need 0 <= axis-min <= axis-max");
    require(a.xi >= 0.0 && a.length >= 0.0, "--xi and --length must be nonnegative");

    SweepConfig cfg;
    cfg.kinds = parse_kinds(a.kinds);
    cfg.r_db_grid = linspace(a.rdb_min, a.rdb_max, a.rdb_points);
    const auto axis = linspace(a.axis_min, a.axis_max, a.axis_points);
    cfg.length_grid = noise ? std::vector<double>{a.length} : axis;
    cfg.xi_grid = noise ? axis : std::vector<double>{a.xi};
    cfg.gamma = a.gamma;
    cfg.protocol.alpha_db_per_km = a.alpha;
    cfg.validate();
    const SweepResult res = sweep(cfg, threads);
    const FrontierAxis fa = noise ? FrontierAxis::noise : FrontierAxis::distance;
    const auto front = frontier_scan(fa, cfg.kinds, cfg.r_db_grid, noise ? a.length : a.xi, a.gamma, cfg.protocol,
                                     cfg.optimizer, {}, threads);

    // echo the materialized axis defaults
    auto echo = s.echo();
    for (auto& [k, v] : echo) {
        if (k == "axis_max") v = io::format_number(a.axis_max);
        if (k == "axis_points") v = std::to_string(a.axis_points);
    }
    const std::string stem = "heatmap_" + a.mode;
    Output out(out_dir, {"heatmap", echo, io::kVersion, "", {}});
    out.expect(stem + ".csv");
    out.expect(stem + "_frontier.csv");
    if (a.rdb_points > 1 && a.axis_points > 1)
        for (StateKind k : cfg.kinds) out.expect(stem + "_" + std::string(to_string(k)) + ".svg");
    out.csv_with_figures(stem, io::heatmap_table(res, out.manifest()));
    out.csv_with_figures(stem + "_frontier", io::frontier_table(front, fa, out.manifest()));
    out.finish(stem);

    auto column = [&](StateKind k) {
        std::vector<double> v;
        for (const FrontierPoint& p : front)
            if (p.kind == k) v.push_back(p.value);
        return v;
    };
    const bool have_pair = std::count(cfg.kinds.begin(), cfg.kinds.end(), StateKind::PAS1) &&
                           std::count(cfg.kinds.begin(), cfg.kinds.end(), StateKind::PAS2);
    if (have_pair) {
        const auto c = crossover(cfg.r_db_grid, column(StateKind::PAS1), column(StateKind::PAS2));
        std::printf("1PAS overtakes 2PAS in max %s at r = %s dB\n", noise ? "noise" : "distance",
                    c ? io::format_number(*c).c_str() : "(none in range)");
    }
    if (const std::string err = cell_errors(res); !err.empty()) {
        std::cerr << "evaluation failed in some cells:\n" << err;
        return kExitFailure;
    }
    return kExitOk;
}

// ---- render ----------------------------------------------------------------

int cmd_render(const std::string& csv, const std::string& out_dir) {
    const io::CsvTable t = io::read_csv(csv);
    const std::string stem = fs::path(csv).stem().string();
    const fs::path dir = out_dir.empty() ? fs::path(csv).parent_path() : fs::path(out_dir);
    if (!dir.empty()) fs::create_directories(dir);
    const auto figs = io::figures_for(t);
    for (const io::Figure& f : figs) {
        const fs::path p = dir / (stem + f.suffix + ".svg");
        std::ofstream(p, std::ios::binary) << f.svg;
        std::cout << p.string() << "\n";
    }
    if (figs.empty()) std::cout << "no figure for " << csv << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CV-MDI-QKD key rates with Gaussian and non-Gaussian resource states"};
    app.set_version_flag("--version", std::string(io::kVersion));
    app.require_subcommand(1);

    std::string out_dir = ".";
    std::string config_path;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--config", config_path, "key = value settings file (flags take precedence)");
    };

    CLI::App* verify = app.add_subcommand("verify", "run the oracle and closed-form validation battery");
    verify->add_option("--out", out_dir, "output directory")->capture_default_str();

    LognegArgs la;
    CLI::App* logneg = app.add_subcommand("logneg", "log-negativity and success probability against T");
    common(logneg);
    Settings ls(logneg);
    ls.add("rdb", la.rdb, "squeezing in dB");
    ls.add("t_min", la.t_min, "smallest transmissivity");
    ls.add("t_max", la.t_max, "largest transmissivity");
    ls.add("points", la.points, "number of T values");
    ls.add("kinds", la.kinds, "comma-separated state kinds");

    DistanceArgs da;
    CLI::App* distance = app.add_subcommand("distance", "optimized SKR against Alice-Charlie distance");
    common(distance);
    Settings ds(distance);
    ds.add("rdb", da.rdb, "squeezing in dB");
    ds.add("xi", da.xi, "total excess noise");
    ds.add("gamma", da.gamma, "reconciliation efficiency");
    ds.add("alpha", da.alpha, "fiber loss in dB/km");
    ds.add("l_min", da.l_min, "shortest distance (km)");
    ds.add("l_max", da.l_max, "longest distance (km)");
    ds.add("points", da.points, "number of distances");
    ds.add("kinds", da.kinds, "comma-separated state kinds");

    HeatmapArgs ha;
    CLI::App* heatmap = app.add_subcommand("heatmap", "-log10(SKR) over squeezing x distance or noise");
    common(heatmap);
    Settings hs(heatmap);
    hs.add("mode", ha.mode, "distance (fixed xi) or noise (fixed length)");
    hs.add("rdb_min", ha.rdb_min, "smallest squeezing (dB)");
    hs.add("rdb_max", ha.rdb_max, "largest squeezing (dB)");
    hs.add("rdb_points", ha.rdb_points, "number of squeezing values");
    hs.add("axis_min", ha.axis_min, "start of the distance (km) or noise axis");
    hs.add("axis_max", ha.axis_max, "end of that axis [80 km | 0.035]");
    hs.add("axis_points", ha.axis_points, "points on that axis [81 | 71]");
    hs.add("xi", ha.xi, "fixed total excess noise in distance mode");
    hs.add("length", ha.length, "fixed distance (km) in noise mode");
    hs.add("gamma", ha.gamma, "reconciliation efficiency");
    hs.add("alpha", ha.alpha, "fiber loss in dB/km");
    hs.add("kinds", ha.kinds, "comma-separated state kinds");

    std::string render_csv, render_out;
    CLI::App* render = app.add_subcommand("render", "regenerate the figures of a CSV written by this tool");
    render->add_option("csv", render_csv, "CSV file")->required()->check(CLI::ExistingFile);
    render->add_option("--out", render_out, "output directory (default: next to the CSV)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (verify->parsed()) return cmd_verify(out_dir);
        if (render->parsed()) return cmd_render(render_csv, render_out);
        const unsigned threads = thread_count();
        if (logneg->parsed()) {
            ls.resolve(config_path);
            return cmd_logneg(la, ls, out_dir);
        }
        if (distance->parsed()) {
            ds.resolve(config_path);
            return cmd_distance(da, ds, out_dir, threads);
        }
        if (heatmap->parsed()) {
            hs.resolve(config_path);
            return cmd_heatmap(ha, hs, out_dir, threads);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

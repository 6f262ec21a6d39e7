#pragma once

// Key-rate pipeline and the sweeps built on it: transmissivity optimization,
// distance and noise frontiers, squeezing x distance / noise grids and
// log-negativity scans.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cvmdi/analytic_states.hpp"
#include "cvmdi/errors.hpp"
#include "cvmdi/gaussian_core.hpp"
#include "cvmdi/security.hpp"

namespace cvmdi {

/// SKR at or below this value counts as "no key".
inline constexpr double kSkrFloor = 1e-10;

struct ProtocolOptions {
    double alpha_db_per_km = 0.2;
    /// Bob's TMSV squeezing; defaults to Alice's.
    std::optional<double> bob_r_db;
};

/// One point of the full pipeline: state -> covariance -> channel -> swap -> security.
inline SecurityReport skr_point(StateKind kind, double r_db, double T, double length_km,
                                double xi_total, double gamma, const ProtocolOptions& opts = {}) {
    const SqueezeParam alice = from_db(r_db);
    const SqueezeParam bob = from_db(opts.bob_r_db.value_or(r_db));

    const SchmidtState state = coeffs(kind, alice, T);
    const ModeCovariance ca = covariance_from_state(state);
    const ModeCovariance cb = tmsv_covariance(bob.variance());

    const ChannelParams ch{length_km, opts.alpha_db_per_km, xi_total};
    const SwappedCov cov = swap(apply_channel(PreparedCov{ca.a, ca.c, cb.a, cb.c}, ch));
    const double p = is_heralded(kind) ? state.success_prob : 1.0;
    return evaluate_security(cov, p, gamma);
}

struct OptimizerSettings {
    std::size_t coarse_points = 60;
    double t_min = 0.01;
    double t_max = 0.999;
    double tolerance = 1e-4;
};

struct OptimizedPoint {
    double T_star = 0.0;  ///< NaN for TMSV
    SecurityReport report;
    bool feasible = false;  ///< best SKR is positive
};

/// Maximizes SKR over T by a coarse scan followed by golden-section refinement
/// of the bracket around the best scan point. Ties go to the smaller T.
inline OptimizedPoint optimize_T(StateKind kind, double r_db, double length_km, double xi_total,
                                 double gamma, const ProtocolOptions& opts = {},
                                 const OptimizerSettings& set = {}) {
    if (!is_heralded(kind)) throw DomainError("optimize_T: TMSV has no transmissivity to optimize");
    if (set.coarse_points < 2 || !(set.t_min > 0.0 && set.t_max < 1.0 && set.t_min < set.t_max))
        throw DomainError("optimize_T: invalid optimizer settings");

    auto eval = [&](double T) { return skr_point(kind, r_db, T, length_km, xi_total, gamma, opts); };

    const double step = (set.t_max - set.t_min) / static_cast<double>(set.coarse_points - 1);
    std::size_t best_i = 0;
    double best_T = set.t_min;
    SecurityReport best = eval(best_T);
    for (std::size_t i = 1; i < set.coarse_points; ++i) {
        const double T = set.t_min + step * static_cast<double>(i);
        SecurityReport r = eval(T);
        if (r.skr > best.skr) {
            best = r;
            best_T = T;
            best_i = i;
        }
    }

    double lo = set.t_min + step * static_cast<double>(best_i == 0 ? 0 : best_i - 1);
    double hi = set.t_min + step * static_cast<double>(std::min(best_i + 1, set.coarse_points - 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    SecurityReport f1 = eval(x1), f2 = eval(x2);
    while (hi - lo > set.tolerance) {
        if (f1.skr >= f2.skr) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2);
        }
    }
    const bool left = f1.skr >= f2.skr;
    const double refined_T = left ? x1 : x2;
    const SecurityReport& refined = left ? f1 : f2;
    if (refined.skr > best.skr || (refined.skr == best.skr && refined_T < best_T)) {
        best = refined;
        best_T = refined_T;
    }
    return {best_T, best, best.skr > 0.0};
}

/// SKR with T optimized for heralded kinds; TMSV evaluated directly.
inline OptimizedPoint best_point(StateKind kind, double r_db, double length_km, double xi_total,
                                 double gamma, const ProtocolOptions& opts = {},
                                 const OptimizerSettings& set = {}) {
    if (is_heralded(kind)) return optimize_T(kind, r_db, length_km, xi_total, gamma, opts, set);
    SecurityReport r = skr_point(kind, r_db, 0.5, length_km, xi_total, gamma, opts);
    return {std::numeric_limits<double>::quiet_NaN(), r, r.skr > 0.0};
}

struct FrontierSettings {
    double skr_floor = kSkrFloor;
    double distance_resolution_km = 0.1;
    double distance_ceiling_km = 2000.0;
    double noise_resolution = 1e-5;
    double noise_ceiling = 1.0;
};

namespace detail {
/// Runs f(0..n-1), strided over up to `threads` workers. Each index is written
/// by exactly one worker, so results don't depend on the thread count.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) f(i);
        });
}

/// Largest x in [0, ceiling] with ok(x), assuming ok is monotone (true then false).
template <class Pred>
double bisect_frontier(Pred&& ok, double first_hi, double ceiling, double resolution) {
    if (!ok(0.0)) return 0.0;
    double lo = 0.0, hi = first_hi;
    while (ok(hi)) {
        lo = hi;
        if (hi >= ceiling) return ceiling;
        hi = std::min(2.0 * hi, ceiling);
    }
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}
}  // namespace detail

/// Longest Alice-Charlie distance (km) with optimized SKR above the floor.
inline double max_distance(StateKind kind, double r_db, double xi_total, double gamma,
                           const ProtocolOptions& opts = {}, const OptimizerSettings& set = {},
                           const FrontierSettings& fs = {}) {
    if (r_db == 0.0) return 0.0;
    auto ok = [&](double L) {
        return best_point(kind, r_db, L, xi_total, gamma, opts, set).report.skr >= fs.skr_floor;
    };
    return detail::bisect_frontier(ok, 50.0, fs.distance_ceiling_km, fs.distance_resolution_km);
}

/// Largest total excess noise with optimized SKR above the floor at fixed distance.
inline double max_noise(StateKind kind, double r_db, double length_km, double gamma,
                        const ProtocolOptions& opts = {}, const OptimizerSettings& set = {},
                        const FrontierSettings& fs = {}) {
    if (r_db == 0.0) return 0.0;
    auto ok = [&](double xi) {
        return best_point(kind, r_db, length_km, xi, gamma, opts, set).report.skr >= fs.skr_floor;
    };
    return detail::bisect_frontier(ok, 0.01, fs.noise_ceiling, fs.noise_resolution);
}

enum class FrontierAxis { distance, noise };

struct FrontierPoint {
    StateKind kind = StateKind::TMSV;
    double r_db = 0.0;
    double value = 0.0;  ///< km for distance, total xi for noise
    std::string error;
};

/// max_distance (at fixed xi) or max_noise (at fixed length) for every kind
/// and squeezing value, kind-major.
inline std::vector<FrontierPoint> frontier_scan(FrontierAxis axis, const std::vector<StateKind>& kinds,
                                                const std::vector<double>& r_db_grid, double fixed_value,
                                                double gamma, const ProtocolOptions& opts = {},
                                                const OptimizerSettings& set = {},
                                                const FrontierSettings& fs = {}, unsigned threads = 1) {
    std::vector<FrontierPoint> out(kinds.size() * r_db_grid.size());
    detail::parallel_for(out.size(), threads, [&](std::size_t i) {
        FrontierPoint& p = out[i];
        p.kind = kinds[i / r_db_grid.size()];
        p.r_db = r_db_grid[i % r_db_grid.size()];
        try {
            p.value = axis == FrontierAxis::distance
                          ? max_distance(p.kind, p.r_db, fixed_value, gamma, opts, set, fs)
                          : max_noise(p.kind, p.r_db, fixed_value, gamma, opts, set, fs);
        } catch (const std::exception& e) {
            p.value = std::numeric_limits<double>::quiet_NaN();
            p.error = e.what();
        }
    });
    return out;
}

struct SweepConfig {
    std::vector<StateKind> kinds{kAllKinds.begin(), kAllKinds.end()};
    std::vector<double> r_db_grid{1.0};
    std::vector<double> length_grid{25.0};
    std::vector<double> xi_grid{0.004};
    double gamma = 0.95;
    ProtocolOptions protocol;
    OptimizerSettings optimizer;

    void validate() const {
        auto sorted = [](const std::vector<double>& g) {
            return !g.empty() && std::is_sorted(g.begin(), g.end());
        };
        if (kinds.empty()) throw DomainError("SweepConfig: no state kinds");
        if (!sorted(r_db_grid) || !sorted(length_grid) || !sorted(xi_grid))
            throw DomainError("SweepConfig: grids must be nonempty and ascending");
        if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("SweepConfig: gamma must lie in (0, 1]");
        if (!(optimizer.t_min > 0.0 && optimizer.t_max < 1.0))
            throw DomainError("SweepConfig: T search domain must lie inside (0, 1)");
    }
};

struct SweepCell {
    StateKind kind = StateKind::TMSV;
    double r_db = 0.0;
    double length_km = 0.0;
    double xi_total = 0.0;
    std::optional<double> T_star;
    SecurityReport report;
    bool feasible = false;
    std::string error;  ///< empty unless the cell failed
};

struct SweepResult {
    SweepConfig config;
    /// Ordered kind-major, then r_db, length, xi.
    std::vector<SweepCell> cells;

    std::size_t index(std::size_t k, std::size_t r, std::size_t l, std::size_t x) const {
        const std::size_t nr = config.r_db_grid.size(), nl = config.length_grid.size(),
                          nx = config.xi_grid.size();
        return ((k * nr + r) * nl + l) * nx + x;
    }
};

/// Evaluates every grid cell. Cells are independent and may be split over
/// `threads` workers; the output order is fixed by the grid.
inline SweepResult sweep(const SweepConfig& config, unsigned threads = 1) {
    config.validate();
    SweepResult out;
    out.config = config;
    const std::size_t nk = config.kinds.size(), nr = config.r_db_grid.size(),
                      nl = config.length_grid.size(), nx = config.xi_grid.size();
    out.cells.resize(nk * nr * nl * nx);

    auto fill = [&](std::size_t i) {
        std::size_t rem = i;
        const std::size_t x = rem % nx;
        rem /= nx;
        const std::size_t l = rem % nl;
        rem /= nl;
        const std::size_t r = rem % nr;
        const std::size_t k = rem / nr;
        SweepCell& cell = out.cells[i];
        cell.kind = config.kinds[k];
        cell.r_db = config.r_db_grid[r];
        cell.length_km = config.length_grid[l];
        cell.xi_total = config.xi_grid[x];
        try {
            const OptimizedPoint p = best_point(cell.kind, cell.r_db, cell.length_km, cell.xi_total,
                                                config.gamma, config.protocol, config.optimizer);
            if (is_heralded(cell.kind)) cell.T_star = p.T_star;
            cell.report = p.report;
            cell.feasible = p.report.skr >= kSkrFloor;
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    };

    detail::parallel_for(out.cells.size(), threads, fill);
    return out;
}

struct LognegSample {
    StateKind kind = StateKind::TMSV;
    double T = 0.0;
    double log_negativity = 0.0;
    double success_prob = 1.0;
};

/// E_N and heralding probability against T for each kind; TMSV is the
/// T-independent baseline sampled on the same grid.
inline std::vector<LognegSample> logneg_scan(const std::vector<StateKind>& kinds, double r_db,
                                             const std::vector<double>& T_grid) {
    if (T_grid.empty()) throw DomainError("logneg_scan: empty T grid");
    for (double T : T_grid)
        if (!(T > 0.0 && T < 1.0)) throw DomainError("logneg_scan: T must lie in (0, 1)");
    const SqueezeParam sq = from_db(r_db);
    std::vector<LognegSample> out;
    out.reserve(kinds.size() * T_grid.size());
    for (StateKind k : kinds) {
        const double base = is_heralded(k) ? 0.0 : log_negativity(coeffs(k, sq, 0.5));
        for (double T : T_grid) {
            if (!is_heralded(k)) {
                out.push_back({k, T, base, 1.0});
                continue;
            }
            const SchmidtState s = coeffs(k, sq, T);
            out.push_back({k, T, log_negativity(s), s.success_prob});
        }
    }
    return out;
}

/// Evenly spaced grid including both ends; a single point yields {lo}.
inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return g;
}

/// First grid value at which `a` strictly exceeds `b`, having been at or below
/// it at the previous grid value. Empty if no such switch occurs.
inline std::optional<double> crossover(const std::vector<double>& grid, const std::vector<double>& a,
                                       const std::vector<double>& b) {
    for (std::size_t i = 1; i < grid.size() && i < a.size() && i < b.size(); ++i)
        if (a[i - 1] <= b[i - 1] && a[i] > b[i]) return grid[i];
    return std::nullopt;
}

}  // namespace cvmdi

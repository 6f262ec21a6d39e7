#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "cvmdi/experiments.hpp"

using namespace cvmdi;

namespace {
bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }
}  // namespace

TEST(SkrPoint, ZeroLossTmsvHasNoEavesdropper) {
    for (double db : {1.0, 2.0, 3.0}) {
        const SecurityReport r = skr_point(StateKind::TMSV, db, 0.5, 0.0, 0.0, 0.95);
        EXPECT_NEAR(r.chi_be, 0.0, 1e-9);
        EXPECT_NEAR(r.skr, 0.95 * r.i_ab, 1e-9);
        EXPECT_GT(r.i_ab, 0.0);
        EXPECT_EQ(r.success_prob, 1.0);
    }
}

TEST(SkrPoint, FrozenOnePasValues) {
    // regression values from this implementation, not from an outside source
    const SecurityReport r = skr_point(StateKind::PAS1, 1.0, 0.5, 10.0, 0.004, 0.95);
    EXPECT_NEAR(r.skr / -2.0235897618952269e-4, 1.0, 1e-10);
    EXPECT_NEAR(r.success_prob / 0.55693629708581904, 1.0, 1e-12);
    const OptimizedPoint o = optimize_T(StateKind::PAS1, 1.0, 10.0, 0.004, 0.95);
    EXPECT_NEAR(o.T_star, 0.869, 2e-4);
    EXPECT_NEAR(o.report.skr / 1.1626781049879644e-05, 1.0, 1e-8);
}

TEST(SkrPoint, HeraldingProbabilityScalesRate) {
    const SecurityReport r = skr_point(StateKind::PAS2, 2.0, 0.7, 5.0, 0.004, 0.95);
    EXPECT_NEAR(r.skr, r.success_prob * (0.95 * r.i_ab - r.chi_be), 1e-15);
    EXPECT_LT(r.success_prob, 1.0);
}

TEST(SkrPoint, SeparateBobSqueezing) {
    ProtocolOptions o;
    o.bob_r_db = 1.0;
    const SecurityReport a = skr_point(StateKind::TMSV, 1.0, 0.5, 5.0, 0.004, 0.95);
    const SecurityReport b = skr_point(StateKind::TMSV, 1.0, 0.5, 5.0, 0.004, 0.95, o);
    EXPECT_TRUE(same_bits(a.skr, b.skr));
    o.bob_r_db = 3.0;
    EXPECT_NE(skr_point(StateKind::TMSV, 1.0, 0.5, 5.0, 0.004, 0.95, o).skr, a.skr);
}

TEST(OptimizeT, BeatsEveryCoarseScanPoint) {
    const OptimizerSettings set;
    for (StateKind k : kHeraldedKinds) {
        const OptimizedPoint best = optimize_T(k, 1.5, 15.0, 0.004, 0.95, {}, set);
        for (double T : linspace(set.t_min, set.t_max, 200))
            EXPECT_GE(best.report.skr, skr_point(k, 1.5, T, 15.0, 0.004, 0.95).skr - 1e-12) << to_string(k);
        EXPECT_GE(best.T_star, set.t_min);
        EXPECT_LE(best.T_star, set.t_max);
    }
}

TEST(OptimizeT, Deterministic) {
    const OptimizedPoint a = optimize_T(StateKind::PR2, 2.0, 20.0, 0.004, 0.95);
    const OptimizedPoint b = optimize_T(StateKind::PR2, 2.0, 20.0, 0.004, 0.95);
    EXPECT_TRUE(same_bits(a.T_star, b.T_star));
    EXPECT_TRUE(same_bits(a.report.skr, b.report.skr));
}

TEST(OptimizeT, Errors) {
    EXPECT_THROW(optimize_T(StateKind::TMSV, 1.0, 10.0, 0.004, 0.95), DomainError);
    OptimizerSettings bad;
    bad.t_max = 1.0;
    EXPECT_THROW(optimize_T(StateKind::PAS1, 1.0, 10.0, 0.004, 0.95, {}, bad), DomainError);
    bad = {};
    bad.coarse_points = 1;
    EXPECT_THROW(optimize_T(StateKind::PAS1, 1.0, 10.0, 0.004, 0.95, {}, bad), DomainError);
}

TEST(BestPoint, TmsvHasNoTransmissivity) {
    const OptimizedPoint p = best_point(StateKind::TMSV, 2.0, 10.0, 0.004, 0.95);
    EXPECT_TRUE(std::isnan(p.T_star));
    EXPECT_TRUE(p.feasible);
}

TEST(Monotonicity, KeyRateFallsWithDistanceAndNoise) {
    for (StateKind k : kAllKinds)
        for (double db : {1.0, 2.5}) {
            double prev = INFINITY;
            for (double L = 0.0; L <= 60.0; L += 5.0) {
                const double key = std::max(0.0, best_point(k, db, L, 0.004, 0.95).report.skr);
                EXPECT_LE(key, prev * (1 + 1e-9)) << to_string(k) << " L=" << L;
                prev = key;
            }
            prev = INFINITY;
            for (double xi = 0.0; xi <= 0.03; xi += 0.0025) {
                const double key = std::max(0.0, best_point(k, db, 25.0, xi, 0.95).report.skr);
                EXPECT_LE(key, prev * (1 + 1e-9)) << to_string(k) << " xi=" << xi;
                prev = key;
            }
        }
}

TEST(Frontier, ZeroSqueezingHasNoKey) {
    for (StateKind k : kAllKinds) {
        EXPECT_EQ(max_distance(k, 0.0, 0.004, 0.95), 0.0);
        EXPECT_EQ(max_noise(k, 0.0, 25.0, 0.95), 0.0);
    }
}

TEST(Frontier, NoiselessChannelReachesFurther) {
    for (StateKind k : kAllKinds)
        for (double db : {1.0, 2.0})
            EXPECT_GT(max_distance(k, db, 0.0, 0.95), max_distance(k, db, 0.004, 0.95)) << to_string(k);
}

TEST(Frontier, EdgeSeparatesKeyFromNoKey) {
    const FrontierSettings fs;
    const double L = max_distance(StateKind::PAS2, 1.0, 0.004, 0.95);
    EXPECT_GE(best_point(StateKind::PAS2, 1.0, L, 0.004, 0.95).report.skr, kSkrFloor);
    EXPECT_LT(best_point(StateKind::PAS2, 1.0, L + fs.distance_resolution_km, 0.004, 0.95).report.skr, kSkrFloor);
    const double xi = max_noise(StateKind::PAS1, 2.0, 25.0, 0.95);
    EXPECT_GE(best_point(StateKind::PAS1, 2.0, 25.0, xi, 0.95).report.skr, kSkrFloor);
    EXPECT_LT(best_point(StateKind::PAS1, 2.0, 25.0, xi + fs.noise_resolution, 0.95).report.skr, kSkrFloor);
}

TEST(Frontier, BisectionHelper) {
    EXPECT_NEAR(detail::bisect_frontier([](double x) { return x <= 123.456; }, 50.0, 2000.0, 1e-3), 123.456, 1e-3);
    EXPECT_EQ(detail::bisect_frontier([](double) { return true; }, 50.0, 2000.0, 1e-3), 2000.0);
    EXPECT_EQ(detail::bisect_frontier([](double) { return false; }, 50.0, 2000.0, 1e-3), 0.0);
}

TEST(Frontier, ScanMatchesDirectCalls) {
    const std::vector<StateKind> kinds{StateKind::TMSV, StateKind::PAS1};
    const std::vector<double> rs{0.0, 1.0, 2.0};
    const auto pts = frontier_scan(FrontierAxis::distance, kinds, rs, 0.004, 0.95, {}, {}, {}, 3);
    ASSERT_EQ(pts.size(), 6u);
    for (const FrontierPoint& p : pts) {
        EXPECT_TRUE(p.error.empty());
        EXPECT_TRUE(same_bits(p.value, max_distance(p.kind, p.r_db, 0.004, 0.95)));
    }
    EXPECT_EQ(pts[4].kind, StateKind::PAS1);
    EXPECT_EQ(pts[4].r_db, 1.0);
}

TEST(Sweep, SingleCell) {
    SweepConfig cfg;
    cfg.kinds = {StateKind::PAS2};
    const SweepResult res = sweep(cfg);
    ASSERT_EQ(res.cells.size(), 1u);
    const SweepCell& c = res.cells[0];
    EXPECT_TRUE(c.error.empty());
    ASSERT_TRUE(c.T_star.has_value());
    const OptimizedPoint direct = optimize_T(StateKind::PAS2, 1.0, 25.0, 0.004, 0.95);
    EXPECT_TRUE(same_bits(c.report.skr, direct.report.skr));
}

TEST(Sweep, OrderAndThreadIndependence) {
    SweepConfig cfg;
    cfg.r_db_grid = {0.0, 1.0, 2.0};
    cfg.length_grid = {0.0, 20.0, 40.0};
    cfg.xi_grid = {0.0, 0.004};
    const SweepResult a = sweep(cfg, 1), b = sweep(cfg, 4);
    ASSERT_EQ(a.cells.size(), 4u * 3 * 3 * 2);
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        EXPECT_TRUE(same_bits(a.cells[i].report.skr, b.cells[i].report.skr));
        EXPECT_EQ(a.cells[i].T_star.has_value(), b.cells[i].T_star.has_value());
    }
    const SweepCell& c = a.cells[a.index(2, 1, 2, 1)];
    EXPECT_EQ(c.kind, StateKind::PAS2);
    EXPECT_EQ(c.r_db, 1.0);
    EXPECT_EQ(c.length_km, 40.0);
    EXPECT_EQ(c.xi_total, 0.004);
    for (const SweepCell& z : a.cells) {
        if (z.r_db == 0.0) {
            EXPECT_FALSE(z.feasible);
        }
    }
}

TEST(Sweep, ConfigValidation) {
    SweepConfig cfg;
    cfg.kinds.clear();
    EXPECT_THROW(sweep(cfg), DomainError);
    cfg = {};
    cfg.length_grid = {10.0, 5.0};
    EXPECT_THROW(sweep(cfg), DomainError);
    cfg = {};
    cfg.xi_grid.clear();
    EXPECT_THROW(sweep(cfg), DomainError);
    cfg = {};
    cfg.gamma = 1.5;
    EXPECT_THROW(sweep(cfg), DomainError);
}

TEST(Sweep, BadCellIsRecordedNotThrown) {
    SweepConfig cfg;
    cfg.kinds = {StateKind::TMSV};
    cfg.length_grid = {-5.0};
    const SweepResult res = sweep(cfg);
    EXPECT_FALSE(res.cells[0].error.empty());
    EXPECT_FALSE(res.cells[0].feasible);
}

TEST(LognegScan, TmsvBaselineAndShape) {
    const auto grid = linspace(0.05, 0.95, 10);
    const auto s = logneg_scan({StateKind::TMSV, StateKind::PAS1}, 1.0, grid);
    ASSERT_EQ(s.size(), 20u);
    const double lambda = from_db(1.0).lambda;
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_NEAR(s[i].log_negativity, std::log2((1 + lambda) / (1 - lambda)), 1e-10);
        EXPECT_EQ(s[i].success_prob, 1.0);
        EXPECT_EQ(s[10 + i].T, grid[i]);
        EXPECT_LT(s[10 + i].success_prob, 1.0);
    }
}

TEST(LognegScan, ContinuousInT) {
    const auto grid = linspace(0.01, 0.99, 400);
    for (StateKind k : kHeraldedKinds) {
        const auto s = logneg_scan({k}, 2.0, grid);
        for (std::size_t i = 1; i < s.size(); ++i)
            EXPECT_LT(std::abs(s[i].log_negativity - s[i - 1].log_negativity), 0.05) << to_string(k) << " T=" << s[i].T;
    }
}

TEST(LognegScan, Errors) {
    EXPECT_THROW(logneg_scan({StateKind::PAS1}, 1.0, {}), DomainError);
    EXPECT_THROW(logneg_scan({StateKind::PAS1}, 1.0, {0.5, 1.0}), DomainError);
    EXPECT_THROW(logneg_scan({StateKind::PAS1}, -1.0, {0.5}), DomainError);
}

TEST(Helpers, Linspace) {
    EXPECT_EQ(linspace(0.0, 3.0, 61).size(), 61u);
    EXPECT_EQ(linspace(0.0, 3.0, 61).back(), 3.0);
    EXPECT_NEAR(linspace(0.0, 3.0, 61)[28], 1.4, 1e-15);
    EXPECT_EQ(linspace(0.2, 0.9, 1), std::vector<double>{0.2});
}

TEST(Helpers, Crossover) {
    const std::vector<double> g{0, 1, 2, 3};
    EXPECT_EQ(crossover(g, {0, 1, 3, 4}, {0, 2, 2, 2}), 2.0);
    EXPECT_FALSE(crossover(g, {0, 1, 1, 1}, {0, 2, 2, 2}).has_value());
    EXPECT_FALSE(crossover(g, {1, 1, 1, 1}, {0, 0, 0, 0}).has_value());
}

#pragma once

// The oracle-equivalence and closed-form battery behind `cvmdi verify`.
// Gates carry a tolerance and decide the exit status; audit rows record
// how the printed probability formulas compare with the series and never
// fail the run.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvmdi/analytic_states.hpp"
#include "cvmdi/dense_oracles.hpp"
#include "cvmdi/experiments.hpp"
#include "cvmdi/gaussian_core.hpp"
#include "cvmdi/security.hpp"

namespace cvmdi {

struct GateRow {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct AuditRow {
    std::string name;
    double error = 0.0;
    std::string status;  ///< MATCH, MISMATCH, MISMATCH (expected)
    std::string note;
};

struct LimitRow {
    std::string name;
    double T = 0.0;
    double series = 0.0;
    double expected = 0.0;
    double printed = 0.0;
};

struct ValidationReport {
    std::vector<GateRow> gates;
    std::vector<AuditRow> audits;
    std::vector<LimitRow> vacuum_limits;

    bool passed() const {
        return std::all_of(gates.begin(), gates.end(), [](const GateRow& g) { return g.pass; });
    }
};

using SeriesTerm = std::function<double(StateKind, double lambda, double T, std::size_t n)>;

struct ValidationOptions {
    std::vector<double> lambda_grid{0.05, 0.114623, 0.2, 0.33228};
    std::vector<double> T_grid{0.3, 0.6, 0.9};
    /// Closed-form coefficient model under test; replaceable for mutation checks.
    SeriesTerm series = [](StateKind k, double l, double T, std::size_t n) { return series_term(k, l, T, n); };
};

namespace detail {
inline SqueezeParam squeeze_from_lambda(double lambda) {
    const double r = std::atanh(lambda);
    return {r, 20.0 * r / std::log(10.0), lambda};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::string audit_status(double err, double tol, bool expected_mismatch) {
    if (err <= tol) return expected_mismatch ? "MATCH (unexpected)" : "MATCH";
    return expected_mismatch ? "MISMATCH (expected)" : "MISMATCH";
}
}  // namespace detail

inline ValidationReport run_validation(const ValidationOptions& opt = {}) {
    ValidationReport rep;
    auto gate = [&](std::string name, double err, double tol) {
        rep.gates.push_back({std::move(name), err, tol, err <= tol});
    };

    auto analytic = [&](StateKind k, const SqueezeParam& sq, double T, std::size_t cutoff) {
        SchmidtState s = detail::build_series(
            [&](std::size_t n) { return opt.series(k, sq.lambda, T, n); }, cutoff, false, "validation");
        if (k == StateKind::TMSV) s.success_prob = 1.0;
        return s;
    };

    // oracle equivalence and log-negativity, per kind
    for (StateKind k : kAllKinds) {
        const std::string tag(to_string(k));
        double coeff_err = 0.0, prob_err = 0.0, en_err = 0.0, cov_err = 0.0;
        try {
            for (double lambda : opt.lambda_grid)
                for (double T : opt.T_grid) {
                    const SqueezeParam sq = detail::squeeze_from_lambda(lambda);
                    const SchmidtState ref = coeffs(k, sq, T);
                    const SchmidtState a = analytic(k, sq, T, ref.cutoff());
                    const SchmidtState o = oracle_state(k, sq, T, ref.cutoff());
                    for (std::size_t n = 0; n < a.coeffs.size(); ++n)
                        coeff_err = std::max(coeff_err, std::abs(a.coeffs[n] - o.coeffs[n]));
                    prob_err = std::max(prob_err, detail::rel_err(a.success_prob, o.success_prob));

                    const SchmidtState small = dense::trimmed(a);
                    en_err = std::max(en_err, std::abs(log_negativity(small) -
                                                       dense::log_negativity_by_partial_transpose(small)));
                    const ModeCovariance m = covariance_from_state(a);
                    const dense::QuadratureMoments q = dense::quadrature_moments(a);
                    cov_err = std::max({cov_err, std::abs(m.a - q.var_q_a), std::abs(m.c - q.cov_qq)});
                }
        } catch (const std::exception& e) {
            gate(tag + " evaluation failed: " + e.what(), INFINITY, 0.0);
            continue;
        }
        if (is_heralded(k)) {
            gate(tag + " coefficients vs Fock oracle (max abs)", coeff_err, 1e-10);
            gate(tag + " success probability vs Fock oracle (max rel)", prob_err, 1e-10);
        }
        gate(tag + " E_N closed form vs dense partial transpose", en_err, 1e-8);
        gate(tag + " covariance vs dense quadratures", cov_err, 1e-10);
    }

    try {
        double err = 0.0;
        for (double lambda : opt.lambda_grid) {
            const SchmidtState s = analytic(StateKind::TMSV, detail::squeeze_from_lambda(lambda), 0.5,
                                            coeffs(StateKind::TMSV, detail::squeeze_from_lambda(lambda), 0.5).cutoff());
            err = std::max(err, std::abs(log_negativity(s) - std::log2((1 + lambda) / (1 - lambda))));
        }
        gate("TMSV E_N vs log2((1+l)/(1-l))", err, 1e-10);
    } catch (const std::exception& e) {
        gate(std::string("TMSV E_N evaluation failed: ") + e.what(), INFINITY, 0.0);
    }

    {
        double err = 0.0;
        for (double t : {0.2, 0.6, 0.9})
            for (unsigned total = 0; total <= 12; ++total)
                for (unsigned r = 0; r <= total; ++r)
                    for (unsigned c = 0; c <= total; ++c) {
                        double dot = 0.0;
                        for (unsigned jo = 0; jo <= total; ++jo)
                            dot += bs_amplitude(t, r, total - r, jo, total - jo) *
                                   bs_amplitude(t, c, total - c, jo, total - jo);
                        err = std::max(err, std::abs(dot - (r == c ? 1.0 : 0.0)));
                    }
        gate("beam-splitter photon-number blocks unitary", err, 1e-12);
    }

    {
        double det_err = 0.0, chi = 0.0, skr_err = 0.0;
        for (double db : {1.0, 2.0, 3.0}) {
            const SecurityReport r = skr_point(StateKind::TMSV, db, 0.5, 0.0, 0.0, 0.95);
            const ModeCovariance t = tmsv_covariance(from_db(db).variance());
            const SwappedCov s = swap(apply_channel(PreparedCov{t.a, t.c, t.a, t.c}, 1.0, 0.0, 0.0));
            det_err = std::max(det_err, std::abs(s.det_block() - 1.0));
            chi = std::max(chi, r.chi_be);
            skr_err = std::max(skr_err, std::abs(r.skr - 0.95 * r.i_ab));
        }
        gate("zero-loss TMSV swap purity |x1 x2 - xp^2 - 1|", det_err, 1e-9);
        gate("zero-loss TMSV chi_BE", chi, 1e-9);
        gate("zero-loss TMSV |SKR - gamma I_AB|", skr_err, 1e-9);
    }

    // vacuum limits of the success probabilities
    try {
        double err = 0.0;
        const SqueezeParam vac = from_db(0.0);
        for (double T : opt.T_grid) {
            const double p1 = analytic(StateKind::PAS1, vac, T, kInitialCutoff).success_prob;
            const double p2 = analytic(StateKind::PAS2, vac, T, kInitialCutoff).success_prob;
            const double pr = analytic(StateKind::PR2, vac, T, kInitialCutoff).success_prob;
            rep.vacuum_limits.push_back({"P1", T, p1, std::pow(1 - T * T, 2), printed_probability(StateKind::PAS1, vac, T)});
            rep.vacuum_limits.push_back({"P2", T, p2, std::pow(1 - T * T, 4), printed_probability(StateKind::PAS2, vac, T)});
            rep.vacuum_limits.push_back({"P2PR", T, pr, std::pow(T, 4), printed_probability_pr2(vac, T)});
            err = std::max({err, std::abs(p1 - std::pow(1 - T * T, 2)), std::abs(p2 - std::pow(1 - T * T, 4)),
                            std::abs(pr - std::pow(T, 4))});
        }
        gate("vacuum limits P1=(1-T^2)^2, P2=(1-T^2)^4, P2PR=T^4", err, 1e-14);
    } catch (const std::exception& e) {
        gate(std::string("vacuum limits evaluation failed: ") + e.what(), INFINITY, 0.0);
    }

    // printed-formula audit
    {
        double e1 = 0.0, e2_joint = 0.0, e2_second = 0.0, epr = 0.0;
        for (double lambda : opt.lambda_grid)
            for (double T : opt.T_grid) {
                const SqueezeParam sq = detail::squeeze_from_lambda(lambda);
                const double p1 = coeffs(StateKind::PAS1, sq, T).success_prob;
                const double p2 = coeffs(StateKind::PAS2, sq, T).success_prob;
                const double pr = coeffs(StateKind::PR2, sq, T).success_prob;
                e1 = std::max(e1, detail::rel_err(printed_probability(StateKind::PAS1, sq, T), p1));
                e2_joint = std::max(e2_joint, detail::rel_err(printed_probability(StateKind::PAS2, sq, T), p2));
                e2_second = std::max(e2_second, detail::rel_err(printed_probability(StateKind::PAS2, sq, T), p2 / p1));
                epr = std::max(epr, detail::rel_err(printed_probability_pr2(sq, T), pr));
            }
        rep.audits.push_back({"printed P1 vs series norm (max rel)", e1, detail::audit_status(e1, 1e-10, false), ""});
        rep.audits.push_back({"printed P2 vs joint two-round probability (max rel)", e2_joint,
                              detail::audit_status(e2_joint, 1e-10, false),
                              "the printed form agrees with neither convention away from lambda = 0; "
                              "SKR uses the joint series norm"});
        rep.audits.push_back({"printed P2 vs second-round-only probability (max rel)", e2_second,
                              detail::audit_status(e2_second, 1e-10, false),
                              "second-round convention: P_joint / P1"});
        rep.audits.push_back({"printed P2PR vs series norm (max rel)", epr, detail::audit_status(epr, 1e-10, true),
                              "vacuum limit: series gives T^4, printed form gives 2 T^4"});
    }

    // beam-splitter reading: arccos(sqrt T) taken literally
    {
        double err = 0.0;
        for (double lambda : opt.lambda_grid)
            for (double T : opt.T_grid) {
                const SqueezeParam sq = detail::squeeze_from_lambda(lambda);
                const SchmidtState ref = coeffs(StateKind::PAS1, sq, T);
                const SchmidtState lit = oracle_state(StateKind::PAS1, sq, T, ref.cutoff(),
                                                      BeamSplitterConvention::intensity);
                err = std::max(err, detail::rel_err(lit.success_prob, ref.success_prob));
            }
        rep.audits.push_back({"1PAS series vs oracle with cos(theta)=sqrt(T)", err,
                              detail::audit_status(err, 1e-10, true),
                              "the series correspond to cos(theta)=T; the oracle uses that convention"});
    }
    return rep;
}

inline nlohmann::json to_json(const ValidationReport& rep) {
    nlohmann::json j;
    j["passed"] = rep.passed();
    for (const GateRow& g : rep.gates)
        j["gates"].push_back({{"name", g.name}, {"error", g.error}, {"tolerance", g.tolerance}, {"pass", g.pass}});
    for (const AuditRow& a : rep.audits)
        j["audits"].push_back({{"name", a.name}, {"error", a.error}, {"status", a.status}, {"note", a.note}});
    for (const LimitRow& l : rep.vacuum_limits)
        j["vacuum_limits"].push_back({{"quantity", l.name},
                                      {"T", l.T},
                                      {"series", l.series},
                                      {"expected", l.expected},
                                      {"printed", l.printed}});
    return j;
}

}  // namespace cvmdi

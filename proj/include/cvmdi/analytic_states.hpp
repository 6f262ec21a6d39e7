#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>

#include "cvmdi/errors.hpp"
#include "cvmdi/fock_oracle.hpp"

namespace cvmdi {

enum class StateKind { TMSV, PAS1, PAS2, PR2 };

inline constexpr std::array<StateKind, 4> kAllKinds{StateKind::TMSV, StateKind::PAS1,
                                                    StateKind::PAS2, StateKind::PR2};
inline constexpr std::array<StateKind, 3> kHeraldedKinds{StateKind::PAS1, StateKind::PAS2,
                                                         StateKind::PR2};

inline constexpr std::string_view to_string(StateKind k) {
    switch (k) {
        case StateKind::TMSV: return "TMSV";
        case StateKind::PAS1: return "1PAS";
        case StateKind::PAS2: return "2PAS";
        case StateKind::PR2: return "2PR";
    }
    return "?";
}

inline std::optional<StateKind> parse_kind(std::string_view s) {
    for (StateKind k : kAllKinds)
        if (s == to_string(k)) return k;
    if (s == "PAS1") return StateKind::PAS1;
    if (s == "PAS2") return StateKind::PAS2;
    if (s == "PR2") return StateKind::PR2;
    return std::nullopt;
}

inline constexpr bool is_heralded(StateKind k) { return k != StateKind::TMSV; }

/// Squeezing in its three equivalent forms: r, r_dB = 10 log10(e^{2r}), lambda = tanh r.
struct SqueezeParam {
    double r = 0.0;
    double r_db = 0.0;
    double lambda = 0.0;

    /// Prepared quadrature variance of the TMSV, cosh 2r.
    double variance() const { return std::cosh(2.0 * r); }
};

inline SqueezeParam from_db(double r_db) {
    if (!(r_db >= 0.0)) throw DomainError("from_db: squeezing in dB must be nonnegative");
    const double r = r_db * std::log(10.0) / 20.0;
    return {r, r_db, std::tanh(r)};
}

/// Unnormalized closed-form coefficient of |nn> for each kind.
inline double series_term(StateKind kind, double lambda, double T, std::size_t n) {
    const double nd = static_cast<double>(n);
    const double base = std::sqrt(1.0 - lambda * lambda) * std::pow(lambda, nd);
    const double loss = 1.0 - T * T;
    switch (kind) {
        case StateKind::TMSV: return base;
        case StateKind::PAS1: return base * std::pow(T, 2.0 * nd) * loss * (nd + 1.0);
        case StateKind::PAS2:
            return base * std::pow(T, 4.0 * nd) * loss * loss * (nd + 1.0) * (nd + 1.0);
        case StateKind::PR2: {
            const double f = T * T - nd * loss;
            return base * std::pow(T, 2.0 * nd - 2.0) * f * f;
        }
    }
    return 0.0;
}

/// Normalized state for `kind`, with success_prob the squared norm of the
/// unnormalized series (joint probability of every heralding round).
inline SchmidtState coeffs(StateKind kind, const SqueezeParam& sq, double T,
                           std::optional<std::size_t> cutoff = std::nullopt) {
    if (!(sq.lambda >= 0.0 && sq.lambda < 1.0)) throw DomainError("coeffs: lambda must lie in [0, 1)");
    if (is_heralded(kind) && !(T > 0.0 && T < 1.0))
        throw DomainError("coeffs: T must lie in (0, 1) for heralded states");
    const double lambda = sq.lambda;
    auto state = detail::build_series(
        [&](std::size_t n) { return series_term(kind, lambda, T, n); }, cutoff, true, "coeffs");
    if (kind == StateKind::TMSV) state.success_prob = 1.0;
    return state;
}

/// Heralding spec and number of rounds that realize `kind` from a TMSV.
struct HeraldRecipe {
    HeraldSpec spec;
    int rounds = 0;
};

inline HeraldRecipe herald_recipe(StateKind kind, double T) {
    switch (kind) {
        case StateKind::TMSV: return {HeraldSpec{0, 0, 0, 0, T}, 0};
        case StateKind::PAS1: return {HeraldSpec::pas(T), 1};
        case StateKind::PAS2: return {HeraldSpec::pas(T), 2};
        case StateKind::PR2: return {HeraldSpec::pr2(T), 1};
    }
    return {};
}

/// Builds `kind` by brute force: TMSV followed by the heralding rounds.
inline SchmidtState oracle_state(StateKind kind, const SqueezeParam& sq, double T,
                                 std::optional<std::size_t> cutoff = std::nullopt,
                                 BeamSplitterConvention conv = BeamSplitterConvention::amplitude) {
    SchmidtState s = tmsv_state(sq.lambda, cutoff);
    const HeraldRecipe recipe = herald_recipe(kind, T);
    for (int i = 0; i < recipe.rounds; ++i) s = apply_herald(s, recipe.spec, conv);
    return s;
}

/// Closed-form success probabilities as printed for 1PAS and 2PAS, with
/// zeta_1 = lambda^2 T^4 and zeta_2 = lambda^2 T^8. Cross-checks only.
inline double printed_probability(StateKind kind, const SqueezeParam& sq, double T) {
    const double l2 = sq.lambda * sq.lambda;
    const double loss = 1.0 - T * T;
    switch (kind) {
        case StateKind::PAS1: {
            const double z = l2 * std::pow(T, 4);
            return (1.0 - l2) * loss * loss * (z + 1.0) / std::pow(1.0 - z, 3);
        }
        case StateKind::PAS2: {
            const double z = l2 * std::pow(T, 8);
            const double num = -16 * std::pow(z, 4) - std::pow(z, 3) - 11 * z * z + 5 * z - 1;
            const double den = std::pow(z, 5) - 5 * std::pow(z, 4) + 10 * std::pow(z, 3) -
                               10 * z * z + 5 * z - 1;
            return (1.0 - l2) * std::pow(loss, 4) * num / den;
        }
        default: throw DomainError("printed_probability: defined for 1PAS and 2PAS only");
    }
}

/// The printed two-photon-replacement probability, transcribed term by term
/// (including its "(...)^8" factor, the repeated T^4 and the bare lambda T^12).
/// Known to be inconsistent with the series; kept for the audit report.
inline double printed_probability_pr2(const SqueezeParam& sq, double T) {
    const double l = sq.lambda, l2 = l * l;
    const double T2 = T * T, T4 = T2 * T2, T6 = T4 * T2, T8 = T4 * T4, T12 = T8 * T4;
    const double bracket =
        std::pow(l, 6) * T8 * (T8 - 8 * T6 + 24 * T4 - 32 * T2 + 11) +
        T4 * std::pow(l, 4) * (11 * T8 - 56 * T6 + 96 * T4 - 56 * T2 + 11) + T4 +
        l2 * std::pow(11 * T8 - 32 * T6 + 24 * T4 - 8 * T2 + 1, 8) + T4 + l * T12;
    return (1.0 - l2) / std::pow(1.0 - l2 * T4, 5) * bracket;
}

/// Joint 2PAS probability in closed form: (1-l^2)(1-T^2)^4 sum (n+1)^4 zeta_2^n.
inline double joint_probability_pas2(const SqueezeParam& sq, double T) {
    const double l2 = sq.lambda * sq.lambda;
    const double z = l2 * std::pow(T, 8);
    return (1.0 - l2) * std::pow(1.0 - T * T, 4) * (1 + 11 * z + 11 * z * z + z * z * z) /
           std::pow(1.0 - z, 5);
}

}  // namespace cvmdi

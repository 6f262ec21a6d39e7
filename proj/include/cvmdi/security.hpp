#pragma once

#include <cmath>
#include <algorithm>

#include "cvmdi/errors.hpp"
#include "cvmdi/fock_oracle.hpp"
#include "cvmdi/gaussian_core.hpp"

namespace cvmdi {

/// Slack below a physical bound that is clamped instead of rejected.
inline constexpr double kClampSlack = 1e-9;

struct SecurityReport {
    double i_ab = 0.0;
    double v1 = 1.0;
    double v2 = 1.0;
    double v_bar = 1.0;
    double chi_be = 0.0;
    double skr = 0.0;
    double success_prob = 1.0;
};

/// Homodyne mutual information in bits per pulse.
inline double mutual_information(const SwappedCov& cov) {
    if (!(cov.x1 > 0.0)) throw DomainError("mutual_information: x1 must be positive");
    const double q = cov.xp * cov.xp / (cov.x1 * cov.x2);
    if (!(cov.x2 > 0.0 && q < 1.0)) throw DomainError("mutual_information: conditional variance must be positive");
    return -0.5 * std::log1p(-q) / std::log(2.0);
}

/// Von Neumann entropy of a thermal mode with symplectic eigenvalue x.
inline double holevo_g(double x) {
    if (!(x >= 1.0 - kClampSlack)) throw DomainError("holevo_g: argument below 1");
    if (x <= 1.0) return 0.0;
    const double p = 0.5 * (x + 1.0);
    const double m = 0.5 * (x - 1.0);
    return p * std::log2(p) - m * std::log2(m);
}

struct HolevoTerms {
    double v1 = 1.0;
    double v2 = 1.0;
    double v_bar = 1.0;
    double chi_be = 0.0;
};

namespace detail {
inline double clamped_sqrt(double x, const char* what) {
    if (x < 0.0) {
        if (x < -kClampSlack) throw NumericalError(what);
        return 0.0;
    }
    return std::sqrt(x);
}
}  // namespace detail

/// Symplectic spectrum of the swapped state, the conditional eigenvalue after
/// Bob's homodyne measurement, and chi_BE = G(v1) + G(v2) - G(v_bar).
inline HolevoTerms holevo_bound(const SwappedCov& cov) {
    const double x1 = cov.x1, x2 = cov.x2, xp2 = cov.xp * cov.xp;
    if (!(x1 > 0.0 && x2 > 0.0)) throw DomainError("holevo_bound: x1 and x2 must be positive");
    const double delta = x1 * x1 + x2 * x2 - 2.0 * xp2;
    const double d = x1 * x2 - xp2;  // sqrt of the determinant
    // delta^2 - 4 d^2 factored, so near-vacuum inputs don't cancel
    const double disc = (x1 - x2) * (x1 - x2) * ((x1 + x2) * (x1 + x2) - 4.0 * xp2);
    const double scale = std::max(1.0, delta * delta);
    const double root =
        std::sqrt(scale) * detail::clamped_sqrt(disc / scale, "holevo_bound: negative discriminant");
    HolevoTerms h;
    h.v1 = detail::clamped_sqrt(0.5 * delta + 0.5 * root, "holevo_bound: v1 radicand");
    h.v2 = h.v1 > 0.0 ? std::abs(d) / h.v1 : 0.0;  // v1 v2 = |d|
    h.v_bar = detail::clamped_sqrt(x1 * d / x2, "holevo_bound: v_bar radicand");
    for (double v : {h.v1, h.v2, h.v_bar})
        if (v < 1.0 - kClampSlack) throw NumericalError("holevo_bound: symplectic eigenvalue below 1");
    h.chi_be = holevo_g(h.v1) + holevo_g(h.v2) - holevo_g(h.v_bar);
    return h;
}

/// SKR = P (gamma I_AB - chi_BE); negative values are returned unchanged.
inline double secret_key_rate(double success_prob, double gamma, double i_ab, double chi_be) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("secret_key_rate: gamma must lie in (0, 1]");
    if (!(success_prob > 0.0 && success_prob <= 1.0))
        throw DomainError("secret_key_rate: success probability must lie in (0, 1]");
    return success_prob * (gamma * i_ab - chi_be);
}

inline SecurityReport evaluate_security(const SwappedCov& cov, double success_prob, double gamma) {
    SecurityReport r;
    r.i_ab = mutual_information(cov);
    const HolevoTerms h = holevo_bound(cov);
    r.v1 = h.v1;
    r.v2 = h.v2;
    r.v_bar = h.v_bar;
    r.chi_be = h.chi_be;
    r.success_prob = success_prob;
    r.skr = secret_key_rate(success_prob, gamma, r.i_ab, r.chi_be);
    return r;
}

/// E_N = 2 log2 sum |c_n| for a pure Schmidt-form state.
inline double log_negativity(const SchmidtState& state) {
    if (first_power_tail(state.coeffs) > kTailTolerance)
        throw TruncationError("log_negativity: sum |c_n| not converged at this cutoff",
                              2 * state.cutoff());
    double s = 0.0;
    for (double c : state.coeffs) s += std::abs(c);
    return 2.0 * std::log2(s);
}

}  // namespace cvmdi

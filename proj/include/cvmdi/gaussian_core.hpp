#pragma once

// Standard-form covariance data in shot-noise units (vacuum variance 1):
// extraction from a Schmidt-form state, the thermal-loss channel on Alice's
// link and the optimal Gaussian entanglement swap at the relay.

#include <cmath>

#include "cvmdi/errors.hpp"
#include "cvmdi/fock_oracle.hpp"

namespace cvmdi {

/// Variance `a` and cross covariance `c` of a two-mode Schmidt-form state.
struct ModeCovariance {
    double a = 1.0;
    double c = 0.0;
};

/// a = sum (2n+1) c_n^2,  c = 2 sum (n+1) c_n c_{n+1}.
inline ModeCovariance covariance_from_state(const SchmidtState& state) {
    if (!truncation_adequate(state.coeffs))
        throw TruncationError("covariance_from_state: moments not converged at this cutoff",
                              2 * state.cutoff());
    const auto& c = state.coeffs;
    double a = 0.0, x = 0.0;
    for (std::size_t n = 0; n < c.size(); ++n) {
        a += (2.0 * n + 1.0) * c[n] * c[n];
        if (n + 1 < c.size()) x += (n + 1.0) * c[n] * c[n + 1];
    }
    return {a, 2.0 * x};
}

/// Covariance of the TMSV with quadrature variance V: (V, sqrt(V^2 - 1)).
inline ModeCovariance tmsv_covariance(double variance) {
    if (!(variance >= 1.0)) throw DomainError("tmsv_covariance: variance must be >= 1");
    return {variance, std::sqrt(variance * variance - 1.0)};
}

/// Alice's (a1, c) and Bob's (b1, d) prepared states.
struct PreparedCov {
    double a1 = 1.0;
    double c = 0.0;
    double b1 = 1.0;
    double d = 0.0;
};

/// Alice-Charlie link; Bob's link is lossless (tau_B = 1) in this setting.
struct ChannelParams {
    double length_km = 0.0;
    double alpha_db_per_km = 0.2;
    double xi_total = 0.0;

    double tau_a() const { return std::pow(10.0, -alpha_db_per_km * length_km / 10.0); }
    double xi_a() const { return 0.5 * xi_total; }
    double xi_b() const { return 0.5 * xi_total; }
    static constexpr double tau_b = 1.0;

    void validate() const {
        if (!(length_km >= 0.0)) throw DomainError("ChannelParams: distance must be >= 0");
        if (!(alpha_db_per_km >= 0.0)) throw DomainError("ChannelParams: attenuation must be >= 0");
        if (!(xi_total >= 0.0)) throw DomainError("ChannelParams: excess noise must be >= 0");
    }
};

/// Covariances after the channel: Alice's kept mode a1, the travelling modes
/// a2 (Alice) and b2 (Bob), Bob's kept mode b1.
struct LossyCov {
    double a1 = 1.0;
    double c = 0.0;  ///< unscaled Alice correlation; the channel contributes sqrt(tau_a)
    double a2 = 1.0;
    double b2 = 1.0;
    double d = 0.0;
    double b1 = 1.0;
    double tau_a = 1.0;

    double alice_cross() const { return std::sqrt(tau_a) * c; }
};

inline LossyCov apply_channel(const PreparedCov& prep, double tau_a, double xi_a, double xi_b) {
    if (!(tau_a > 0.0 && tau_a <= 1.0)) throw DomainError("apply_channel: tau_A must lie in (0, 1]");
    LossyCov out;
    out.a1 = prep.a1;
    out.c = prep.c;
    out.a2 = tau_a * (prep.a1 - 1.0) + 1.0 + xi_a;
    out.b2 = prep.b1 + xi_b;
    out.d = prep.d;
    out.b1 = prep.b1;
    out.tau_a = tau_a;
    return out;
}

inline LossyCov apply_channel(const PreparedCov& prep, const ChannelParams& ch) {
    ch.validate();
    return apply_channel(prep, ch.tau_a(), ch.xi_a(), ch.xi_b());
}

/// Alice-Bob covariance after the swap: variances x1, x2 and correlation xp.
struct SwappedCov {
    double x1 = 1.0;
    double x2 = 1.0;
    double xp = 0.0;

    double det_block() const { return x1 * x2 - xp * xp; }
};

inline SwappedCov swap(const LossyCov& l) {
    const double s = l.a2 + l.b2;
    if (!(s > 0.0)) throw DomainError("swap: a2 + b2 must be positive");
    return {l.a1 - l.tau_a * l.c * l.c / s, l.b1 - l.d * l.d / s, l.c * l.d * std::sqrt(l.tau_a) / s};
}

}  // namespace cvmdi

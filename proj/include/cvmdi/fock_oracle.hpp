#pragma once

// Truncated Fock-space engine for two-mode states of Schmidt form
//     |psi> = sum_n c_n |n>_a |n>_b
// and for the heralded beam-splitter operations applied to mode b.
//
// Everything here is computed by brute force from beam-splitter matrix
// elements; the closed-form series in analytic_states.hpp are checked
// against it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvmdi/errors.hpp"

namespace cvmdi {

inline constexpr std::size_t kMinCutoff = 8;
inline constexpr std::size_t kInitialCutoff = 30;
inline constexpr std::size_t kMaxCutoff = 200;
inline constexpr double kTailTolerance = 1e-12;
inline constexpr double kNormTolerance = 1e-12;

/// Pure two-mode state sum_n c_n |nn>, with the probability of the heralding
/// sequence that produced it (1 for un-heralded states).
struct SchmidtState {
    std::vector<double> coeffs;
    double success_prob = 1.0;
    bool normalized = false;

    std::size_t cutoff() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }

    double norm_squared() const {
        double s = 0.0;
        for (double c : coeffs) s += c * c;
        return s;
    }
};

/// Fraction of sum_n (2n+1) c_n^2 carried by the last two Fock levels.
inline double second_moment_tail(std::span<const double> c) {
    if (c.size() < 2) return c.empty() ? 0.0 : 1.0;
    double total = 0.0;
    for (std::size_t n = 0; n < c.size(); ++n) total += (2.0 * n + 1.0) * c[n] * c[n];
    if (total == 0.0) return 0.0;
    const std::size_t last = c.size() - 1;
    const double tail = (2.0 * last + 1.0) * c[last] * c[last] +
                        (2.0 * last - 1.0) * c[last - 1] * c[last - 1];
    return tail / total;
}

/// Fraction of sum_n |c_n| carried by the last two Fock levels.
inline double first_power_tail(std::span<const double> c) {
    if (c.size() < 2) return c.empty() ? 0.0 : 1.0;
    double total = 0.0;
    for (double v : c) total += std::abs(v);
    if (total == 0.0) return 0.0;
    return (std::abs(c[c.size() - 1]) + std::abs(c[c.size() - 2])) / total;
}

/// Moments of the state are converged at this cutoff.
inline bool truncation_adequate(std::span<const double> c) {
    return second_moment_tail(c) <= kTailTolerance;
}

namespace detail {

/// Builds a normalized state from an unnormalized coefficient generator
/// `term(n)`. With an explicit cutoff the truncation must already be adequate;
/// otherwise the cutoff starts at kInitialCutoff and doubles up to kMaxCutoff.
/// `strict_tail` additionally requires the first-power tail to converge.
template <class Term>
SchmidtState build_series(Term&& term, std::optional<std::size_t> cutoff, bool strict_tail,
                          const char* who) {
    auto make = [&](std::size_t n_max) {
        std::vector<double> c(n_max + 1);
        for (std::size_t n = 0; n <= n_max; ++n) c[n] = term(n);
        return c;
    };
    auto adequate = [&](const std::vector<double>& c) {
        return truncation_adequate(c) && (!strict_tail || first_power_tail(c) <= kTailTolerance);
    };
    auto finish = [&](std::vector<double> c) {
        double p = 0.0;
        for (double v : c) p += v * v;
        if (!(p > 1e-300)) throw ZeroProbabilityError(std::string(who) + ": vanishing norm");
        const double inv = 1.0 / std::sqrt(p);
        for (double& v : c) v *= inv;
        return SchmidtState{std::move(c), p, true};
    };

    if (cutoff) {
        if (*cutoff < kMinCutoff)
            throw DomainError(std::string(who) + ": cutoff must be at least 8");
        auto c = make(*cutoff);
        if (adequate(c)) return finish(std::move(c));
        std::size_t required = 0;
        for (std::size_t n = *cutoff * 2; n <= 4 * kMaxCutoff; n *= 2) {
            if (adequate(make(n))) {
                required = n;
                break;
            }
        }
        throw TruncationError(std::string(who) + ": cutoff " + std::to_string(*cutoff) +
                                  " too small (need " + std::to_string(required) + ")",
                              required);
    }
    for (std::size_t n = kInitialCutoff;; n = std::min(2 * n, kMaxCutoff)) {
        auto c = make(n);
        if (adequate(c)) return finish(std::move(c));
        if (n == kMaxCutoff) break;
    }
    throw TruncationError(std::string(who) + ": no adequate cutoff up to 200", 0);
}

}  // namespace detail

/// Two-mode squeezed vacuum, c_n = sqrt(1 - lambda^2) lambda^n.
inline SchmidtState tmsv_state(double lambda, std::optional<std::size_t> cutoff = std::nullopt) {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("tmsv_state: lambda must lie in [0, 1)");
    const double pre = std::sqrt(1.0 - lambda * lambda);
    auto state = detail::build_series(
        [&](std::size_t n) { return pre * std::pow(lambda, static_cast<double>(n)); }, cutoff,
        true, "tmsv_state");
    state.success_prob = 1.0;
    return state;
}

/// How the transmissivity T enters the beam-splitter mixing angle theta.
///   amplitude: cos(theta) = T       (reproduces the closed-form state series)
///   intensity: cos(theta) = sqrt(T) (the exponent arccos(sqrt T) read literally)
enum class BeamSplitterConvention { amplitude, intensity };

inline double mixing_cosine(double T, BeamSplitterConvention conv) {
    return conv == BeamSplitterConvention::amplitude ? T : std::sqrt(T);
}

/// Photon counts injected (m) and detected (n) at the two ancilla ports, and
/// the shared transmissivity of both beam splitters.
struct HeraldSpec {
    unsigned m1 = 0, n1 = 0, m2 = 0, n2 = 0;
    double T = 0.5;

    static HeraldSpec pas(double T) { return {1, 0, 0, 1, T}; }
    static HeraldSpec pr2(double T) { return {1, 1, 1, 1, T}; }

    void validate() const {
        if (!(T > 0.0 && T < 1.0)) throw DomainError("HeraldSpec: T must lie in (0, 1)");
        if (m1 > 1 || n1 > 1 || m2 > 1 || n2 > 1)
            throw DomainError("HeraldSpec: photon counts must be 0 or 1");
    }
};

/// <j_out, n_anc| U(theta) |j_in, m_anc> for U = exp[theta (b^dag c - b c^dag)],
/// with cos(theta) = t. Zero unless photon number is conserved.
inline double bs_amplitude(double t, unsigned j_in, unsigned m_anc, unsigned j_out, unsigned n_anc) {
    if (j_out + n_anc != j_in + m_anc) return 0.0;
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    // U b^dag U^dag = t b^dag - s c^dag,  U c^dag U^dag = s b^dag + t c^dag.
    // Pick k signal photons from the first factor and l from the second.
    double sum = 0.0;
    double binom_j = 1.0;  // C(j_in, k)
    for (unsigned k = 0; k <= j_in; ++k) {
        if (k > 0) binom_j = binom_j * (j_in - k + 1) / k;
        if (k > j_out || j_out - k > m_anc) continue;
        const unsigned l = j_out - k;
        double binom_m = 1.0;
        for (unsigned i = 1; i <= l; ++i) binom_m = binom_m * (m_anc - l + i) / i;
        const unsigned ps = j_in - k;  // reflected signal photons, each carries -s
        double term = binom_j * binom_m * std::pow(t, static_cast<double>(k + m_anc - l)) *
                      std::pow(s, static_cast<double>(ps + l));
        if (ps % 2 == 1) term = -term;
        sum += term;
    }
    // sqrt(j_out! n_anc! / (j_in! m_anc!)) as a product over the non-cancelling range
    auto log_fact_ratio = [](unsigned a, unsigned b) {  // log(a!/b!)
        double r = 0.0;
        for (unsigned i = std::min(a, b) + 1; i <= std::max(a, b); ++i) r += std::log(double(i));
        return a >= b ? r : -r;
    };
    return sum * std::exp(0.5 * (log_fact_ratio(j_out, j_in) + log_fact_ratio(n_anc, m_anc)));
}

/// Dense square matrix, row-major.
struct DenseMatrix {
    std::size_t dim = 0;
    std::vector<double> data;

    explicit DenseMatrix(std::size_t n = 0) : dim(n), data(n * n, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data[r * dim + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
};

/// Heralded single-mode Kraus operator K(j_out, j_in) = <j_out, n| U |j_in, m>.
/// `dim` is the number of Fock levels kept on the signal mode.
inline DenseMatrix bs_kraus(double T, unsigned m, unsigned n, std::size_t dim,
                            BeamSplitterConvention conv = BeamSplitterConvention::amplitude) {
    if (!(T > 0.0 && T < 1.0)) throw DomainError("bs_kraus: T must lie in (0, 1)");
    const double t = mixing_cosine(T, conv);
    DenseMatrix k(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const long jo = static_cast<long>(j) + m - n;
        if (jo < 0 || jo >= static_cast<long>(dim)) continue;
        k(static_cast<std::size_t>(jo), j) = bs_amplitude(t, unsigned(j), m, unsigned(jo), n);
    }
    return k;
}

/// Applies the two heralded stages of `spec` to mode b of a Schmidt-form state.
/// The result is renormalized; success_prob multiplies onto the input's.
inline SchmidtState apply_herald(const SchmidtState& state, const HeraldSpec& spec,
                                 BeamSplitterConvention conv = BeamSplitterConvention::amplitude) {
    spec.validate();
    if (!state.normalized || std::abs(state.norm_squared() - 1.0) > 1e-10)
        throw DomainError("apply_herald: input state must be normalized");

    const std::size_t rows = state.coeffs.size();
    const std::size_t dim = rows + spec.m1 + spec.m2;
    const DenseMatrix k1 = bs_kraus(spec.T, spec.m1, spec.n1, dim, conv);
    const DenseMatrix k2 = bs_kraus(spec.T, spec.m2, spec.n2, dim, conv);

    // psi(a, b): start diagonal, then act on the b index with K1 then K2.
    std::vector<double> psi(rows * dim, 0.0);
    for (std::size_t i = 0; i < rows; ++i) psi[i * dim + i] = state.coeffs[i];
    auto act = [&](const DenseMatrix& k) {
        std::vector<double> out(rows * dim, 0.0);
        for (std::size_t a = 0; a < rows; ++a)
            for (std::size_t b = 0; b < dim; ++b) {
                const double v = psi[a * dim + b];
                if (v == 0.0) continue;
                for (std::size_t bo = 0; bo < dim; ++bo) out[a * dim + bo] += k(bo, b) * v;
            }
        psi.swap(out);
    };
    act(k1);
    act(k2);

    std::vector<double> c(rows);
    double diag = 0.0, total = 0.0;
    for (std::size_t a = 0; a < rows; ++a) {
        for (std::size_t b = 0; b < dim; ++b) total += psi[a * dim + b] * psi[a * dim + b];
        c[a] = psi[a * dim + a];
        diag += c[a] * c[a];
    }
    if (!(total > 1e-300)) throw ZeroProbabilityError("apply_herald: heralding probability vanishes");
    if ((total - diag) / total > 1e-12)
        throw ShapeError("apply_herald: output is not of Schmidt form");

    // global sign: first nonzero coefficient positive
    for (double v : c) {
        if (v == 0.0) continue;
        if (v < 0.0)
            for (double& x : c) x = -x;
        break;
    }
    const double inv = 1.0 / std::sqrt(diag);
    for (double& v : c) v *= inv;
    return SchmidtState{std::move(c), diag * state.success_prob, true};
}

}  // namespace cvmdi

#pragma once

// Brute-force cross-checks on explicitly constructed two-mode operators.
// These share no code path with the closed forms they check and are used by
// the test suites and by the `verify` command.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstddef>

#include "cvmdi/fock_oracle.hpp"

namespace cvmdi::dense {

/// <j_out, n_anc| exp[theta (b^dag c - b c^dag)] |j_in, m_anc>, cos(theta) = t,
/// by exponentiating the generator on a two-mode space truncated `guard`
/// levels above the largest occupation involved.
inline double bs_amplitude_by_expm(double t, unsigned j_in, unsigned m_anc, unsigned j_out,
                                   unsigned n_anc, unsigned guard = 6) {
    const unsigned top = std::max({j_in + m_anc, j_out + n_anc}) + guard;
    const Eigen::Index d = top + 1;
    auto idx = [d](Eigen::Index b, Eigen::Index c) { return b * d + c; };
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(d * d, d * d);
    for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index c = 0; c < d; ++c) {
            // b^dag c |b, c> = sqrt((b+1) c) |b+1, c-1>
            if (c > 0 && b + 1 < d) {
                const double v = std::sqrt(double(b + 1) * double(c));
                gen(idx(b + 1, c - 1), idx(b, c)) += v;
                gen(idx(b, c), idx(b + 1, c - 1)) -= v;  // - b c^dag is the transpose
            }
        }
    const double theta = std::acos(t);
    const Eigen::MatrixXd u = (theta * gen).exp();
    return u(idx(j_out, n_anc), idx(j_in, m_anc));
}

/// Two-mode state vector as a matrix psi(a, b) = c_a delta_ab, padded by `pad` levels.
inline Eigen::MatrixXd schmidt_matrix(const SchmidtState& s, Eigen::Index pad = 0) {
    const Eigen::Index n = static_cast<Eigen::Index>(s.coeffs.size()) + pad;
    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) psi(Eigen::Index(i), Eigen::Index(i)) = s.coeffs[i];
    return psi;
}

inline Eigen::MatrixXd annihilation(Eigen::Index dim) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

struct QuadratureMoments {
    double var_q_a = 0.0;   ///< <q_a^2>
    double var_p_a = 0.0;   ///< <p_a^2>
    double var_q_b = 0.0;   ///< <q_b^2>
    double cov_qq = 0.0;    ///< <q_a q_b>
    double cov_pp = 0.0;    ///< <p_a p_b>
    double mean_q_a = 0.0;  ///< <q_a>
};

/// Quadrature moments with q = a + a^dag, p = i(a^dag - a) (vacuum variance 1),
/// computed from dense single-mode operators acting on psi(a, b).
inline QuadratureMoments quadrature_moments(const SchmidtState& s) {
    const Eigen::MatrixXd psi = schmidt_matrix(s, 2);
    const Eigen::Index d = psi.rows();
    const Eigen::MatrixXd a = annihilation(d);
    const Eigen::MatrixXd q = a + a.transpose();
    const Eigen::MatrixXd pm = a.transpose() - a;  // p = i * pm
    auto expect = [&](const Eigen::MatrixXd& opa, const Eigen::MatrixXd& opb) {
        // <psi| A (x) B |psi> = tr(psi^T A psi B^T)
        return (psi.transpose() * opa * psi * opb.transpose()).trace();
    };
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    QuadratureMoments m;
    m.var_q_a = expect(q * q, id);
    m.var_p_a = -expect(pm * pm, id);
    m.var_q_b = expect(id, q * q);
    m.cov_qq = expect(q, q);
    m.cov_pp = -expect(pm, pm);
    m.mean_q_a = expect(q, id);
    return m;
}

/// log2 of the trace norm of the partial transpose of |psi><psi|, from the
/// full spectrum of the dense partially transposed density matrix.
inline double log_negativity_by_partial_transpose(const SchmidtState& s) {
    const Eigen::Index d = static_cast<Eigen::Index>(s.coeffs.size());
    const Eigen::Index dim = d * d;
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < d; ++i) psi(i * d + i) = s.coeffs[std::size_t(i)];
    const Eigen::MatrixXd rho = psi * psi.transpose();
    Eigen::MatrixXd pt(dim, dim);
    // <i j| rho^T_B |k l> = <i l| rho |k j>
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < d; ++k)
                for (Eigen::Index l = 0; l < d; ++l) pt(i * d + j, k * d + l) = rho(i * d + l, k * d + j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pt, Eigen::EigenvaluesOnly);
    return std::log2(es.eigenvalues().cwiseAbs().sum());
}

/// Drops trailing coefficients below `eps` so dense checks stay small.
inline SchmidtState trimmed(const SchmidtState& s, double eps = 1e-17) {
    SchmidtState t = s;
    while (t.coeffs.size() > 2 && std::abs(t.coeffs.back()) < eps) t.coeffs.pop_back();
    return t;
}

}  // namespace cvmdi::dense

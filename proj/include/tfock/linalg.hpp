#pragma once

// Small dense linear-algebra helpers shared across the library: spectral
// norms, generalized eigenproblems against a Gram matrix, and principal
// angles between subspaces (complex-linear and real-linear).

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace tfock {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline MatrixXcd hermitize(const MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

inline double spectral_norm(const MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::BDCSVD<MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

inline double min_eig_hermitian(const MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// Largest generalized eigenvalue of A x = mu B x with A Hermitian and B
// Hermitian positive definite.
inline double gevp_max(const MatrixXcd& a, const MatrixXcd& b) {
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> es(hermitize(a), hermitize(b),
                                                           Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    return es.eigenvalues().maxCoeff();
}

// Operator norm of a block X mapping (C^k, gram_src) -> (C^r, gram_dst),
// i.e. the largest singular value measured in the two Gram geometries.
inline double gram_op_norm(const MatrixXcd& x, const MatrixXcd& gram_src, const MatrixXcd& gram_dst) {
    if (x.size() == 0) return 0.0;
    const MatrixXcd g = x.adjoint() * gram_dst * x;
    const double mu = gevp_max(g, gram_src);
    return std::sqrt(std::max(0.0, mu));
}

// Columns of b P-orthonormalized (assumes full column rank).
inline MatrixXcd gram_orthonormalize(const MatrixXcd& b, const MatrixXcd& p) {
    const MatrixXcd g = hermitize(b.adjoint() * p * b);
    Eigen::LLT<MatrixXcd> llt(g);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("gram_orthonormalize: basis is numerically rank deficient");
    // g = L L^*  =>  q = b (L^*)^{-1} satisfies q^* p q = 1.
    return llt.matrixU().solve<Eigen::OnTheRight>(b);
}

// Sine of the largest principal angle between the column spans of b1 and b2
// with respect to the Hermitian positive definite Gram p.  Returns 1 when the
// dimensions differ.
inline double subspace_angle(const MatrixXcd& b1, const MatrixXcd& b2, const MatrixXcd& p) {
    if (b1.cols() != b2.cols()) return 1.0;
    if (b1.cols() == 0) return 0.0;
    const MatrixXcd q1 = gram_orthonormalize(b1, p);
    const MatrixXcd q2 = gram_orthonormalize(b2, p);
    // sin(theta_max) as the norm of the part of q1 outside span(q2).  The
    // cosine route sqrt(1 - sigma_min^2) floors out near sqrt(eps) and cannot
    // certify angles below ~1e-8; the residual form resolves them fully.
    const MatrixXcd r = q1 - q2 * (q2.adjoint() * (p * q1));
    const double mu = Eigen::SelfAdjointEigenSolver<MatrixXcd>(hermitize(r.adjoint() * p * r),
                                                               Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .maxCoeff();
    return std::sqrt(std::max(0.0, mu));
}

inline double subspace_angle(const MatrixXcd& b1, const MatrixXcd& b2) {
    return subspace_angle(b1, b2, MatrixXcd::Identity(b1.rows(), b1.rows()));
}

// View a set of complex columns as real vectors in R^{2d} (real-linear span).
inline MatrixXd realify_columns(const MatrixXcd& b) {
    MatrixXd r(2 * b.rows(), b.cols());
    r.topRows(b.rows()) = b.real();
    r.bottomRows(b.rows()) = b.imag();
    return r;
}

// Largest principal angle (sine) between the REAL-linear spans of two sets of
// complex vectors, measured in the Euclidean geometry of R^{2d}.
inline double real_span_angle(const MatrixXcd& b1, const MatrixXcd& b2) {
    const MatrixXd r1 = realify_columns(b1);
    const MatrixXd r2 = realify_columns(b2);
    return subspace_angle(r1.cast<cplx>(), r2.cast<cplx>());
}

// Orthonormal basis of the null space of a real matrix (columns), via SVD.
inline MatrixXd real_kernel(const MatrixXd& m, double tol = 1e-12) {
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

// Orthonormal basis of the column span of a complex matrix, via SVD.
inline MatrixXcd complex_range(const MatrixXcd& m, double tol = 1e-12) {
    if (m.cols() == 0) return MatrixXcd(m.rows(), 0);
    Eigen::BDCSVD<MatrixXcd> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cut = tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    return svd.matrixU().leftCols(rank);
}

}  // namespace tfock

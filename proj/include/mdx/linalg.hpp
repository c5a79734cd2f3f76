#pragma once

// Dense symmetric positive-definite kernel: Cholesky, solves, inverse and
// the normalized partial-correlation matrix of a covariance.

#include <Eigen/Dense>

namespace mdx {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric n x n matrix. Entries are stored exactly symmetric: the
/// constructor rejects inputs whose asymmetry exceeds roundoff and averages
/// the two triangles.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(Matrix entries);

    static SymMatrix identity(Eigen::Index dim);
    static SymMatrix zero(Eigen::Index dim);
    static SymMatrix diagonal(const Vector& diag);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    double max_abs() const { return dim() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

private:
    Matrix m_;
};

/// K = D Sigma^{-1} D with D = diag(P_ii^{-1/2}), P = Sigma^{-1}.
/// Unit diagonal, entries clamped into [-1, 1].
class PartialCorrMatrix {
public:
    explicit PartialCorrMatrix(Matrix k) : k_(std::move(k)) {}

    Eigen::Index dim() const noexcept { return k_.rows(); }
    const Matrix& matrix() const noexcept { return k_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return k_(i, j); }

private:
    Matrix k_;
};

/// Lower-triangular L with L L^T = a. Throws NotPositiveDefinite when a pivot
/// falls to dim * eps * max|a| or below.
Matrix cholesky(const SymMatrix& a);

/// Solve L L^T x = b given a factor from cholesky().
Vector cholesky_solve(const Matrix& lower, const Vector& b);

Vector solve_spd(const SymMatrix& a, const Vector& b);

SymMatrix inverse_spd(const SymMatrix& a);

PartialCorrMatrix partial_corr(const SymMatrix& sigma);

}  // namespace mdx

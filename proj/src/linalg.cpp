#include "mdx/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mdx/errors.hpp"

namespace mdx {

SymMatrix::SymMatrix(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) {
        throw InvalidArgument("SymMatrix: matrix is " + std::to_string(m_.rows()) + "x" +
                              std::to_string(m_.cols()) + ", expected square");
    }
    if (m_.rows() < 1) throw InvalidArgument("SymMatrix: dimension must be at least 1");
    if (!m_.allFinite()) throw InvalidArgument("SymMatrix: non-finite entry");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * scale) {
        throw InvalidArgument("SymMatrix: input is not symmetric (max asymmetry " +
                              std::to_string(asym) + ")");
    }
    m_ = 0.5 * (m_ + m_.transpose()).eval();
}

SymMatrix SymMatrix::identity(Eigen::Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

SymMatrix SymMatrix::zero(Eigen::Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

SymMatrix SymMatrix::diagonal(const Vector& diag) { return SymMatrix(Matrix(diag.asDiagonal())); }

Matrix cholesky(const SymMatrix& a) {
    const Eigen::Index n = a.dim();
    const Matrix& m = a.matrix();
    const double threshold =
        static_cast<double>(n) * std::numeric_limits<double>::epsilon() * a.max_abs();
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = m(j, j) - l.row(j).head(j).squaredNorm();
        if (!(pivot > threshold)) {
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(pivot) + " at index " +
                                      std::to_string(j) + " is not above " +
                                      std::to_string(threshold));
        }
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / d;
        }
    }
    return l;
}

Vector cholesky_solve(const Matrix& lower, const Vector& b) {
    Vector y = lower.triangularView<Eigen::Lower>().solve(b);
    return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Vector solve_spd(const SymMatrix& a, const Vector& b) {
    if (b.size() != a.dim()) {
        throw InvalidArgument("solve_spd: right-hand side has length " + std::to_string(b.size()) +
                              ", expected " + std::to_string(a.dim()));
    }
    return cholesky_solve(cholesky(a), b);
}

SymMatrix inverse_spd(const SymMatrix& a) {
    const Matrix l = cholesky(a);
    Matrix linv = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(a.dim(), a.dim()));
    Matrix inv = linv.transpose() * linv;
    return SymMatrix(0.5 * (inv + inv.transpose()));
}

PartialCorrMatrix partial_corr(const SymMatrix& sigma) {
    const Matrix p = inverse_spd(sigma).matrix();
    const Eigen::Index n = p.rows();
    Vector scale = p.diagonal().cwiseSqrt().cwiseInverse();
    Matrix k = scale.asDiagonal() * p * scale.asDiagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::clamp(0.5 * (k(i, j) + k(j, i)), -1.0, 1.0);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return PartialCorrMatrix(std::move(k));
}

}  // namespace mdx

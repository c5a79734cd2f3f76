#pragma once

// Quadratic programs over a translated quadrant:
//
//     minimize  <v + d, H (v + d)>   subject to  v >= b  (componentwise)
//
// together with the dual weight problem sup_{w >= 0} <w,q>^2 / <w,A w>.

#include <cstdint>
#include <vector>

#include "mdx/linalg.hpp"

namespace mdx {

struct QuadrantProblem {
    SymMatrix H;
    Vector offset;  ///< d
    Vector bound;   ///< b

    QuadrantProblem(SymMatrix h, Vector d, Vector b);

    Eigen::Index dim() const noexcept { return H.dim(); }
};

struct QpSolution {
    Vector v_star;
    double value = 0.0;
    std::vector<int> active;  ///< sorted indices with v_star[i] == bound[i]
    Vector w_star;            ///< H (v_star + d)
    double kkt_residual = 0.0;
    /// PSD path only: false when the regularized minimizers did not settle.
    bool attained = true;
    int iterations = 0;
};

struct QpOptions {
    int max_iterations = 0;  ///< 0 selects 20 * dim + 50
};

/// Primal active-set method for positive-definite H. Starts at v = b with all
/// bounds in the working set, and releases or blocks one bound per iteration.
QpSolution solve_quadrant(const QuadrantProblem& p, const QpOptions& opts = {});

/// Positive semidefinite H. Solves H + eps * s * I for eps in {1e-6, 1e-7,
/// 1e-8} (s = max(1, max diag H)), reports the value of the unregularized form
/// at the last regularized minimizer and checks that the values settle.
QpSolution solve_quadrant_psd(const QuadrantProblem& p);

/// Exhaustive search over all 2^dim active sets; correctness oracle.
QpSolution brute_force_active_sets(const QuadrantProblem& p);

/// <w,q>^2 / <w,A w> for w >= 0, w != 0.
double dual_ratio(const SymMatrix& a, const Vector& q, const Vector& w);

struct SaddleReport {
    double primal = 0.0;
    double ratio_at_w_star = 0.0;
    double sampled_max = 0.0;
    int trials = 0;
    Vector v_star;
    Vector w_star;
    std::vector<int> active;
    bool strong_duality = false;  ///< |ratio(w*) - primal| <= 1e-9 * primal
    bool weak_duality = false;    ///< every sampled ratio <= primal + 1e-9
    bool holds() const noexcept { return strong_duality && weak_duality; }
};

/// Checks inf_{v >= q} <v, A^{-1} v> == sup_{w >= 0} <w,q>^2/<w,A w> at
/// w* = A^{-1} v* and against `trials` random nonnegative weights.
SaddleReport verify_saddle(const SymMatrix& a, const Vector& q, int trials, std::uint64_t seed);

}  // namespace mdx

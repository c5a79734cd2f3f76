#pragma once

// Grid-level checks of the non-degeneracy assumption on partial correlations
// and of the drift threshold.

#include <vector>

#include "mdx/models.hpp"

namespace mdx {

struct A1Report {
    /// sup over the grid of k_ij(t); only i < j entries are meaningful,
    /// the diagonal holds 1.
    Matrix sup_k;
    /// argmax_points[i][j] (i < j) is the grid point attaining sup_k(i, j).
    std::vector<std::vector<Point>> argmax_points;
    double max_off_diagonal = 0.0;
    /// Smallest pairwise angle arccos(k_ij) between B^{-1} e_i and B^{-1} e_j,
    /// in degrees (180 when n = 1).
    double min_angle_deg = 180.0;
    double delta = 1e-3;
    std::size_t grid_size = 0;
    bool pass = false;
};

/// Suprema of the off-diagonal partial correlations over the grid.
/// pass <=> max_{i != j} sup_k(i, j) < 1 - delta.
A1Report check_a1(const CovModel& model, const DomainGrid& grid, double delta = 1e-3);

/// True iff u exceeds threshold_u0(drift, q, grid).
bool check_threshold(const DriftModel& drift, const Vector& q, double u, const DomainGrid& grid);

/// Outcome of the tail heuristic for the boundedness assumption. Never a proof.
enum class TailVerdict { Decreasing, NotDecreasing, Inconclusive };

struct A2Heuristic {
    static constexpr double kEpsilons[3] = {0.1, 0.5, 1.0};
    /// verdict[i][e] for coordinate i and epsilon kEpsilons[e].
    std::vector<std::vector<TailVerdict>> verdict;
    std::size_t tail_points = 0;
};

/// Checks that Var X_i(t) / (eps d_i(t))^2 decreases along the last quarter
/// of the grid (in grid order). Inconclusive when d_i(t) <= 0 on the tail.
A2Heuristic a2_tail_heuristic(const CovModel& model, const DriftModel& drift,
                              const DomainGrid& grid);

const char* to_string(TailVerdict v) noexcept;

}  // namespace mdx

#pragma once

// Monte Carlo estimation of P(exists t in grid : X(t) - d(t) > u q) by exact
// joint sampling over the grid. Two estimators:
//
//   crude       indicator average with a binomial-normal 95% interval
//   mean-shift  importance sampling; the joint mean is shifted along the
//               conditional-mean path through the most likely point
//
// Samples are drawn in fixed-size blocks. Block b uses its own generator
// seeded with block_seed(seed, b), and block sums are reduced in block order,
// so the estimate is independent of the worker count.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mdx/decay.hpp"
#include "mdx/models.hpp"

namespace mdx {

enum class Estimator { Crude, MeanShift };

const char* to_string(Estimator e) noexcept;

struct McEstimate {
    double p_hat = 0.0;
    double half_width = 0.0;  ///< 95% confidence half-width
    std::uint64_t samples = 0;
    Estimator kind = Estimator::Crude;
    std::uint64_t seed = 0;
    /// Sample mean of the squared per-path contribution (weight^2 on hits);
    /// equals p_hat for crude estimates. Needed to merge estimates.
    double mean_sq = 0.0;
    double jitter = 0.0;  ///< diagonal jitter added to the joint covariance
    Point tilt_point;     ///< mean-shift only
    double tilt_norm = 0.0;

    double relative_half_width() const noexcept;
};

struct McOptions {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::size_t block_size = 2048;
    std::size_t joint_cap = 4000;
};

struct JointCovariance {
    SymMatrix cov;  ///< block (a, b) = cross_cov(t_a, t_b); index a * n + i
    Matrix lower;   ///< Cholesky factor of cov + jitter * I
    double jitter = 0.0;
};

/// Joint covariance of (X(t_1), ..., X(t_k)). If the plain matrix is not
/// positive definite, jitter c * trace / dim is added for c = 1e-10, 1e-9, ..., 1e-6.
JointCovariance build_joint_covariance(const CovModel& model, const DomainGrid& grid,
                                       std::size_t cap = 4000);

McEstimate estimate_crude(const CovModel& model, const DriftModel& drift, const Vector& q,
                          double u, const DomainGrid& grid, const McOptions& opts);

/// Mean-shift importance sampling tilted at tilt.argmin_t towards the
/// optimizer tilt.qp (usually the result of rate_over_domain on the same grid).
McEstimate estimate_is(const CovModel& model, const DriftModel& drift, const Vector& q, double u,
                       const DomainGrid& grid, const McOptions& opts, const RateResult& tilt);

/// Computes the tilt with rate_over_domain, then calls the overload above.
McEstimate estimate_is(const CovModel& model, const DriftModel& drift, const Vector& q, double u,
                       const DomainGrid& grid, const McOptions& opts);

/// Sample-weighted combination of estimates of the same kind.
McEstimate merge(std::span<const McEstimate> parts);

struct SweepRow {
    double u = 0.0;
    double p_hat = 0.0;
    std::optional<double> neg_log_p;
    double m_of_u_T = 0.0;
    std::optional<double> ratio;  ///< neg_log_p / m_of_u_T
    double half_width = 0.0;
    std::uint64_t seed = 0;
};

/// One row per u. Row k uses seed block_seed(opts.seed, k).
std::vector<SweepRow> sweep(const CovModel& model, const DriftModel& drift, const Vector& q,
                            const std::vector<double>& u_list, const DomainGrid& grid,
                            const McOptions& opts, Estimator estimator);

/// splitmix64 of (seed, index); sub-seeds for blocks and sweep rows.
std::uint64_t block_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace mdx

#include "mdx/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mdx/errors.hpp"
#include "mdx/parallel.hpp"

namespace mdx {

namespace {

constexpr double kZ95 = 1.959963984540054;

struct BlockSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};

// Thresholds u q_i + d_i(t_a), laid out like the joint vector.
Vector stacked_thresholds(const DriftModel& drift, const Vector& q, double u,
                          const DomainGrid& grid) {
    const auto n = q.size();
    Vector thr(n * static_cast<Eigen::Index>(grid.size()));
    for (std::size_t a = 0; a < grid.size(); ++a) {
        thr.segment(static_cast<Eigen::Index>(a) * n, n) = u * q + drift.drift_at(grid.points()[a]);
    }
    return thr;
}

void check_inputs(const CovModel& model, const DriftModel& drift, const Vector& q, double u,
                  const DomainGrid& grid, const McOptions& opts) {
    if (q.size() != model.n() || drift.n() != model.n()) {
        throw InvalidArgument("simulation: model, drift and q dimensions differ");
    }
    if (opts.samples < 1) throw InvalidArgument("simulation: samples must be at least 1");
    const double u0 = threshold_u0(drift, q, grid);
    if (!(u > u0)) throw BelowThreshold(u, u0);
}

std::size_t effective_block(std::size_t requested, Eigen::Index dim) {
    const std::size_t by_memory = std::max<std::size_t>(64, (std::size_t{1} << 20) / dim);
    return std::max<std::size_t>(1, std::min(requested, by_memory));
}

// Draws `samples` joint vectors z ~ N(0, I) in blocks and hands each block of
// correlated paths x = L z (columns) to `score`, which returns the block sums.
template <class Score>
std::vector<BlockSums> run_blocks(const JointCovariance& joint, const McOptions& opts,
                                  Score&& score) {
    const Eigen::Index dim = joint.lower.rows();
    const std::size_t block = effective_block(opts.block_size, dim);
    const std::size_t blocks = (opts.samples + block - 1) / block;
    std::vector<BlockSums> sums(blocks);
    parallel_for(blocks, opts.workers, [&](std::size_t b) {
        const std::size_t count = std::min<std::size_t>(block, opts.samples - b * block);
        std::mt19937_64 rng(block_seed(opts.seed, b));
        std::normal_distribution<double> normal;
        Matrix z(dim, static_cast<Eigen::Index>(count));
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            for (Eigen::Index i = 0; i < dim; ++i) z(i, j) = normal(rng);
        }
        const Matrix x = joint.lower.triangularView<Eigen::Lower>() * z;
        sums[b] = score(z, x);
    });
    return sums;
}

bool path_hits(const Eigen::Ref<const Vector>& x, const Vector& thr, Eigen::Index n) {
    const Eigen::Index points = x.size() / n;
    for (Eigen::Index a = 0; a < points; ++a) {
        bool all = true;
        for (Eigen::Index i = 0; i < n && all; ++i) all = x(a * n + i) > thr(a * n + i);
        if (all) return true;
    }
    return false;
}

double crude_half_width(double p, std::uint64_t samples) {
    const double hw = kZ95 * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return std::min({hw, p, 1.0 - p});
}

double weighted_half_width(double mean, double mean_sq, std::uint64_t samples) {
    if (samples < 2) return 0.0;
    const double n = static_cast<double>(samples);
    const double var = std::max(0.0, mean_sq - mean * mean) * n / (n - 1.0);
    return kZ95 * std::sqrt(var / n);
}

}  // namespace

const char* to_string(Estimator e) noexcept {
    return e == Estimator::Crude ? "crude" : "mean-shift";
}

double McEstimate::relative_half_width() const noexcept {
    return p_hat > 0.0 ? half_width / p_hat : std::numeric_limits<double>::infinity();
}

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

JointCovariance build_joint_covariance(const CovModel& model, const DomainGrid& grid,
                                       std::size_t cap) {
    const Eigen::Index n = model.n();
    const auto k = static_cast<Eigen::Index>(grid.size());
    const Eigen::Index dim = n * k;
    if (static_cast<std::size_t>(dim) > cap) {
        throw DimensionCap("joint covariance dimension " + std::to_string(dim) + " exceeds cap " +
                           std::to_string(cap));
    }
    const auto& pts = grid.points();
    for (const Point& t : pts) (void)model.sigma_at(t);

    Matrix cov(dim, dim);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = a; b < k; ++b) {
            const Matrix block = model.cross_cov(pts[a], pts[b]);
            cov.block(a * n, b * n, n, n) = block;
            cov.block(b * n, a * n, n, n) = block.transpose();
        }
    }
    JointCovariance joint{SymMatrix(std::move(cov)), Matrix(), 0.0};
    try {
        joint.lower = cholesky(joint.cov);
        return joint;
    } catch (const NotPositiveDefinite&) {
    }
    const double base = joint.cov.matrix().trace() / static_cast<double>(dim);
    for (double c = 1e-10; c <= 1.000001e-6; c *= 10.0) {
        const double jitter = c * base;
        try {
            joint.lower = cholesky(
                SymMatrix(joint.cov.matrix() + jitter * Matrix::Identity(dim, dim)));
            joint.jitter = jitter;
            return joint;
        } catch (const NotPositiveDefinite&) {
        }
    }
    throw NotPositiveDefinite("joint covariance is not positive definite after maximal jitter");
}

McEstimate estimate_crude(const CovModel& model, const DriftModel& drift, const Vector& q,
                          double u, const DomainGrid& grid, const McOptions& opts) {
    check_inputs(model, drift, q, u, grid, opts);
    const JointCovariance joint = build_joint_covariance(model, grid, opts.joint_cap);
    const Vector thr = stacked_thresholds(drift, q, u, grid);
    const Eigen::Index n = model.n();

    const auto sums = run_blocks(joint, opts, [&](const Matrix&, const Matrix& x) {
        BlockSums s;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (path_hits(x.col(j), thr, n)) s.sum += 1.0;
        }
        s.sum_sq = s.sum;
        return s;
    });
    double hits = 0.0;
    for (const BlockSums& s : sums) hits += s.sum;

    McEstimate e;
    e.kind = Estimator::Crude;
    e.samples = opts.samples;
    e.seed = opts.seed;
    e.jitter = joint.jitter;
    e.p_hat = hits / static_cast<double>(opts.samples);
    e.mean_sq = e.p_hat;
    e.half_width = crude_half_width(e.p_hat, e.samples);
    return e;
}

McEstimate estimate_is(const CovModel& model, const DriftModel& drift, const Vector& q, double u,
                       const DomainGrid& grid, const McOptions& opts, const RateResult& tilt) {
    check_inputs(model, drift, q, u, grid, opts);
    const JointCovariance joint = build_joint_covariance(model, grid, opts.joint_cap);
    const Vector thr = stacked_thresholds(drift, q, u, grid);
    const Eigen::Index n = model.n();
    const auto& pts = grid.points();

    // h(t_a) = Cov(X(t_a), X(t*)) Sigma_{t*}^{-1} x*, and Sigma_{t*}^{-1} x* = w*.
    Vector shift(joint.lower.rows());
    for (std::size_t a = 0; a < pts.size(); ++a) {
        shift.segment(static_cast<Eigen::Index>(a) * n, n) =
            model.cross_cov(pts[a], tilt.argmin_t) * tilt.qp.w_star;
    }
    // With x = h + L z the likelihood ratio is exp(-eta.z - |eta|^2 / 2), eta = L^{-1} h.
    const Vector eta = joint.lower.triangularView<Eigen::Lower>().solve(shift);
    const double half_eta_sq = 0.5 * eta.squaredNorm();

    const auto sums = run_blocks(joint, opts, [&](const Matrix& z, const Matrix& x) {
        BlockSums s;
        const Eigen::RowVectorXd proj = eta.transpose() * z;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (path_hits(x.col(j) + shift, thr, n)) {
                const double w = std::exp(-proj(j) - half_eta_sq);
                s.sum += w;
                s.sum_sq += w * w;
            }
        }
        return s;
    });
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const BlockSums& s : sums) {
        sum += s.sum;
        sum_sq += s.sum_sq;
    }

    McEstimate e;
    e.kind = Estimator::MeanShift;
    e.samples = opts.samples;
    e.seed = opts.seed;
    e.jitter = joint.jitter;
    e.tilt_point = tilt.argmin_t;
    e.tilt_norm = shift.norm();
    const double count = static_cast<double>(opts.samples);
    e.p_hat = sum / count;
    e.mean_sq = sum_sq / count;
    e.half_width = weighted_half_width(e.p_hat, e.mean_sq, e.samples);
    return e;
}

McEstimate estimate_is(const CovModel& model, const DriftModel& drift, const Vector& q, double u,
                       const DomainGrid& grid, const McOptions& opts) {
    RateOptions ro;
    ro.workers = opts.workers;
    return estimate_is(model, drift, q, u, grid, opts, rate_over_domain(model, drift, q, u, grid, ro));
}

McEstimate merge(std::span<const McEstimate> parts) {
    if (parts.empty()) throw InvalidArgument("merge: no estimates");
    McEstimate out;
    out.kind = parts.front().kind;
    out.seed = parts.front().seed;
    out.tilt_point = parts.front().tilt_point;
    out.tilt_norm = parts.front().tilt_norm;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const McEstimate& e : parts) {
        if (e.kind != out.kind) throw InvalidArgument("merge: estimator kinds differ");
        const double n = static_cast<double>(e.samples);
        out.samples += e.samples;
        sum += n * e.p_hat;
        sum_sq += n * e.mean_sq;
        out.jitter = std::max(out.jitter, e.jitter);
    }
    const double total = static_cast<double>(out.samples);
    out.p_hat = sum / total;
    out.mean_sq = sum_sq / total;
    out.half_width = out.kind == Estimator::Crude
                         ? crude_half_width(out.p_hat, out.samples)
                         : weighted_half_width(out.p_hat, out.mean_sq, out.samples);
    return out;
}

std::vector<SweepRow> sweep(const CovModel& model, const DriftModel& drift, const Vector& q,
                            const std::vector<double>& u_list, const DomainGrid& grid,
                            const McOptions& opts, Estimator estimator) {
    std::vector<SweepRow> rows;
    rows.reserve(u_list.size());
    RateOptions ro;
    ro.workers = opts.workers;
    for (std::size_t k = 0; k < u_list.size(); ++k) {
        const double u = u_list[k];
        const RateResult rate = rate_over_domain(model, drift, q, u, grid, ro);
        McOptions row_opts = opts;
        row_opts.seed = block_seed(opts.seed, k);
        const McEstimate e = estimator == Estimator::Crude
                                 ? estimate_crude(model, drift, q, u, grid, row_opts)
                                 : estimate_is(model, drift, q, u, grid, row_opts, rate);
        SweepRow row;
        row.u = u;
        row.p_hat = e.p_hat;
        row.half_width = e.half_width;
        row.m_of_u_T = rate.m_of_u_T;
        row.seed = row_opts.seed;
        if (e.p_hat > 0.0) {
            row.neg_log_p = -std::log(e.p_hat);
            row.ratio = *row.neg_log_p / rate.m_of_u_T;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace mdx

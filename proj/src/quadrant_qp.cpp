#include "mdx/quadrant_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mdx/errors.hpp"

namespace mdx {

namespace {

struct Partition {
    std::vector<int> fixed;
    std::vector<int> free;
};

Partition partition(const std::vector<bool>& in_working_set) {
    Partition part;
    for (int i = 0; i < static_cast<int>(in_working_set.size()); ++i) {
        (in_working_set[i] ? part.fixed : part.free).push_back(i);
    }
    return part;
}

// Stationary point of <v+d, H(v+d)> with v_i = b_i on the fixed set.
Vector equality_solution(const QuadrantProblem& p, const Partition& part) {
    Vector v = p.bound;
    if (part.free.empty()) return v;
    const Matrix& h = p.H.matrix();
    const auto nf = static_cast<Eigen::Index>(part.free.size());
    Matrix hff(nf, nf);
    Vector rhs = Vector::Zero(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
        const int i = part.free[a];
        for (Eigen::Index c = 0; c < nf; ++c) hff(a, c) = h(i, part.free[c]);
        for (int j : part.fixed) rhs(a) -= h(i, j) * (p.bound(j) + p.offset(j));
    }
    const Vector y = solve_spd(SymMatrix(hff), rhs);
    for (Eigen::Index a = 0; a < nf; ++a) {
        const int i = part.free[a];
        v(i) = y(a) - p.offset(i);
    }
    return v;
}

double bound_slack(double b) { return 1e-13 * (1.0 + std::abs(b)); }

QpSolution finish(const QuadrantProblem& p, Vector v, const std::vector<bool>& in_working_set,
                  int iterations) {
    QpSolution s;
    const Vector y = v + p.offset;
    s.w_star = p.H.matrix() * y;
    s.value = std::max(0.0, y.dot(s.w_star));
    double residual = 0.0;
    for (Eigen::Index i = 0; i < p.dim(); ++i) {
        if (in_working_set[i]) {
            s.active.push_back(static_cast<int>(i));
            residual = std::max(residual, -s.w_star(i));
        } else {
            residual = std::max(residual, std::abs(s.w_star(i)));
        }
        residual = std::max(residual, p.bound(i) - v(i));
    }
    s.kkt_residual = residual;
    s.v_star = std::move(v);
    s.iterations = iterations;
    return s;
}

}  // namespace

QuadrantProblem::QuadrantProblem(SymMatrix h, Vector d, Vector b)
    : H(std::move(h)), offset(std::move(d)), bound(std::move(b)) {
    if (offset.size() != H.dim() || bound.size() != H.dim()) {
        throw InvalidArgument("QuadrantProblem: offset/bound length must equal dim " +
                              std::to_string(H.dim()));
    }
    if (!offset.allFinite() || !bound.allFinite()) {
        throw InvalidArgument("QuadrantProblem: offset and bound must be finite");
    }
}

QpSolution solve_quadrant(const QuadrantProblem& p, const QpOptions& opts) {
    const Eigen::Index n = p.dim();
    const int cap = opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(20 * n + 50);
    const Matrix& h = p.H.matrix();
    (void)cholesky(p.H);

    std::vector<bool> working(n, true);
    Vector v = p.bound;

    for (int iter = 1; iter <= cap; ++iter) {
        const Partition part = partition(working);
        const Vector target = equality_solution(p, part);

        // Longest feasible step towards the subproblem solution.
        double step = 1.0;
        int blocking = -1;
        for (int i : part.free) {
            if (target(i) < p.bound(i) - bound_slack(p.bound(i))) {
                const double gap = v(i) - p.bound(i);
                const double ratio = gap / (v(i) - target(i));
                if (ratio < step) {
                    step = std::max(0.0, ratio);
                    blocking = i;
                }
            }
        }
        if (blocking >= 0) {
            v += step * (target - v);
            v(blocking) = p.bound(blocking);
            working[blocking] = true;
            continue;
        }
        v = target;

        // Multipliers of the working bounds are the gradient components.
        const Vector y = v + p.offset;
        const Vector grad = h * y;
        const double tol = 1e-13 * std::max(1.0, p.H.max_abs() * y.cwiseAbs().maxCoeff());
        int release = -1;
        double most_negative = -tol;
        for (int i : part.fixed) {
            if (grad(i) < most_negative) {
                most_negative = grad(i);
                release = i;
            }
        }
        if (release < 0) return finish(p, std::move(v), working, iter);
        working[release] = false;
    }
    throw NoConvergence("solve_quadrant: no convergence within " + std::to_string(cap) +
                        " iterations");
}

QpSolution solve_quadrant_psd(const QuadrantProblem& p) {
    const double scale = std::max(1.0, p.H.matrix().diagonal().maxCoeff());
    const Matrix id = Matrix::Identity(p.dim(), p.dim());
    constexpr double kJitter[] = {1e-6, 1e-7, 1e-8};

    QpSolution previous;
    double previous_value = 0.0;
    for (std::size_t k = 0; k < std::size(kJitter); ++k) {
        QuadrantProblem regularized(SymMatrix(p.H.matrix() + kJitter[k] * scale * id), p.offset,
                                    p.bound);
        QpSolution s = solve_quadrant(regularized);
        std::vector<bool> working(p.dim(), false);
        for (int i : s.active) working[i] = true;
        QpSolution current = finish(p, s.v_star, working, s.iterations);

        if (k + 1 == std::size(kJitter)) {
            if (std::abs(current.value - previous_value) >= 1e-6 * (1.0 + current.value)) {
                throw NoConvergence("solve_quadrant_psd: values " + std::to_string(previous_value) +
                                    " and " + std::to_string(current.value) +
                                    " differ across the jitter sequence");
            }
            const double drift = (current.v_star - previous.v_star).norm();
            current.attained = drift <= 1e-2 * (1.0 + current.v_star.norm());
            return current;
        }
        previous_value = current.value;
        previous = std::move(current);
    }
    return previous;  // unreachable
}

QpSolution brute_force_active_sets(const QuadrantProblem& p) {
    const Eigen::Index n = p.dim();
    if (n > 20) {
        throw DimensionTooLarge("brute_force_active_sets: dim " + std::to_string(n) +
                                " exceeds 20");
    }
    const Matrix& h = p.H.matrix();
    double best_value = std::numeric_limits<double>::infinity();
    Vector best_v;
    std::vector<bool> best_working;

    const std::uint64_t subsets = std::uint64_t{1} << n;
    std::vector<bool> working(n);
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        for (Eigen::Index i = 0; i < n; ++i) working[i] = (mask >> i) & 1U;
        const Partition part = partition(working);
        const Vector v = equality_solution(p, part);
        bool feasible = true;
        for (int i : part.free) {
            if (v(i) < p.bound(i) - 1e-12 * (1.0 + std::abs(p.bound(i)))) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        const Vector y = v + p.offset;
        const double value = y.dot(h * y);
        if (value < best_value) {
            best_value = value;
            best_v = v;
            best_working = working;
        }
    }
    // v = b with every bound fixed is always feasible, so best_v is set.
    return finish(p, std::move(best_v), best_working, static_cast<int>(subsets));
}

double dual_ratio(const SymMatrix& a, const Vector& q, const Vector& w) {
    if (q.size() != a.dim() || w.size() != a.dim()) {
        throw InvalidArgument("dual_ratio: q and w must have length " + std::to_string(a.dim()));
    }
    if ((w.array() < 0.0).any()) throw InvalidArgument("dual_ratio: weights must be nonnegative");
    if ((w.array() == 0.0).all()) throw ZeroWeight("dual_ratio: weight vector is zero");
    const double num = w.dot(q);
    return num * num / w.dot(a.matrix() * w);
}

SaddleReport verify_saddle(const SymMatrix& a, const Vector& q, int trials, std::uint64_t seed) {
    if (q.size() != a.dim()) throw InvalidArgument("verify_saddle: q has wrong length");
    if ((q.array() <= 0.0).any()) throw InvalidArgument("verify_saddle: q must be positive");
    if (trials < 0) throw InvalidArgument("verify_saddle: trials must be nonnegative");

    const QpSolution sol =
        solve_quadrant(QuadrantProblem(inverse_spd(a), Vector::Zero(a.dim()), q));

    SaddleReport report;
    report.primal = sol.value;
    report.v_star = sol.v_star;
    report.w_star = sol.w_star;
    report.active = sol.active;
    report.trials = trials;
    report.ratio_at_w_star = dual_ratio(a, q, sol.w_star.cwiseMax(0.0));

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution drop(0.3);
    std::exponential_distribution<double> magnitude(1.0);
    std::uniform_int_distribution<Eigen::Index> pick(0, a.dim() - 1);
    double sampled_max = 0.0;
    Vector w(a.dim());
    for (int t = 0; t < trials; ++t) {
        for (Eigen::Index i = 0; i < a.dim(); ++i) w(i) = drop(rng) ? 0.0 : magnitude(rng);
        if ((w.array() == 0.0).all()) w(pick(rng)) = 1.0;
        sampled_max = std::max(sampled_max, dual_ratio(a, q, w));
    }
    report.sampled_max = sampled_max;
    report.strong_duality =
        std::abs(report.ratio_at_w_star - report.primal) <= 1e-9 * report.primal;
    report.weak_duality = sampled_max <= report.primal + 1e-9;
    return report;
}

}  // namespace mdx

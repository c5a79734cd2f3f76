#include "mdx/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mdx/errors.hpp"

namespace mdx {

A1Report check_a1(const CovModel& model, const DomainGrid& grid, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InvalidArgument("check_a1: delta must lie in (0, 1)");
    }
    const int n = model.n();
    A1Report report;
    report.delta = delta;
    report.grid_size = grid.size();
    report.sup_k = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) report.sup_k(i, j) = -std::numeric_limits<double>::infinity();
    }
    report.argmax_points.assign(n, std::vector<Point>(n));

    for (const Point& t : grid.points()) {
        const PartialCorrMatrix k = partial_corr(model.sigma_at(t));
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (k(i, j) > report.sup_k(i, j)) {
                    report.sup_k(i, j) = k(i, j);
                    report.argmax_points[i][j] = t;
                }
            }
        }
    }

    double worst = -1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) worst = std::max(worst, report.sup_k(i, j));
    }
    if (n == 1) {
        report.max_off_diagonal = 0.0;
        report.min_angle_deg = 180.0;
        report.pass = true;
        return report;
    }
    report.max_off_diagonal = worst;
    report.min_angle_deg = std::acos(std::clamp(worst, -1.0, 1.0)) * 180.0 / std::numbers::pi;
    report.pass = worst < 1.0 - delta;
    return report;
}

bool check_threshold(const DriftModel& drift, const Vector& q, double u, const DomainGrid& grid) {
    return u > threshold_u0(drift, q, grid);
}

A2Heuristic a2_tail_heuristic(const CovModel& model, const DriftModel& drift,
                              const DomainGrid& grid) {
    const auto& pts = grid.points();
    const std::size_t tail = std::max<std::size_t>(2, pts.size() / 4);
    A2Heuristic h;
    h.tail_points = std::min(tail, pts.size());
    h.verdict.assign(model.n(), std::vector<TailVerdict>(3, TailVerdict::Inconclusive));
    if (pts.size() < 2) return h;

    const std::size_t first = pts.size() - h.tail_points;
    for (int i = 0; i < model.n(); ++i) {
        std::vector<double> var;
        std::vector<double> d;
        bool positive = true;
        for (std::size_t k = first; k < pts.size(); ++k) {
            var.push_back(model.sigma_at(pts[k])(i, i));
            d.push_back(drift.drift_at(pts[k])(i));
            positive = positive && d.back() > 0.0;
        }
        if (!positive) continue;
        for (int e = 0; e < 3; ++e) {
            const double eps = A2Heuristic::kEpsilons[e];
            bool decreasing = true;
            double prev = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < var.size(); ++k) {
                const double ratio = var[k] / std::pow(eps * d[k], 2);
                decreasing = decreasing && ratio <= prev;
                prev = ratio;
            }
            h.verdict[i][e] = decreasing ? TailVerdict::Decreasing : TailVerdict::NotDecreasing;
        }
    }
    return h;
}

const char* to_string(TailVerdict v) noexcept {
    switch (v) {
        case TailVerdict::Decreasing: return "decreasing";
        case TailVerdict::NotDecreasing: return "not-decreasing";
        case TailVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

}  // namespace mdx

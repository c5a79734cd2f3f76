#include "mdx/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mdx/assumptions.hpp"
#include "mdx/errors.hpp"
#include "mdx/parallel.hpp"

namespace mdx {

namespace {

void check_q(const Vector& q, int n) {
    if (q.size() != n) {
        throw InvalidArgument("q has length " + std::to_string(q.size()) + ", expected " +
                              std::to_string(n));
    }
    if ((q.array() <= 0.0).any() || !q.allFinite()) {
        throw InvalidArgument("q must be finite and strictly positive");
    }
}

// Coordinate-wise golden-section search around the incumbent, bracketed by
// the neighbouring grid values along each axis.
void refine_argmin(const CovModel& model, const DriftModel& drift, const Vector& q, double u,
                   const DomainGrid& grid, RateResult& result) {
    const int m = grid.dim();
    double best = 2.0 * result.m_of_u_T;
    Point t = result.argmin_t;
    for (int k = 0; k < m; ++k) {
        std::vector<double> axis;
        for (const Point& p : grid.points()) axis.push_back(p[k]);
        std::sort(axis.begin(), axis.end());
        axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
        if (axis.size() < 2) continue;
        const auto it = std::lower_bound(axis.begin(), axis.end(), t[k]);
        const double lo = it == axis.begin() ? *it : *std::prev(it);
        const double hi = std::next(it) == axis.end() ? *it : *std::next(it);
        auto f = [&](double x) {
            Point s = t;
            s[k] = x;
            try {
                return rate_at_point(model, drift, q, u, s);
            } catch (const Error&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        const auto [x, fx] = golden_section(f, lo, hi, 1e-10 * std::max(1.0, std::abs(hi)));
        if (fx < best) {
            best = fx;
            t[k] = x;
        }
    }
    if (best < 2.0 * result.m_of_u_T) {
        result.m_of_u_T = 0.5 * best;
        result.argmin_t = t;
        result.qp = point_solution(model, drift, q, u, t);
        result.notes.push_back("argmin refined off-grid by golden-section search");
    }
}

}  // namespace

QpSolution point_solution(const CovModel& model, const DriftModel& drift, const Vector& q,
                          double u, const Point& t) {
    check_q(q, model.n());
    if (drift.n() != model.n()) throw InvalidArgument("drift and model dimensions differ");
    if (!std::isfinite(u)) throw InvalidArgument("u must be finite");
    const SymMatrix h = inverse_spd(model.sigma_at(t));
    return solve_quadrant(QuadrantProblem(h, drift.drift_at(t), u * q));
}

double rate_at_point(const CovModel& model, const DriftModel& drift, const Vector& q, double u,
                     const Point& t) {
    return point_solution(model, drift, q, u, t).value;
}

RateResult rate_over_domain(const CovModel& model, const DriftModel& drift, const Vector& q,
                            double u, const DomainGrid& grid, const RateOptions& opts) {
    check_q(q, model.n());
    const double u0 = threshold_u0(drift, q, grid);
    if (!(u > u0)) throw BelowThreshold(u, u0);

    const auto& pts = grid.points();
    std::vector<double> values(pts.size());
    parallel_for(pts.size(), opts.workers,
                 [&](std::size_t k) { values[k] = rate_at_point(model, drift, q, u, pts[k]); });

    std::size_t best = 0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
        if (values[k] < values[best] || (values[k] == values[best] && pts[k] < pts[best])) {
            best = k;
        }
    }

    RateResult result;
    result.u = u;
    result.u0 = u0;
    result.m_of_u_T = 0.5 * values[best];
    result.argmin_t = pts[best];
    result.qp = point_solution(model, drift, q, u, pts[best]);
    if (opts.per_point) {
        result.per_point.reserve(pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) result.per_point.push_back({pts[k], values[k]});
    }
    if (pts.size() > 1 && (best == 0 || best + 1 == pts.size())) {
        result.notes.push_back("minimum attained at the first or last grid point; widen the grid");
    }
    if (opts.refine) refine_argmin(model, drift, q, u, grid, result);
    return result;
}

double bounded_rate_I(const CovModel& model, const Vector& q, const DomainGrid& grid) {
    return 2.0 * rate_over_domain(model, DriftModel::zero(model.n()), q, 1.0, grid).m_of_u_T;
}

double bounded_asymptotic(double u, double I) { return 0.5 * u * u * I; }

double two_dim_closed_form(double sigma1, double sigma2, double r, double q1, double q2) {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw InvalidArgument("two_dim: sigmas must be positive");
    if (!(q1 > 0.0) || !(q2 > 0.0)) throw InvalidArgument("two_dim: thresholds must be positive");
    if (!(std::abs(r) <= 1.0)) {
        throw InvalidCorrelation("two_dim: correlation " + std::to_string(r) + " outside [-1, 1]");
    }
    const double a1 = q1 / sigma1;
    const double a2 = q2 / sigma2;
    const double lead = std::pow(std::max(a1, a2), 2);
    const double c = std::min(a1 / a2, a2 / a1);
    if (!(r < c)) return lead;
    const double denom = 1.0 - r * r;
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return lead * (1.0 + (c - r) * (c - r) / denom);
}

// ---------------------------------------------------------------- regvar

void RegVarSpec::validate() const {
    const int dim = n();
    if (dim < 1) throw InvalidArgument("regvar: alpha must be non-empty");
    for (int i = 0; i < dim; ++i) {
        if (!(alpha(i) > 0.0 && alpha(i) < 2.0)) {
            throw InvalidArgument("regvar: indexes alpha must lie in (0, 2)");
        }
        if (i > 0 && alpha(i) < alpha(i - 1)) {
            throw InvalidArgument("regvar: indexes alpha must be sorted ascending");
        }
    }
    if (kappa < 1 || kappa > dim) throw InvalidArgument("regvar: kappa must lie in 1..n");
    if (c.size() != kappa) throw InvalidArgument("regvar: c must have kappa entries");
    if (c(0) != 1.0) throw InvalidArgument("regvar: c_1 must equal 1");
    if ((c.array() <= 0.0).any()) throw InvalidArgument("regvar: constants c must be positive");
    if (S.rows() != dim || S.cols() != dim) throw InvalidArgument("regvar: S must be n x n");
    if (!Eigen::FullPivLU<Matrix>(S).isInvertible()) throw InvalidArgument("regvar: S is singular");
    check_q(q, dim);
}

SymMatrix RegVarSpec::C() const {
    Vector diag = Vector::Zero(n());
    diag.head(kappa) = c;
    return SymMatrix::diagonal(diag);
}

SymMatrix RegVarSpec::form() const {
    const Matrix s_inv = Eigen::FullPivLU<Matrix>(S).inverse();
    const Matrix f = s_inv.transpose() * C().matrix() * s_inv;
    return SymMatrix(0.5 * (f + f.transpose()));
}

std::pair<double, double> golden_section(const std::function<double(double)>& f, double a,
                                         double b, double tol, int max_iter) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && std::abs(b - a) > tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // Endpoints of the final bracket are candidates too.
    std::pair<double, double> best = fc < fd ? std::pair{c, fc} : std::pair{d, fd};
    for (double x : {a, b}) {
        const double fx = f(x);
        if (fx < best.second) best = {x, fx};
    }
    return best;
}

RegVarResult regvar_J(const RegVarSpec& spec, const TSearch& search) {
    spec.validate();
    if (!(search.lo > 0.0) || !(search.hi > search.lo) || search.points < 3) {
        throw InvalidArgument("regvar: search bracket needs 0 < lo < hi and at least 3 points");
    }
    const SymMatrix h = spec.form();
    const int n = spec.n();
    const double alpha1 = spec.alpha(0);

    auto inner = [&](double t) {
        return solve_quadrant_psd(QuadrantProblem(h, Vector::Constant(n, t), spec.q));
    };
    auto objective = [&](double t) { return inner(t).value / std::pow(t, alpha1); };

    RegVarResult result;
    double lo = search.lo;
    double hi = search.hi;
    std::vector<double> ts;
    std::size_t best = 0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        ts = axis_values(lo, hi, search.points, DomainGrid::Spacing::Log);
        std::vector<double> values(ts.size());
        for (std::size_t k = 0; k < ts.size(); ++k) values[k] = objective(ts[k]);
        best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) -
                                        values.begin());
        const bool on_edge = best == 0 || best + 1 == ts.size();
        if (!on_edge) break;
        if (attempt == 0) {
            lo /= 100.0;
            hi *= 100.0;
            result.notes.push_back("scan minimum on bracket edge; bracket widened by 100x");
        } else {
            result.attained = false;
            result.notes.push_back("scan minimum still on bracket edge after widening");
        }
    }
    result.lo = lo;
    result.hi = hi;

    const double a = std::log(ts[best == 0 ? 0 : best - 1]);
    const double b = std::log(ts[std::min(best + 1, ts.size() - 1)]);
    const auto [s, value] = golden_section([&](double x) { return objective(std::exp(x)); }, a, b,
                                           1e-12);
    result.t_star = std::exp(s);
    result.J = value;
    result.qp = inner(result.t_star);
    if (!result.qp.attained) result.notes.push_back("inner infimum may not be attained");
    return result;
}

double regvar_asymptotic(double u, const std::function<double(double)>& sigma1_sq, double J) {
    if (!(u > 0.0)) throw InvalidArgument("regvar_asymptotic: u must be positive");
    const double s2 = sigma1_sq(u);
    if (!(s2 > 0.0)) throw InvalidArgument("regvar_asymptotic: sigma_1^2(u) must be positive");
    return u * u * J / (2.0 * s2);
}

}  // namespace mdx

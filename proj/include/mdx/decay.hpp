#pragma once

// Decay-rate objects for P(exists t in T : X(t) - d(t) > u q).
//
//   M(u, t) = inf_{v >= u q} <v + d(t), Sigma_t^{-1} (v + d(t))>
//   M(u; T) = 1/2 inf_{t in T} M(u, t)
//
// log P(u) ~ -M(u; T) as u -> infinity.

#include <functional>
#include <string>
#include <vector>

#include "mdx/models.hpp"
#include "mdx/quadrant_qp.hpp"

namespace mdx {

struct PointRate {
    Point t;
    double value;  ///< M(u, t), not halved
};

struct RateResult {
    double m_of_u_T = 0.0;  ///< M(u; T), halved
    Point argmin_t;
    std::vector<PointRate> per_point;  ///< filled when RateOptions::per_point
    QpSolution qp;                     ///< optimizer at argmin_t; w_star are the optimal weights
    double u = 0.0;
    double u0 = 0.0;
    std::vector<std::string> notes;
};

struct RateOptions {
    bool per_point = false;
    /// Golden-section refinement along each axis around the grid argmin.
    bool refine = false;
    int workers = 1;
};

/// Quadrant program at a single point: H = Sigma_t^{-1}, b = u q, offset d(t).
QpSolution point_solution(const CovModel& model, const DriftModel& drift, const Vector& q,
                          double u, const Point& t);

double rate_at_point(const CovModel& model, const DriftModel& drift, const Vector& q, double u,
                     const Point& t);

/// Minimizes M(u, t) over the grid. Ties go to the lexicographically
/// smallest point. Throws BelowThreshold unless u > u0.
RateResult rate_over_domain(const CovModel& model, const DriftModel& drift, const Vector& q,
                            double u, const DomainGrid& grid, const RateOptions& opts = {});

/// I(T) = inf_t inf_{v >= q} <v, Sigma_t^{-1} v>.
double bounded_rate_I(const CovModel& model, const Vector& q, const DomainGrid& grid);

/// u^2 / 2 * I(T).
double bounded_asymptotic(double u, double I);

/// Two-dimensional bounded case. Returns
///   (1 / min(s1/q1, s2/q2)^2) * (1 + (c - r)^2 / (1 - r^2) * 1{r < c}),
///   c = min((q1/s1)(s2/q2), (s1/q1)(q2/s2)),
/// which equals M(u, t) / u^2 for the covariance [[s1^2, r s1 s2], [r s1 s2, s2^2]].
/// r = -1 gives +infinity.
double two_dim_closed_form(double sigma1, double sigma2, double r, double q1, double q2);

/// Parameters of a process X = S Y whose component variances are regularly
/// varying with indexes alpha (ascending). The first kappa components share
/// the leading growth with constants c (c[0] = 1).
struct RegVarSpec {
    Vector alpha;
    int kappa = 1;
    Vector c;
    Matrix S;
    Vector q;

    int n() const noexcept { return static_cast<int>(alpha.size()); }
    void validate() const;
    /// diag(1, c_2, ..., c_kappa, 0, ..., 0)
    SymMatrix C() const;
    /// S^{-T} C S^{-1}
    SymMatrix form() const;
};

struct TSearch {
    double lo = 1e-3;
    double hi = 1e3;
    int points = 400;
};

struct RegVarResult {
    double J = 0.0;
    double t_star = 0.0;
    QpSolution qp;       ///< inner solution at t_star
    bool attained = true;  ///< false when the minimizer sits on the search bracket edge
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::string> notes;
};

/// J = inf_{t > 0} inf_{v >= q} <S^{-1}(v + i(t)), C S^{-1}(v + i(t))> / t^{alpha_1}.
/// Log-spaced scan over the bracket, then golden-section search in log t
/// around the best scan point. The bracket is widened once by a factor 100
/// on each side if the scan minimum sits on an edge.
RegVarResult regvar_J(const RegVarSpec& spec, const TSearch& search = {});

/// u^2 J / (2 sigma_1^2(u)).
double regvar_asymptotic(double u, const std::function<double(double)>& sigma1_sq, double J);

/// Golden-section minimization of f over [a, b]; returns {argmin, min}.
std::pair<double, double> golden_section(const std::function<double(double)>& f, double a,
                                         double b, double tol = 1e-12, int max_iter = 300);

}  // namespace mdx

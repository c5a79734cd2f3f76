#pragma once

// Gaussian process models, drift functions and domain grids.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdx/linalg.hpp"

namespace mdx {

/// A point of the index set T (dimension m).
using Point = std::vector<double>;

/// Covariance kernel of a real-valued process on t >= 0 (or all of R for ou).
///
///   bm        k(s,t) = min(s,t)
///   fbm(H)    k(s,t) = (s^{2H} + t^{2H} - |s-t|^{2H}) / 2
///   ou(l)     k(s,t) = exp(-l |s-t|)
///   scaled(c) k(s,t) = c * k_inner(s,t)
class ScalarKernel {
public:
    enum class Kind { Bm, Fbm, Ou, Scaled };

    static ScalarKernel bm();
    static ScalarKernel fbm(double hurst);
    static ScalarKernel ou(double lambda);
    static ScalarKernel scaled(double c, ScalarKernel inner);

    Kind kind() const noexcept { return kind_; }
    /// Hurst exponent, ou rate or scale factor depending on kind.
    double parameter() const noexcept { return param_; }
    const ScalarKernel* inner() const noexcept { return inner_.get(); }

    double variance(double t) const { return covariance(t, t); }
    double covariance(double s, double t) const;
    /// Regular-variation index of the variance at infinity (0 for ou).
    double variance_index() const noexcept;
    std::string describe() const;

private:
    ScalarKernel(Kind kind, double param, std::shared_ptr<const ScalarKernel> inner = nullptr)
        : kind_(kind), param_(param), inner_(std::move(inner)) {}

    Kind kind_;
    double param_;
    std::shared_ptr<const ScalarKernel> inner_;
};

/// Vector-valued centered Gaussian process X(t) in R^n, t in R^m.
///
///   independent     m = 1, Sigma_t = diag(sigma_i^2(t))
///   mixed           m = 1, X = S Y with independent Y, Sigma_t = S diag(sigma_i^2(t)) S^T
///   product-domain  m = n, X_i(t) = Y_i(t_i), Sigma_t = diag(sigma_i^2(t_i))
///   tabulated       explicit Sigma_t on a finite set of points; no cross-time covariance
class CovModel {
public:
    enum class Kind { Independent, Mixed, ProductDomain, Tabulated };

    static CovModel independent(std::vector<ScalarKernel> components);
    static CovModel mixed(std::vector<ScalarKernel> components, Matrix mixing);
    static CovModel product_domain(std::vector<ScalarKernel> components);
    static CovModel tabulated(std::vector<Point> points, std::vector<SymMatrix> sigmas);

    int n() const noexcept { return n_; }
    int domain_dim() const noexcept { return m_; }
    Kind kind() const noexcept { return kind_; }
    const std::vector<ScalarKernel>& components() const noexcept { return components_; }
    const std::optional<Matrix>& mixing() const noexcept { return mixing_; }
    const std::vector<Point>& table_points() const noexcept { return table_points_; }
    const std::vector<SymMatrix>& table_sigmas() const noexcept { return table_sigmas_; }

    /// Covariance matrix of X(t). Throws DegenerateCovariance if it is not
    /// positive definite.
    SymMatrix sigma_at(const Point& t) const;
    /// Cov(X(s), X(t)) as an n x n matrix (not symmetric in general).
    Matrix cross_cov(const Point& s, const Point& t) const;
    bool degenerate_at(const Point& t) const;

private:
    CovModel() = default;
    Matrix raw_sigma(const Point& t) const;
    void check_point(const Point& t) const;
    void probe() const;

    Kind kind_ = Kind::Independent;
    int n_ = 0;
    int m_ = 1;
    std::vector<ScalarKernel> components_;
    std::optional<Matrix> mixing_;
    std::vector<Point> table_points_;
    std::vector<SymMatrix> table_sigmas_;
};

/// Drift d(t) subtracted from the process.
///
///   zero         d(t) = 0
///   linear-unit  d(t) = (t, ..., t), scalar time
///   affine       d_i(t) = slope_i * t + intercept_i, scalar time
///   tabulated    explicit values on a finite set of points
///   product      d_i(t) = coordinate_i(t_i), each coordinate a scalar drift
class DriftModel {
public:
    enum class Kind { Zero, LinearUnit, Affine, Tabulated, Product };

    static DriftModel zero(int n);
    static DriftModel linear_unit(int n);
    static DriftModel affine(Vector slope, Vector intercept);
    static DriftModel tabulated(std::vector<Point> points, std::vector<Vector> values);
    static DriftModel product(std::vector<DriftModel> coordinates);

    int n() const noexcept { return n_; }
    Kind kind() const noexcept { return kind_; }
    const Vector& slope() const noexcept { return slope_; }
    const Vector& intercept() const noexcept { return intercept_; }
    const std::vector<DriftModel>& coordinates() const noexcept { return coordinates_; }
    const std::vector<Point>& table_points() const noexcept { return table_points_; }
    const std::vector<Vector>& table_values() const noexcept { return table_values_; }

    Vector drift_at(const Point& t) const;

private:
    DriftModel() = default;

    Kind kind_ = Kind::Zero;
    int n_ = 0;
    Vector slope_;
    Vector intercept_;
    std::vector<DriftModel> coordinates_;
    std::vector<Point> table_points_;
    std::vector<Vector> table_values_;
};

/// Finite, ordered, duplicate-free set of domain points.
class DomainGrid {
public:
    enum class Spacing { Linear, Log };

    explicit DomainGrid(std::vector<Point> points, std::string description = "explicit");

    static DomainGrid linear(double lo, double hi, int count);
    static DomainGrid log_spaced(double lo, double hi, int count);
    static DomainGrid box(const Point& lo, const Point& hi, const std::vector<int>& resolution,
                          Spacing spacing = Spacing::Linear);
    /// Cartesian product of one-dimensional axes (first axis varies slowest).
    static DomainGrid product(const std::vector<std::vector<double>>& axes);

    const std::vector<Point>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    int dim() const noexcept { return static_cast<int>(points_.front().size()); }
    const std::string& description() const noexcept { return description_; }

private:
    std::vector<Point> points_;
    std::string description_;
};

/// One-dimensional axis values, linear or log spaced.
std::vector<double> axis_values(double lo, double hi, int count, DomainGrid::Spacing spacing);

/// Drops grid points where Sigma_t is singular (e.g. t = 0 for bm).
DomainGrid exclude_degenerate(const DomainGrid& grid, const CovModel& model);

struct CoordinateModel {
    CovModel cov;
    DriftModel drift;
};

/// Y_i(t) = X_i(t_i), m_i(t) = d_i(t_i) on T_1 x ... x T_n.
std::pair<CovModel, DriftModel> product_model(const std::vector<CoordinateModel>& coords);

/// l_i = min over the grid of d_i(t).
Vector drift_infima(const DriftModel& drift, const DomainGrid& grid);

/// u0 = -min_i(l_i / q_i).
double threshold_u0(const DriftModel& drift, const Vector& q, const DomainGrid& grid);

}  // namespace mdx

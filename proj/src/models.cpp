#include "mdx/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mdx/errors.hpp"

namespace mdx {

namespace {

std::string format_point(const Point& t) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? ", " : "") << t[i];
    os << ')';
    return os.str();
}

double scalar_time(const Point& t, const char* who) {
    if (t.size() != 1) {
        throw InvalidArgument(std::string(who) + ": expected scalar time, got point of dimension " +
                              std::to_string(t.size()));
    }
    return t[0];
}

}  // namespace

// ---------------------------------------------------------------- kernels

ScalarKernel ScalarKernel::bm() { return ScalarKernel(Kind::Bm, 0.0); }

ScalarKernel ScalarKernel::fbm(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw InvalidArgument("fbm: Hurst exponent must lie in (0, 1), got " + std::to_string(hurst));
    }
    return ScalarKernel(Kind::Fbm, hurst);
}

ScalarKernel ScalarKernel::ou(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("ou: rate must be positive, got " + std::to_string(lambda));
    }
    return ScalarKernel(Kind::Ou, lambda);
}

ScalarKernel ScalarKernel::scaled(double c, ScalarKernel inner) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw InvalidArgument("scaled: factor must be positive, got " + std::to_string(c));
    }
    return ScalarKernel(Kind::Scaled, c, std::make_shared<const ScalarKernel>(std::move(inner)));
}

double ScalarKernel::covariance(double s, double t) const {
    switch (kind_) {
        case Kind::Bm:
            if (s < 0.0 || t < 0.0) throw InvalidArgument("bm: time must be nonnegative");
            return std::min(s, t);
        case Kind::Fbm: {
            if (s < 0.0 || t < 0.0) throw InvalidArgument("fbm: time must be nonnegative");
            const double two_h = 2.0 * param_;
            return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(s - t), two_h));
        }
        case Kind::Ou:
            return std::exp(-param_ * std::abs(s - t));
        case Kind::Scaled:
            return param_ * inner_->covariance(s, t);
    }
    return 0.0;
}

double ScalarKernel::variance_index() const noexcept {
    switch (kind_) {
        case Kind::Bm: return 1.0;
        case Kind::Fbm: return 2.0 * param_;
        case Kind::Ou: return 0.0;
        case Kind::Scaled: return inner_->variance_index();
    }
    return 0.0;
}

std::string ScalarKernel::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Bm: os << "bm"; break;
        case Kind::Fbm: os << "fbm(H=" << param_ << ")"; break;
        case Kind::Ou: os << "ou(lambda=" << param_ << ")"; break;
        case Kind::Scaled: os << "scaled(" << param_ << ", " << inner_->describe() << ")"; break;
    }
    return os.str();
}

// ---------------------------------------------------------------- CovModel

CovModel CovModel::independent(std::vector<ScalarKernel> components) {
    if (components.empty()) throw InvalidArgument("CovModel: at least one component required");
    CovModel m;
    m.kind_ = Kind::Independent;
    m.n_ = static_cast<int>(components.size());
    m.m_ = 1;
    m.components_ = std::move(components);
    m.probe();
    return m;
}

CovModel CovModel::mixed(std::vector<ScalarKernel> components, Matrix mixing) {
    if (components.empty()) throw InvalidArgument("CovModel: at least one component required");
    const auto n = static_cast<Eigen::Index>(components.size());
    if (mixing.rows() != n || mixing.cols() != n) {
        throw InvalidArgument("CovModel: mixing matrix must be " + std::to_string(n) + "x" +
                              std::to_string(n));
    }
    if (!mixing.allFinite()) throw InvalidArgument("CovModel: mixing matrix has non-finite entries");
    if (!Eigen::FullPivLU<Matrix>(mixing).isInvertible()) {
        throw InvalidArgument("CovModel: mixing matrix is singular");
    }
    CovModel m;
    m.kind_ = Kind::Mixed;
    m.n_ = static_cast<int>(n);
    m.m_ = 1;
    m.components_ = std::move(components);
    m.mixing_ = std::move(mixing);
    m.probe();
    return m;
}

CovModel CovModel::product_domain(std::vector<ScalarKernel> components) {
    if (components.empty()) throw InvalidArgument("CovModel: at least one component required");
    CovModel m;
    m.kind_ = Kind::ProductDomain;
    m.n_ = static_cast<int>(components.size());
    m.m_ = m.n_;
    m.components_ = std::move(components);
    m.probe();
    return m;
}

CovModel CovModel::tabulated(std::vector<Point> points, std::vector<SymMatrix> sigmas) {
    if (points.empty() || points.size() != sigmas.size()) {
        throw InvalidArgument("CovModel: tabulated model needs one covariance per point");
    }
    const int n = static_cast<int>(sigmas.front().dim());
    const std::size_t m = points.front().size();
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (points[k].size() != m || sigmas[k].dim() != n) {
            throw InvalidArgument("CovModel: inconsistent dimensions in tabulated model");
        }
    }
    CovModel model;
    model.kind_ = Kind::Tabulated;
    model.n_ = n;
    model.m_ = static_cast<int>(m);
    model.table_points_ = std::move(points);
    model.table_sigmas_ = std::move(sigmas);
    model.probe();
    return model;
}

void CovModel::check_point(const Point& t) const {
    if (static_cast<int>(t.size()) != m_) {
        throw InvalidArgument("CovModel: point " + format_point(t) + " has dimension " +
                              std::to_string(t.size()) + ", expected " + std::to_string(m_));
    }
}

Matrix CovModel::raw_sigma(const Point& t) const {
    return cross_cov(t, t);
}

Matrix CovModel::cross_cov(const Point& s, const Point& t) const {
    check_point(s);
    check_point(t);
    Matrix c = Matrix::Zero(n_, n_);
    switch (kind_) {
        case Kind::Independent:
            for (int i = 0; i < n_; ++i) c(i, i) = components_[i].covariance(s[0], t[0]);
            return c;
        case Kind::Mixed: {
            Vector k(n_);
            for (int i = 0; i < n_; ++i) k(i) = components_[i].covariance(s[0], t[0]);
            return *mixing_ * k.asDiagonal() * mixing_->transpose();
        }
        case Kind::ProductDomain:
            for (int i = 0; i < n_; ++i) c(i, i) = components_[i].covariance(s[i], t[i]);
            return c;
        case Kind::Tabulated: {
            if (s != t) {
                throw OutsideTable("CovModel: tabulated models carry no cross-time covariance");
            }
            const auto it = std::find(table_points_.begin(), table_points_.end(), t);
            if (it == table_points_.end()) {
                throw OutsideTable("CovModel: point " + format_point(t) + " is not tabulated");
            }
            return table_sigmas_[it - table_points_.begin()].matrix();
        }
    }
    return c;
}

SymMatrix CovModel::sigma_at(const Point& t) const {
    SymMatrix sigma(raw_sigma(t));
    try {
        (void)cholesky(sigma);
    } catch (const NotPositiveDefinite&) {
        throw DegenerateCovariance("covariance is singular at t = " + format_point(t));
    }
    return sigma;
}

bool CovModel::degenerate_at(const Point& t) const {
    try {
        (void)sigma_at(t);
        return false;
    } catch (const DegenerateCovariance&) {
        return true;
    }
}

void CovModel::probe() const {
    std::vector<Point> probes;
    if (kind_ == Kind::Tabulated) {
        probes = table_points_;
    } else {
        for (double t : {0.25, 1.0, 4.0}) probes.emplace_back(m_, t);
    }
    for (const Point& t : probes) (void)sigma_at(t);
}

// ---------------------------------------------------------------- DriftModel

DriftModel DriftModel::zero(int n) {
    if (n < 1) throw InvalidArgument("DriftModel: n must be positive");
    DriftModel d;
    d.kind_ = Kind::Zero;
    d.n_ = n;
    return d;
}

DriftModel DriftModel::linear_unit(int n) {
    if (n < 1) throw InvalidArgument("DriftModel: n must be positive");
    DriftModel d;
    d.kind_ = Kind::LinearUnit;
    d.n_ = n;
    return d;
}

DriftModel DriftModel::affine(Vector slope, Vector intercept) {
    if (slope.size() < 1 || slope.size() != intercept.size()) {
        throw InvalidArgument("DriftModel: affine slope and intercept must have equal length");
    }
    if (!slope.allFinite() || !intercept.allFinite()) {
        throw InvalidArgument("DriftModel: affine coefficients must be finite");
    }
    DriftModel d;
    d.kind_ = Kind::Affine;
    d.n_ = static_cast<int>(slope.size());
    d.slope_ = std::move(slope);
    d.intercept_ = std::move(intercept);
    return d;
}

DriftModel DriftModel::tabulated(std::vector<Point> points, std::vector<Vector> values) {
    if (points.empty() || points.size() != values.size()) {
        throw InvalidArgument("DriftModel: tabulated drift needs one value per point");
    }
    const auto n = values.front().size();
    for (const Vector& v : values) {
        if (v.size() != n || !v.allFinite()) {
            throw InvalidArgument("DriftModel: tabulated values must be finite and of equal length");
        }
    }
    DriftModel d;
    d.kind_ = Kind::Tabulated;
    d.n_ = static_cast<int>(n);
    d.table_points_ = std::move(points);
    d.table_values_ = std::move(values);
    return d;
}

DriftModel DriftModel::product(std::vector<DriftModel> coordinates) {
    if (coordinates.empty()) throw InvalidArgument("DriftModel: product needs coordinates");
    for (const DriftModel& c : coordinates) {
        if (c.n() != 1) throw InvalidArgument("DriftModel: product coordinates must be scalar");
    }
    DriftModel d;
    d.kind_ = Kind::Product;
    d.n_ = static_cast<int>(coordinates.size());
    d.coordinates_ = std::move(coordinates);
    return d;
}

Vector DriftModel::drift_at(const Point& t) const {
    switch (kind_) {
        case Kind::Zero:
            return Vector::Zero(n_);
        case Kind::LinearUnit:
            return Vector::Constant(n_, scalar_time(t, "linear-unit drift"));
        case Kind::Affine:
            return slope_ * scalar_time(t, "affine drift") + intercept_;
        case Kind::Tabulated: {
            const auto it = std::find(table_points_.begin(), table_points_.end(), t);
            if (it == table_points_.end()) {
                throw OutsideTable("drift: point " + format_point(t) + " is not tabulated");
            }
            return table_values_[it - table_points_.begin()];
        }
        case Kind::Product: {
            if (static_cast<int>(t.size()) != n_) {
                throw InvalidArgument("product drift: point dimension must equal n");
            }
            Vector d(n_);
            for (int i = 0; i < n_; ++i) d(i) = coordinates_[i].drift_at(Point{t[i]})(0);
            return d;
        }
    }
    return Vector::Zero(n_);
}

// ---------------------------------------------------------------- DomainGrid

DomainGrid::DomainGrid(std::vector<Point> points, std::string description)
    : points_(std::move(points)), description_(std::move(description)) {
    if (points_.empty()) throw InvalidArgument("DomainGrid: grid must be non-empty");
    const std::size_t m = points_.front().size();
    if (m == 0) throw InvalidArgument("DomainGrid: points must have dimension >= 1");
    for (const Point& p : points_) {
        if (p.size() != m) throw InvalidArgument("DomainGrid: points have mixed dimensions");
        for (double x : p) {
            if (!std::isfinite(x)) throw InvalidArgument("DomainGrid: non-finite coordinate");
        }
    }
    std::vector<Point> sorted = points_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidArgument("DomainGrid: duplicate point " +
                              format_point(*std::adjacent_find(sorted.begin(), sorted.end())));
    }
}

std::vector<double> axis_values(double lo, double hi, int count, DomainGrid::Spacing spacing) {
    if (count < 1) throw InvalidArgument("grid: resolution must be at least 1");
    if (!(hi >= lo)) throw InvalidArgument("grid: upper bound below lower bound");
    if (spacing == DomainGrid::Spacing::Log && !(lo > 0.0)) {
        throw InvalidArgument("grid: log spacing needs a positive lower bound");
    }
    std::vector<double> axis(count);
    if (count == 1) {
        axis[0] = lo;
        return axis;
    }
    for (int k = 0; k < count; ++k) {
        const double f = static_cast<double>(k) / (count - 1);
        axis[k] = spacing == DomainGrid::Spacing::Log ? lo * std::pow(hi / lo, f)
                                                      : lo + f * (hi - lo);
    }
    axis.front() = lo;
    axis.back() = hi;
    return axis;
}

DomainGrid DomainGrid::linear(double lo, double hi, int count) {
    return box({lo}, {hi}, {count}, Spacing::Linear);
}

DomainGrid DomainGrid::log_spaced(double lo, double hi, int count) {
    return box({lo}, {hi}, {count}, Spacing::Log);
}

DomainGrid DomainGrid::box(const Point& lo, const Point& hi, const std::vector<int>& resolution,
                           Spacing spacing) {
    if (lo.empty() || lo.size() != hi.size() || lo.size() != resolution.size()) {
        throw InvalidArgument("grid: box bounds and resolution must have equal length");
    }
    std::vector<std::vector<double>> axes;
    for (std::size_t k = 0; k < lo.size(); ++k) {
        axes.push_back(axis_values(lo[k], hi[k], resolution[k], spacing));
    }
    DomainGrid g = product(axes);
    std::ostringstream os;
    os << (spacing == Spacing::Log ? "log" : "linear") << " box " << format_point(lo) << " to "
       << format_point(hi) << ", " << g.size() << " points";
    g.description_ = os.str();
    return g;
}

DomainGrid DomainGrid::product(const std::vector<std::vector<double>>& axes) {
    if (axes.empty()) throw InvalidArgument("grid: product needs at least one axis");
    std::vector<Point> points{Point{}};
    for (const auto& axis : axes) {
        if (axis.empty()) throw InvalidArgument("grid: empty axis");
        std::vector<Point> next;
        next.reserve(points.size() * axis.size());
        for (const Point& p : points) {
            for (double x : axis) {
                Point q = p;
                q.push_back(x);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return DomainGrid(std::move(points), "product of " + std::to_string(axes.size()) + " axes");
}

DomainGrid exclude_degenerate(const DomainGrid& grid, const CovModel& model) {
    std::vector<Point> kept;
    for (const Point& t : grid.points()) {
        if (!model.degenerate_at(t)) kept.push_back(t);
    }
    if (kept.empty()) throw DegenerateCovariance("grid: covariance is singular at every grid point");
    return DomainGrid(std::move(kept), grid.description());
}

// ---------------------------------------------------------------- combinators

std::pair<CovModel, DriftModel> product_model(const std::vector<CoordinateModel>& coords) {
    if (coords.empty()) throw InvalidArgument("product_model: no coordinates");
    std::vector<ScalarKernel> kernels;
    std::vector<DriftModel> drifts;
    for (const CoordinateModel& c : coords) {
        if (c.cov.n() != 1 || c.drift.n() != 1) {
            throw InvalidArgument("product_model: coordinate models must be scalar");
        }
        switch (c.cov.kind()) {
            case CovModel::Kind::Independent:
                kernels.push_back(c.cov.components().front());
                break;
            case CovModel::Kind::Mixed: {
                const double s = (*c.cov.mixing())(0, 0);
                kernels.push_back(ScalarKernel::scaled(s * s, c.cov.components().front()));
                break;
            }
            default:
                throw InvalidArgument("product_model: coordinate must be a scalar kernel model");
        }
        drifts.push_back(c.drift);
    }
    return {CovModel::product_domain(std::move(kernels)), DriftModel::product(std::move(drifts))};
}

Vector drift_infima(const DriftModel& drift, const DomainGrid& grid) {
    Vector ell = Vector::Constant(drift.n(), std::numeric_limits<double>::infinity());
    for (const Point& t : grid.points()) ell = ell.cwiseMin(drift.drift_at(t));
    return ell;
}

double threshold_u0(const DriftModel& drift, const Vector& q, const DomainGrid& grid) {
    if (q.size() != drift.n()) throw InvalidArgument("threshold_u0: q has wrong length");
    if ((q.array() <= 0.0).any()) throw InvalidArgument("threshold_u0: q must be positive");
    const Vector ell = drift_infima(drift, grid);
    return -(ell.array() / q.array()).minCoeff() + 0.0;
}

}  // namespace mdx

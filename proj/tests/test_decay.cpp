#include <cmath>
#include <random>

#include "doctest.h"
#include "mdx/decay.hpp"
#include "mdx/errors.hpp"
#include "test_util.hpp"

using namespace mdx;
using namespace mdx::testing;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(xs.size());
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

CovModel tabulated_const(const Matrix& a) { return CovModel::tabulated({{1.0}}, {SymMatrix(a)}); }

const CovModel kBm = CovModel::independent({ScalarKernel::bm()});

}  // namespace

TEST_CASE("rate_at_point examples") {
    CHECK(rate_at_point(kBm, DriftModel::zero(1), vec({1}), 3.0, {1.0}) == doctest::Approx(9.0));
    CHECK(rate_at_point(kBm, DriftModel::linear_unit(1), vec({1}), 2.0, {2.0}) ==
          doctest::Approx(8.0));
    Matrix a(2, 2);
    a << 1, 0.5, 0.5, 1;
    CHECK(rate_at_point(tabulated_const(a), DriftModel::zero(2), vec({1, 1}), 1.0, {1.0}) ==
          doctest::Approx(4.0 / 3.0));
}

TEST_CASE("bm with unit drift on a log grid") {
    const DomainGrid grid = DomainGrid::log_spaced(0.01, 50, 2000);
    const RateResult r = rate_over_domain(kBm, DriftModel::linear_unit(1), vec({1}), 4.0, grid);
    CHECK(std::abs(r.m_of_u_T - 8.0) / 8.0 < 1e-3);
    CHECK(std::abs(r.argmin_t[0] - 4.0) < 0.05);
    CHECK(r.m_of_u_T > 0);
    CHECK(r.qp.w_star(0) > 0);
    // Calculus oracle: (u + t)^2 / (2t) is minimal at t = u.
    const double t = r.argmin_t[0];
    CHECK(r.m_of_u_T == doctest::Approx((4 + t) * (4 + t) / (2 * t)).epsilon(1e-12));
}

TEST_CASE("singleton grid gives half the point rate") {
    Matrix s(2, 2);
    s << 1, 0, 0.3, 0.8;
    const CovModel m = CovModel::mixed({ScalarKernel::bm(), ScalarKernel::fbm(0.3)}, s);
    const DriftModel d = DriftModel::affine(vec({0.5, 1}), vec({0.1, 0}));
    const DomainGrid g(std::vector<Point>{{1.7}});
    const RateResult r = rate_over_domain(m, d, vec({1, 2}), 3.0, g);
    CHECK(r.m_of_u_T == doctest::Approx(0.5 * rate_at_point(m, d, vec({1, 2}), 3.0, {1.7})));
}

TEST_CASE("refinement never increases the domain rate") {
    const DriftModel d = DriftModel::linear_unit(1);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 3; k <= 10; ++k) {
        const int pts = (1 << k) + 1;  // nested log grids
        const RateResult r = rate_over_domain(kBm, d, vec({1}), 3.0, DomainGrid::log_spaced(0.1, 30, pts));
        CHECK(r.m_of_u_T <= prev + 1e-15);
        prev = r.m_of_u_T;
    }
    RateOptions opt;
    opt.refine = true;
    const DomainGrid coarse = DomainGrid::log_spaced(0.1, 30, 9);
    const RateResult plain = rate_over_domain(kBm, d, vec({1}), 3.0, coarse);
    const RateResult refined = rate_over_domain(kBm, d, vec({1}), 3.0, coarse, opt);
    CHECK(refined.m_of_u_T <= plain.m_of_u_T);
    CHECK(refined.m_of_u_T == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("per-point table and worker independence") {
    const DomainGrid grid = DomainGrid::log_spaced(0.1, 20, 301);
    RateOptions seq;
    seq.per_point = true;
    RateOptions par = seq;
    par.workers = 4;
    const RateResult a = rate_over_domain(kBm, DriftModel::linear_unit(1), vec({1}), 2.0, grid, seq);
    const RateResult b = rate_over_domain(kBm, DriftModel::linear_unit(1), vec({1}), 2.0, grid, par);
    CHECK(a.per_point.size() == 301);
    CHECK(a.m_of_u_T == b.m_of_u_T);
    CHECK(a.argmin_t == b.argmin_t);
    double lo = std::numeric_limits<double>::infinity();
    for (const PointRate& p : a.per_point) lo = std::min(lo, p.value);
    CHECK(a.m_of_u_T == 0.5 * lo);
}

TEST_CASE("ties go to the smallest point") {
    const CovModel ou = CovModel::independent({ScalarKernel::ou(1.0)});
    const RateResult r = rate_over_domain(ou, DriftModel::zero(1), vec({1}), 2.0,
                                          DomainGrid::linear(1.0, 5.0, 5));
    CHECK(r.argmin_t[0] == 1.0);
}

TEST_CASE("threshold is enforced") {
    const DriftModel aff = DriftModel::affine(vec({1}), vec({-2}));
    const DomainGrid grid = DomainGrid::linear(0.5, 3, 6);
    CHECK_THROWS_AS(rate_over_domain(kBm, aff, vec({1}), 1.0, grid), BelowThreshold);
    CHECK(rate_over_domain(kBm, aff, vec({1}), 1.6, grid).m_of_u_T > 0);
}

TEST_CASE("bounded_rate_I") {
    const DomainGrid one(std::vector<Point>{{1.0}});
    CHECK(bounded_rate_I(tabulated_const(Matrix::Identity(2, 2)), vec({1, 1}), one) ==
          doctest::Approx(2.0));
    Matrix a(2, 2);
    a << 1, 0.5, 0.5, 1;
    CHECK(bounded_rate_I(tabulated_const(a), vec({1, 1}), one) == doctest::Approx(4.0 / 3.0));

    // Variance t(2 - t) on [0.1, 1.9] is largest at t = 1.
    std::vector<Point> pts;
    std::vector<SymMatrix> sig;
    for (int k = 1; k <= 19; ++k) {
        const double t = 0.1 * k;
        pts.push_back({t});
        sig.push_back(SymMatrix(Matrix::Constant(1, 1, t * (2 - t))));
    }
    const CovModel bridge = CovModel::tabulated(pts, sig);
    const DomainGrid g(pts);
    CHECK(bounded_rate_I(bridge, vec({1}), g) == doctest::Approx(1.0));
    const RateResult r = rate_over_domain(bridge, DriftModel::zero(1), vec({1}), 1.0, g);
    CHECK(r.argmin_t[0] == doctest::Approx(1.0));
    CHECK(bounded_asymptotic(3.0, 2.0) == 9.0);
}

TEST_CASE("two-dimensional closed form") {
    CHECK(two_dim_closed_form(1, 1, 0, 1, 1) == doctest::Approx(2.0));
    CHECK(two_dim_closed_form(1, 1, 0.5, 1, 1) == doctest::Approx(4.0 / 3.0));
    CHECK(two_dim_closed_form(1, 2, 0.8, 1, 1) == doctest::Approx(1.0));
    CHECK(std::isinf(two_dim_closed_form(1, 1, -1, 1, 1)));
    CHECK(two_dim_closed_form(1, 1, 1, 1, 1) == doctest::Approx(1.0));
    CHECK_THROWS_AS(two_dim_closed_form(1, 1, 1.01, 1, 1), InvalidCorrelation);
    CHECK_THROWS_AS(two_dim_closed_form(0, 1, 0.1, 1, 1), InvalidArgument);
}

TEST_CASE("closed form agrees with the quadrant program") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(0.2, 3.0), corr(-0.99, 0.99), uu(0.5, 4.0);
    int below = 0, above = 0;
    for (int k = 0; k < 1000; ++k) {
        const double s1 = pos(rng), s2 = pos(rng), r = corr(rng), q1 = pos(rng), q2 = pos(rng);
        const double u = uu(rng);
        Matrix a(2, 2);
        a << s1 * s1, r * s1 * s2, r * s1 * s2, s2 * s2;
        const double m = rate_at_point(tabulated_const(a), DriftModel::zero(2), vec({q1, q2}), u, {1.0});
        const double closed = two_dim_closed_form(s1, s2, r, q1, q2);
        CHECK(rel_diff(closed, m / (u * u)) < 1e-9);
        const double c = std::min((q1 / s1) * (s2 / q2), (s1 / q1) * (q2 / s2));
        (r < c ? below : above)++;
    }
    CHECK(below > 100);
    CHECK(above > 100);
}

TEST_CASE("driftless scaling and threshold scaling") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        const int n = 1 + k % 5;
        const Matrix a = random_spd(rng, n).matrix();
        const Vector q = random_positive(rng, n, 0.1, 2.0);
        const CovModel m = tabulated_const(a);
        const double u = 0.5 + 0.05 * k;
        const double m1 = rate_at_point(m, DriftModel::zero(n), q, 1.0, {1.0});
        CHECK(rel_diff(rate_at_point(m, DriftModel::zero(n), q, u, {1.0}), u * u * m1) < 1e-10);
    }
    const CovModel fbm = CovModel::independent({ScalarKernel::fbm(0.7), ScalarKernel::bm()});
    const DomainGrid grid = DomainGrid::linear(0.2, 3, 30);
    const RateResult base = rate_over_domain(fbm, DriftModel::zero(2), vec({1, 0.5}), 2.0, grid);
    for (double c : {0.3, 2.0, 7.5}) {
        const RateResult s = rate_over_domain(fbm, DriftModel::zero(2), vec({c, 0.5 * c}), 2.0, grid);
        CHECK(rel_diff(s.m_of_u_T, c * c * base.m_of_u_T) < 1e-10);
        CHECK(s.argmin_t == base.argmin_t);
    }
}

TEST_CASE("regvar_J closed forms") {
    auto scalar = [](double alpha, double q) {
        RegVarSpec s;
        s.alpha = vec({alpha});
        s.c = vec({1});
        s.S = Matrix::Identity(1, 1);
        s.q = vec({q});
        return s;
    };
    const RegVarResult one = regvar_J(scalar(1.0, 1.0));
    CHECK(std::abs(one.J - 4.0) < 1e-6);
    CHECK(std::abs(one.t_star - 1.0) < 1e-4);
    CHECK(one.attained);
    const RegVarResult r15 = regvar_J(scalar(1.5, 1.0));
    CHECK(std::abs(r15.J - 16.0 / std::pow(3.0, 1.5)) < 1e-6);
    CHECK(std::abs(r15.t_star - 3.0) < 1e-3);

    RegVarSpec two;
    two.alpha = vec({1.0, 1.5});
    two.c = vec({1});
    two.S = Matrix::Identity(2, 2);
    two.q = vec({2.0, 5.0});
    CHECK(std::abs(regvar_J(two).J - regvar_J(scalar(1.0, 2.0)).J) < 1e-6);

    RegVarSpec bad = two;
    bad.alpha = vec({1.5, 1.0});
    CHECK_THROWS_AS(regvar_J(bad), InvalidArgument);
    bad = two;
    bad.kappa = 3;
    CHECK_THROWS_AS(regvar_J(bad), InvalidArgument);
}

TEST_CASE("regvar_asymptotic") {
    CHECK(regvar_asymptotic(4.0, [](double u) { return u; }, 4.0) == 8.0);
    CHECK(regvar_asymptotic(1.0, [](double) { return 1.0; }, 2.0) == 1.0);
    const double j = 16.0 / std::pow(3.0, 1.5);
    CHECK(regvar_asymptotic(16.0, [](double u) { return std::pow(u, 1.5); }, j) ==
          doctest::Approx(256.0 * j / (2 * 64.0)));
}

TEST_CASE("domain rate approaches the regularly varying limit") {
    const DomainGrid grid = DomainGrid::log_spaced(1e-2, 1e4, 3000);
    RateOptions opt;
    opt.refine = true;

    // bm with unit drift: exact at every u.
    for (double u : {4.0, 8.0, 16.0, 32.0}) {
        const RateResult r = rate_over_domain(kBm, DriftModel::linear_unit(1), vec({1}), u, grid, opt);
        CHECK(std::abs(2 * r.m_of_u_T / (u * u / u) - 4.0) < 1e-6);
    }

    // bm leads, an fbm(0.75) coordinate is costless in the limit.
    const CovModel m = CovModel::independent({ScalarKernel::bm(), ScalarKernel::fbm(0.75)});
    RegVarSpec spec;
    spec.alpha = vec({1.0, 1.5});
    spec.c = vec({1});
    spec.S = Matrix::Identity(2, 2);
    spec.q = vec({1, 1});
    const double j = regvar_J(spec).J;
    double prev = std::numeric_limits<double>::infinity();
    for (double u : {4.0, 8.0, 16.0, 32.0}) {
        const RateResult r = rate_over_domain(m, DriftModel::linear_unit(2), vec({1, 1}), u, grid, opt);
        const double dev = std::abs(2 * r.m_of_u_T / (u * u / u) - j);
        CHECK(dev < prev);
        prev = dev;
    }
}

TEST_CASE("golden_section") {
    const auto [x, fx] = golden_section([](double t) { return (t - 0.3) * (t - 0.3) + 1; }, -2, 5);
    CHECK(x == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(fx == doctest::Approx(1.0));
    const auto [xe, fe] = golden_section([](double t) { return t; }, 1, 2);
    CHECK(xe == 1.0);
    CHECK(fe == 1.0);
}

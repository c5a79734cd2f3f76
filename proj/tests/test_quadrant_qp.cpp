#include <cmath>
#include <random>

#include "doctest.h"
#include "mdx/errors.hpp"
#include "mdx/quadrant_qp.hpp"
#include "test_util.hpp"

using namespace mdx;
using testing::rel_diff;

namespace {

SymMatrix sym2(double a, double b, double c) {
    Matrix m(2, 2);
    m << a, b, b, c;
    return SymMatrix(m);
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(xs.size());
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

void check_kkt(const QuadrantProblem& p, const QpSolution& s) {
    for (Eigen::Index i = 0; i < p.dim(); ++i) {
        CHECK(s.v_star(i) >= p.bound(i) - 1e-12);
        CHECK(s.w_star(i) >= -1e-10);
        if (s.w_star(i) > 1e-10) CHECK(std::abs(s.v_star(i) - p.bound(i)) <= 1e-10);
    }
    const bool is_active = false;
    (void)is_active;
    std::vector<bool> active(p.dim(), false);
    for (int i : s.active) active[i] = true;
    for (Eigen::Index i = 0; i < p.dim(); ++i) {
        if (!active[i]) CHECK(std::abs(s.w_star(i)) <= 1e-9);
    }
    const Vector y = s.v_star + p.offset;
    CHECK(std::abs(s.value - y.dot(p.H.matrix() * y)) <= 1e-12 * (1 + s.value));
}

}  // namespace

TEST_CASE("solve_quadrant: worked instances") {
    SUBCASE("identity") {
        QuadrantProblem p(SymMatrix::identity(2), Vector::Zero(2), vec({1, 1}));
        for (const QpSolution& s : {solve_quadrant(p), brute_force_active_sets(p)}) {
            CHECK(s.value == doctest::Approx(2.0).epsilon(1e-15));
            CHECK(s.v_star.isApprox(vec({1, 1})));
            CHECK(s.w_star.isApprox(vec({1, 1})));
            CHECK(s.active == std::vector<int>{0, 1});
            check_kkt(p, s);
        }
    }
    SUBCASE("rho = 0.5") {
        QuadrantProblem p(inverse_spd(sym2(1, 0.5, 1)), Vector::Zero(2), vec({1, 1}));
        for (const QpSolution& s : {solve_quadrant(p), brute_force_active_sets(p)}) {
            CHECK(rel_diff(s.value, 4.0 / 3.0) < 1e-14);
            CHECK((s.v_star - vec({1, 1})).norm() < 1e-14);
            CHECK((s.w_star - vec({2.0 / 3.0, 2.0 / 3.0})).norm() < 1e-14);
            CHECK(s.active == std::vector<int>{0, 1});
            check_kkt(p, s);
        }
    }
    SUBCASE("one free coordinate") {
        // Sigma = [[1,1.6],[1.6,4]]: fixing v_1 = 1, stationarity in v_2 gives
        // v_2 = Sigma_21 / Sigma_11 = 1.6 >= 1, value = 1 / Sigma_11 = 1.
        QuadrantProblem p(inverse_spd(sym2(1, 1.6, 4)), Vector::Zero(2), vec({1, 1}));
        for (const QpSolution& s : {solve_quadrant(p), brute_force_active_sets(p)}) {
            CHECK(rel_diff(s.value, 1.0) < 1e-13);
            CHECK((s.v_star - vec({1, 1.6})).norm() < 1e-13);
            CHECK(std::abs(s.w_star(0) - 1.0) < 1e-13);
            CHECK(std::abs(s.w_star(1)) < 1e-13);
            CHECK(s.active == std::vector<int>{0});
            check_kkt(p, s);
        }
    }
    SUBCASE("drift offset") {
        // n = 1: inf_{v >= 3} (v + 1)^2 / 2 = 8.
        QuadrantProblem p(SymMatrix::diagonal(vec({0.5})), vec({1}), vec({3}));
        const QpSolution s = solve_quadrant(p);
        CHECK(s.value == doctest::Approx(8.0).epsilon(1e-15));
        CHECK(s.w_star(0) == doctest::Approx(2.0));
    }
    SUBCASE("negative bound is released") {
        // b + d < 0 in one coordinate: that coordinate moves to -d.
        QuadrantProblem p(SymMatrix::identity(2), vec({0, 0}), vec({1, -2}));
        const QpSolution s = solve_quadrant(p);
        CHECK(s.value == doctest::Approx(1.0));
        CHECK(s.active == std::vector<int>{0});
        CHECK(std::abs(s.v_star(1)) < 1e-15);
    }
}

TEST_CASE("solve_quadrant errors") {
    Matrix m(2, 2);
    m << 1, 1, 1, 1;
    QuadrantProblem p(SymMatrix(m), Vector::Zero(2), vec({1, 1}));
    CHECK_THROWS_AS(solve_quadrant(p), NotPositiveDefinite);
    CHECK_THROWS_AS(QuadrantProblem(SymMatrix::identity(2), Vector::Zero(3), vec({1, 1})),
                    InvalidArgument);
    QuadrantProblem big(SymMatrix::identity(21), Vector::Zero(21), Vector::Ones(21));
    CHECK_THROWS_AS(brute_force_active_sets(big), DimensionTooLarge);
    CHECK(solve_quadrant(big).value == doctest::Approx(21.0));
}

TEST_CASE("solve_quadrant: iteration cap") {
    std::mt19937_64 rng(3);
    const SymMatrix a = testing::random_spd(rng, 6);
    QuadrantProblem p(inverse_spd(a), Vector::Zero(6), Vector::Ones(6));
    const QpSolution s = solve_quadrant(p);
    if (s.iterations > 1) {
        QpOptions opts;
        opts.max_iterations = 1;
        CHECK_THROWS_AS(solve_quadrant(p, opts), NoConvergence);
    }
}

TEST_CASE("solve_quadrant_psd") {
    SUBCASE("zero form") {
        QuadrantProblem p(SymMatrix::zero(2), vec({0.3, -1}), vec({2, 5}));
        CHECK(std::abs(solve_quadrant_psd(p).value) < 1e-12);
    }
    SUBCASE("decoupled") {
        QuadrantProblem p(SymMatrix::diagonal(vec({1, 0})), Vector::Zero(2), vec({2, 5}));
        const QpSolution s = solve_quadrant_psd(p);
        CHECK(s.value == doctest::Approx(4.0).epsilon(1e-12));
        CHECK((s.v_star - vec({2, 5})).norm() < 1e-9);
        CHECK(s.attained);
    }
    SUBCASE("random rank-2 forms against a grid oracle") {
        std::mt19937_64 rng(77);
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 3; ++trial) {
            Matrix g(3, 2);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 2; ++j) g(i, j) = normal(rng);
            const SymMatrix h(g * g.transpose());
            const Vector q = testing::random_positive(rng, 3, 0.2, 2.0);
            const QpSolution s = solve_quadrant_psd(QuadrantProblem(h, Vector::Zero(3), q));

            // Grid search over v in [q, q + 10]^3: step 0.1 everywhere, then
            // step 0.01 within +-0.3 of the coarse minimizer.
            auto value = [&](const Eigen::Vector3d& v) { return v.dot(h.matrix() * v); };
            double best = std::numeric_limits<double>::infinity();
            Eigen::Vector3d arg;
            for (int a = 0; a <= 100; ++a)
                for (int b = 0; b <= 100; ++b)
                    for (int c = 0; c <= 100; ++c) {
                        const Eigen::Vector3d v = q + Eigen::Vector3d(a, b, c) * 0.1;
                        const double f = value(v);
                        if (f < best) {
                            best = f;
                            arg = v;
                        }
                    }
            const Eigen::Vector3d centre = arg;
            for (int a = -30; a <= 30; ++a)
                for (int b = -30; b <= 30; ++b)
                    for (int c = -30; c <= 30; ++c) {
                        const Eigen::Vector3d v = centre + Eigen::Vector3d(a, b, c) * 0.01;
                        if ((v.array() < q.array() - 1e-12).any()) continue;
                        best = std::min(best, value(v));
                    }
            CHECK(std::abs(s.value - best) < 1e-3);
            CHECK(s.value <= best + 1e-9);
        }
    }
    SUBCASE("jitter sequence settles") {
        std::mt19937_64 rng(5);
        const SymMatrix a = testing::random_spd(rng, 4);
        QuadrantProblem p(inverse_spd(a), Vector::Zero(4), Vector::Ones(4));
        CHECK(rel_diff(solve_quadrant_psd(p).value, solve_quadrant(p).value) < 1e-6);
    }
}

TEST_CASE("dual_ratio") {
    CHECK(dual_ratio(SymMatrix::identity(2), vec({1, 1}), vec({1, 1})) == doctest::Approx(2.0));
    const SymMatrix a = sym2(1, 0.5, 1);
    CHECK(rel_diff(dual_ratio(a, vec({1, 1}), vec({2.0 / 3.0, 2.0 / 3.0})), 4.0 / 3.0) < 1e-14);
    CHECK(dual_ratio(a, vec({1, 1}), vec({1, 0})) == doctest::Approx(1.0));
    CHECK_THROWS_AS(dual_ratio(a, vec({1, 1}), vec({0, 0})), ZeroWeight);
    CHECK_THROWS_AS(dual_ratio(a, vec({1, 1}), vec({-1, 1})), InvalidArgument);
}

TEST_CASE("verify_saddle") {
    SUBCASE("identity") {
        const SaddleReport r = verify_saddle(SymMatrix::identity(3), Vector::Ones(3), 500, 1);
        CHECK(r.primal == doctest::Approx(3.0));
        CHECK(r.ratio_at_w_star == doctest::Approx(3.0));
        CHECK(r.sampled_max <= 3.0 + 1e-9);
        CHECK(r.holds());
    }
    SUBCASE("rho = 0.5") {
        const SaddleReport r = verify_saddle(sym2(1, 0.5, 1), vec({1, 1}), 500, 2);
        CHECK(rel_diff(r.primal, 4.0 / 3.0) < 1e-14);
        CHECK(rel_diff(r.ratio_at_w_star, 4.0 / 3.0) < 1e-14);
        CHECK(r.holds());
    }
    SUBCASE("one free coordinate") {
        const SaddleReport r = verify_saddle(sym2(1, 1.6, 4), vec({1, 1}), 500, 3);
        CHECK(rel_diff(r.primal, 1.0) < 1e-13);
        CHECK(rel_diff(r.ratio_at_w_star, 1.0) < 1e-13);
        CHECK(std::abs(r.w_star(1)) < 1e-13);
        CHECK(r.holds());
    }
    CHECK_THROWS_AS(verify_saddle(SymMatrix::identity(2), vec({1, 0}), 10, 1), InvalidArgument);
}

TEST_CASE("properties on random positive-definite instances") {
    std::mt19937_64 rng(9001);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + trial % 8;
        const SymMatrix a = testing::random_spd(rng, n, 0.05);
        const SymMatrix h = inverse_spd(a);
        const Vector q = testing::random_positive(rng, n);
        const QuadrantProblem p(h, Vector::Zero(n), q);
        const QpSolution s = solve_quadrant(p);
        check_kkt(p, s);

        // Weak duality for random nonnegative weights.
        std::exponential_distribution<double> expo(1.0);
        for (int k = 0; k < 20; ++k) {
            Vector w(n);
            for (int i = 0; i < n; ++i) w(i) = expo(rng);
            CHECK(dual_ratio(a, q, w) <= s.value + 1e-9);
        }
        // Strong duality at w* = A^{-1} v*.
        CHECK(rel_diff(dual_ratio(a, q, s.w_star.cwiseMax(0.0)), s.value) < 1e-9);

        // Monotone in the bound, homogeneous of degree 2.
        const Vector bigger = q + testing::random_positive(rng, n, 0.0, 1.0);
        CHECK(solve_quadrant(QuadrantProblem(h, Vector::Zero(n), bigger)).value >= s.value - 1e-12);
        const double c = 0.5 + trial % 5;
        CHECK(rel_diff(solve_quadrant(QuadrantProblem(h, Vector::Zero(n), c * q)).value,
                       c * c * s.value) < 1e-10);

        // Drift offsets: agreement with the enumeration oracle.
        const Vector d = testing::random_positive(rng, n, -1.0, 1.0);
        const QuadrantProblem pd(h, d, q);
        CHECK(rel_diff(solve_quadrant(pd).value, brute_force_active_sets(pd).value) < 1e-9);
    }
}

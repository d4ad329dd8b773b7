#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "percept/matrix_functions.hpp"
#include "percept/ode.hpp"
#include "percept/quadrature.hpp"

using namespace percept;
using namespace percept::numerics;

namespace {

double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).max_abs(); }

// Deterministic uniform draws for property sweeps.
struct TestRng {
    std::mt19937_64 eng;
    explicit TestRng(std::uint64_t seed) : eng(seed) {}
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
    }
    Mat matrix(std::size_t r, std::size_t c, double lo, double hi) {
        Mat m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }
};

} // namespace

TEST_CASE("mat_exp fixtures") {
    SUBCASE("exp of the zero matrix is the identity") {
        const Mat Z(2, 2);
        CHECK(max_abs_diff(mat_exp(Z, 5.0), Mat::identity(2)) == 0.0);
    }
    SUBCASE("nilpotent series terminates: exp([[0,1],[0,0]] s) = [[1,s],[0,1]]") {
        const Mat A(2, 2, {0.0, 1.0, 0.0, 0.0});
        for (double s : {0.25, 1.0, 3.5, -2.0}) {
            const Mat E = mat_exp(A, s);
            CHECK(E(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(E(0, 1) == doctest::Approx(s).epsilon(1e-14));
            CHECK(E(1, 0) == doctest::Approx(0.0).epsilon(1e-14));
            CHECK(E(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    SUBCASE("diagonal case") {
        const Mat A(2, 2, {-1.0, 0.0, 0.0, -2.0});
        const Mat E = mat_exp(A, 1.0);
        CHECK(E(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
        CHECK(E(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
        CHECK(std::abs(E(0, 1)) < 1e-15);
        CHECK(std::abs(E(1, 0)) < 1e-15);
    }
    SUBCASE("non-square input is rejected") {
        CHECK_THROWS_AS(mat_exp(Mat(2, 3), 1.0), DimensionError);
    }
}

TEST_CASE("mat_exp semigroup property on random fixtures") {
    TestRng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const Mat A = rng.matrix(n, n, -2.0, 2.0);
        const double s = rng.uniform(-1.5, 1.5), t = rng.uniform(-1.5, 1.5);
        const Mat lhs = mat_exp(A, s) * mat_exp(A, t);
        const Mat rhs = mat_exp(A, s + t);
        CHECK(max_abs_diff(lhs, rhs) < 1e-9 * std::max(1.0, rhs.max_abs()));
    }
}

TEST_CASE("eig_small fixtures") {
    SUBCASE("identity has double eigenvalue 1") {
        const auto eig = eig_small(Mat::identity(2));
        CHECK(eig[0] == Complex(1.0, 0.0));
        CHECK(eig[1] == Complex(1.0, 0.0));
    }
    SUBCASE("reduced-dynamics linearization at f=k=R=1: -2 +- sqrt 2") {
        const Mat A(2, 2, {0.0, -1.0, 2.0, -4.0});
        const auto eig = eig_small(A);
        CHECK(eig[0].real() == doctest::Approx(-2.0 - std::sqrt(2.0)).epsilon(1e-12));
        CHECK(eig[1].real() == doctest::Approx(-2.0 + std::sqrt(2.0)).epsilon(1e-12));
        CHECK(eig[0].imag() == 0.0);
    }
    SUBCASE("closed-loop matrix of the gain example: -3/2 +- i/2") {
        const Mat A(2, 2, {-1.5, 0.5, -0.5, -1.5});
        const auto eig = eig_small(A);
        CHECK(eig[0].real() == doctest::Approx(-1.5).epsilon(1e-12));
        CHECK(eig[0].imag() == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(eig[1].imag() == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("n > 4 is rejected") {
        CHECK_THROWS_AS(eig_small(Mat::identity(5)), UnsupportedSizeError);
    }
}

TEST_CASE("eig_small characteristic polynomial residual below 1e-9") {
    TestRng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        const Mat A = rng.matrix(n, n, -3.0, 3.0);
        const auto coeffs = char_poly_coeffs(A);
        for (const Complex& z : eig_small(A))
            CHECK(std::abs(eval_monic(coeffs, z)) < 1e-9);
    }
}

TEST_CASE("is_hurwitz") {
    CHECK(is_hurwitz(Mat(2, 2, {-1.0, 0.0, 0.0, -1.0})));
    CHECK_FALSE(is_hurwitz(Mat(2, 2, {0.0, 1.0, 0.0, 0.0}))); // marginal double integrator
    CHECK(is_hurwitz(Mat(2, 2, {-1.5, 0.5, -0.5, -0.5})));    // eigenvalues -1, -1
    CHECK_FALSE(is_hurwitz(Mat(2, 2, {0.0, -1.0, 1.0, 0.0}))); // pure oscillator
}

TEST_CASE("integrate_ode fixtures") {
    SUBCASE("zero field keeps the state constant") {
        VectorField f = [](double, const Vec&, Vec& d) { d[0] = 0.0; d[1] = 0.0; };
        const auto traj = integrate_ode(f, Vec{1.0, 2.0}, 0.0, 2.0, 0.1);
        CHECK(traj.final_state()[0] == 1.0);
        CHECK(traj.final_state()[1] == 2.0);
        CHECK(traj.final_time() == 2.0);
    }
    SUBCASE("scalar linear decay hits e^-1") {
        VectorField f = [](double, const Vec& x, Vec& d) { d[0] = -x[0]; };
        const auto traj = integrate_ode(f, Vec{1.0}, 0.0, 1.0, 1e-3);
        CHECK(std::abs(traj.final_state()[0] - std::exp(-1.0)) < 1e-9);
    }
    SUBCASE("double integrator matches the matrix exponential") {
        const Mat A(2, 2, {0.0, 1.0, 0.0, 0.0});
        VectorField f = [&](double, const Vec& x, Vec& d) {
            d[0] = x[1];
            d[1] = 0.0;
        };
        const auto traj = integrate_ode(f, Vec{0.0, 1.0}, 0.0, 1.0, 1e-3);
        CHECK(traj.final_state()[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(traj.final_state()[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("final step lands exactly on t1") {
        VectorField f = [](double, const Vec&, Vec& d) { d[0] = 1.0; };
        const auto traj = integrate_ode(f, Vec{0.0}, 0.0, 0.35, 0.1);
        CHECK(traj.final_time() == 0.35);
        CHECK(traj.size() == 5); // 0, .1, .2, .3, .35
    }
    SUBCASE("parameter errors") {
        VectorField f = [](double, const Vec&, Vec& d) { d[0] = 0.0; };
        CHECK_THROWS_AS(integrate_ode(f, Vec{0.0}, 0.0, 1.0, -0.1), ParameterError);
        CHECK_THROWS_AS(integrate_ode(f, Vec{0.0}, 1.0, 1.0, 0.1), ParameterError);
    }
    SUBCASE("divergence carries the last valid time") {
        VectorField f = [](double, const Vec& x, Vec& d) { d[0] = x[0] * x[0]; };
        try {
            integrate_ode(f, Vec{1.0}, 0.0, 5.0, 1e-2); // finite-time blowup at t = 1
            FAIL("expected DivergenceError");
        } catch (const DivergenceError& e) {
            CHECK(e.last_valid_time > 0.5);
            CHECK(e.last_valid_time < 1.5);
        }
    }
}

TEST_CASE("RK4 matches mat_exp on linear fixtures to 1e-7") {
    TestRng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const Mat A = rng.matrix(2, 2, -1.5, 1.5);
        const Vec x0{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        VectorField f = [&](double, const Vec& x, Vec& d) {
            d[0] = A(0, 0) * x[0] + A(0, 1) * x[1];
            d[1] = A(1, 0) * x[0] + A(1, 1) * x[1];
        };
        const auto traj = integrate_ode(f, x0, 0.0, 1.0, 1e-3);
        const Vec expected = mat_exp(A, 1.0) * x0;
        CHECK((traj.final_state() - expected).norm_inf() < 1e-7);
    }
}

TEST_CASE("Simpson quadrature") {
    SUBCASE("constant integrand") {
        CHECK(quad_simpson([](double) { return 1.0; }, 0.0, 1.0, 4) ==
              doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("exact for s^2 with two panels") {
        CHECK(quad_simpson([](double s) { return s * s; }, 0.0, 1.0, 2) ==
              doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("odd panel count is rejected") {
        CHECK_THROWS_AS(quad_simpson([](double) { return 1.0; }, 0.0, 1.0, 3),
                        ParameterError);
    }
    SUBCASE("double-integrator Gramian integrand matches the symbolic integral") {
        // int_0^T [[s^2, s], [s, 1]] ds = [[T^3/3, T^2/2], [T^2/2, T]]
        for (double T : {0.5, 1.0, 2.0}) {
            const Mat W = quad_simpson(
                [](double s) { return Mat(2, 2, {s * s, s, s, 1.0}); }, 0.0, T, 64);
            CHECK(W(0, 0) == doctest::Approx(T * T * T / 3.0).epsilon(1e-12));
            CHECK(W(0, 1) == doctest::Approx(T * T / 2.0).epsilon(1e-12));
            CHECK(W(1, 1) == doctest::Approx(T).epsilon(1e-12));
        }
    }
}

TEST_CASE("solve_linear and min_norm_solve") {
    SUBCASE("identity system") {
        const Vec x = solve_linear(Mat::identity(2), Vec{3.0, 4.0});
        CHECK(x[0] == 3.0);
        CHECK(x[1] == 4.0);
    }
    SUBCASE("singular matrix reports the pivot") {
        const Mat S(2, 2, {1.0, 2.0, 2.0, 4.0});
        CHECK_THROWS_AS(solve_linear(S, Vec{1.0, 1.0}), SingularMatrixError);
    }
    SUBCASE("pseudo-drift of the three-channel system") {
        // B^T (B B^T)^{-1} A = [[0,-1/3],[0,2/3],[0,1/3]]
        const Mat B(2, 3, {0.0, 1.0, 1.0, 1.0, 0.0, 1.0});
        const Mat A(2, 2, {0.0, 1.0, 0.0, 0.0});
        const Mat R = min_norm_solve(B, A);
        const Mat expected(3, 2, {0.0, -1.0 / 3.0, 0.0, 2.0 / 3.0, 0.0, 1.0 / 3.0});
        CHECK(max_abs_diff(R, expected) < 1e-14);
        CHECK(rank(B) == 2);
    }
    SUBCASE("min-norm solutions satisfy A X = rhs") {
        TestRng rng(5);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 2, m = n + 1 + static_cast<std::size_t>(trial % 2);
            Mat A = rng.matrix(n, m, -2.0, 2.0);
            if (rank(A) < n) continue;
            const Mat rhs = rng.matrix(n, 2, -2.0, 2.0);
            const Mat X = min_norm_solve(A, rhs);
            CHECK(max_abs_diff(A * X, rhs) < 1e-10);
        }
    }
    SUBCASE("rank-deficient wide matrix is rejected") {
        const Mat A(2, 3, {1.0, 2.0, 3.0, 2.0, 4.0, 6.0});
        CHECK_THROWS_AS(min_norm_solve(A, Mat::identity(2)), RankError);
    }
}

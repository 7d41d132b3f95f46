#include <doctest.h>

#include <cmath>
#include <random>

#include "gjc/fock_math.hpp"
#include "oracles.hpp"

using namespace gjc;

TEST_CASE("FockSpace layout is spin-major") {
    const FockSpace space(4);
    CHECK(space.dim() == 8);
    CHECK(space.index(Spin::down, 0) == 0);
    CHECK(space.index(Spin::down, 3) == 3);
    CHECK(space.index(Spin::up, 0) == 4);
    CHECK(space.index(Spin::up, 3) == 7);
    CHECK_THROWS_AS(space.index(Spin::up, 4), std::out_of_range);
    CHECK_THROWS_AS(FockSpace(1), std::invalid_argument);
}

TEST_CASE("laguerre_poly closed values") {
    for (int l : {-0, 1, 3, 7}) {
        for (double x : {-2.0, 0.0, 0.7, 15.0}) {
            CHECK(laguerre_poly(0, l, x) == 1.0);
        }
    }
    CHECK(laguerre_poly(1, 0, 0.0) == 1.0);
    CHECK(laguerre_poly(1, 0, 2.5) == doctest::Approx(-1.5));

    // Rodrigues oracle in exact arithmetic gives exactly 1/16.
    CHECK(oracle::laguerre_rodrigues(3, 2, oracle::exact(1.5)) == oracle::rational(1, 16));
    CHECK(laguerre_poly(3, 2, 1.5) == doctest::Approx(0.0625).epsilon(1e-15));

    // Negative order: L_2^{-2}(x) = x²/2.
    CHECK(laguerre_poly(2, -2, 3.0) == doctest::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("laguerre_poly domain errors") {
    CHECK_THROWS_AS(laguerre_poly(-1, 0, 1.0), std::domain_error);
    CHECK_THROWS_AS(laguerre_poly(2, -3, 1.0), std::domain_error);
    CHECK_THROWS_AS(laguerre_poly(2, 0, NAN), std::domain_error);
}

TEST_CASE("laguerre_poly matches the exact Rodrigues oracle") {
    // 1e-12 relative to the exact value. Next to a root the achievable
    // accuracy is set by the cancellation scale Σ|term_j| instead.
    std::mt19937_64 rng(20240501);
    std::uniform_int_distribution<int> deg(0, 30);
    std::uniform_real_distribution<double> xs(-20.0, 20.0);
    int near_root = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = deg(rng);
        const int l = std::uniform_int_distribution<int>(-n, 12)(rng);
        const double x = xs(rng);
        const double ref = oracle::laguerre_rodrigues(n, l, x);
        const double scale = oracle::laguerre_term_scale(n, l, x);
        const double got = laguerre_poly(n, l, x);
        if (std::abs(ref) >= 1e-9 * scale) {
            CHECK(std::abs(got - ref) <= 1e-12 * std::abs(ref));
        } else {
            ++near_root;
            CHECK(std::abs(got - ref) <= 1e-16 * scale);
        }
    }
    MESSAGE("near-root samples: " << near_root);
}

TEST_CASE("laguerre_transition closed values") {
    CHECK(laguerre_transition(0, 0, 0.0) == 1.0);
    CHECK(laguerre_transition(3, 3, 0.0) == 1.0);
    CHECK(laguerre_transition(3, 1, 0.0) == 0.0);
    CHECK(laguerre_transition(1, 0, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(laguerre_transition(2, 5, 0.3) == -laguerre_transition(5, 2, 0.3));
    CHECK_THROWS_AS(laguerre_transition(1, 0, -0.1), std::domain_error);
}

TEST_CASE("laguerre_transition survives large indices") {
    // I_{s,0}(α) = e^{−α/2} α^{s/2} / √s!
    const double alpha = 1.7;
    const int s = 500;
    const double expected = std::exp(-0.5 * alpha + 0.5 * s * std::log(alpha) - 0.5 * std::lgamma(s + 1.0));
    const double got = laguerre_transition(s, 0, alpha);
    REQUIRE(std::isfinite(got));
    CHECK(got == doctest::Approx(expected).epsilon(1e-11));
    CHECK(std::isfinite(laguerre_transition(480, 500, 0.5)));
    CHECK(std::isfinite(laguerre_transition(500, 500, 60.0)));
}

TEST_CASE("laguerre_transition unitarity over the truncated basis") {
    for (int big_n = 0; big_n <= 20; big_n += 4) {
        for (double alpha : {0.0, 0.01, 0.5, 2.0, 4.0}) {
            const int n_max = big_n + static_cast<int>(std::ceil(10.0 * alpha)) + 50;
            double sum = 0.0;
            for (int m = 0; m < n_max; ++m) {
                const double i = laguerre_transition(big_n, m, alpha);
                sum += i * i;
            }
            CHECK(std::abs(sum - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("laguerre_transition antisymmetry is exact") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> idx(0, 60);
    std::uniform_real_distribution<double> al(0.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        const int s = idx(rng);
        const int sp = idx(rng);
        const double a = al(rng);
        const double sign = ((s - sp) % 2 == 0) ? 1.0 : -1.0;
        CHECK(laguerre_transition(s, sp, a) - sign * laguerre_transition(sp, s, a) == 0.0);
    }
}

TEST_CASE("displacement_matrix") {
    const FockSpace space(40);

    SUBCASE("zero displacement is the identity") {
        const auto d = displacement_matrix(DisplacementAmplitude(0.0), space);
        CHECK((d - Eigen::MatrixXcd::Identity(40, 40)).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("matches the matrix exponential of the generator") {
        for (double beta : {-1.3, -0.2, 0.4, 1.0, 2.0}) {
            const auto d = displacement_matrix(DisplacementAmplitude(beta), space);
            const Eigen::MatrixXd ref = oracle::displacement_expm(beta, 40);
            CHECK((d.real() - ref).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(d.imag().cwiseAbs().maxCoeff() == 0.0);
        }
    }

    SUBCASE("D(beta) D(-beta) is the identity away from the cut") {
        const FockSpace big(120);
        const auto d = displacement_matrix(DisplacementAmplitude(0.8), big);
        const auto dinv = displacement_matrix(DisplacementAmplitude(-0.8), big);
        const Eigen::MatrixXcd prod = d * dinv;
        CHECK((prod.topLeftCorner(60, 60) - Eigen::MatrixXcd::Identity(60, 60)).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("columns have unit norm when |beta|^2 << n_max") {
        const auto d = displacement_matrix(DisplacementAmplitude(1.1), space);
        for (int n = 0; n < 10; ++n) {
            CHECK(std::abs(d.col(n).squaredNorm() - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("displaced_fock") {
    const FockSpace space(60);

    SUBCASE("vacuum at zero displacement") {
        const auto v = displaced_fock(0, DisplacementAmplitude(0.0), space);
        CHECK(v(0) == std::complex<double>(1.0, 0.0));
        CHECK(v.tail(59).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("displaced vacuum has Poisson statistics with mean beta^2") {
        for (double b : {0.3, -1.5, 2.5}) {
            const auto v = displaced_fock(0, DisplacementAmplitude(b), space);
            double mean = 0.0;
            for (int m = 0; m < 60; ++m) {
                CHECK(std::norm(v(m)) == doctest::Approx(oracle::poisson(b * b, m)).epsilon(1e-12));
                mean += m * std::norm(v(m));
            }
            CHECK(mean == doctest::Approx(b * b).epsilon(1e-10));
        }
    }

    SUBCASE("column of the displacement operator") {
        const auto v = displaced_fock(2, DisplacementAmplitude(0.4), space);
        const auto d = displacement_matrix(DisplacementAmplitude(0.4), space);
        CHECK((v - d.col(2)).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::MatrixXd ref = oracle::displacement_expm(0.4, 60);
        CHECK((v.real() - ref.col(2)).cwiseAbs().maxCoeff() < 1e-13);
    }

    SUBCASE("component convention for the two ladders") {
        const double a = 0.09;
        // +beta: components I_{M,N}; −beta: components I_{N,M}
        const auto up = displaced_fock(3, DisplacementAmplitude(-0.3), space);
        const auto down = displaced_fock(3, DisplacementAmplitude(0.3), space);
        for (int m = 0; m < 20; ++m) {
            CHECK(down(m).real() == laguerre_transition(m, 3, a));
            CHECK(up(m).real() == doctest::Approx(laguerre_transition(3, m, a)).epsilon(1e-15));
        }
    }

    SUBCASE("orthonormal for fixed beta") {
        const DisplacementAmplitude b(0.7);
        for (std::size_t m = 0; m < 8; ++m) {
            for (std::size_t n = 0; n < 8; ++n) {
                const auto ip = displaced_fock(m, b, space).dot(displaced_fock(n, b, space));
                CHECK(std::abs(ip - (m == n ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }

    SUBCASE("out-of-range index") {
        CHECK_THROWS_AS(displaced_fock(60, DisplacementAmplitude(0.1), space), std::out_of_range);
    }
}

TEST_CASE("truncation diagnostics") {
    const FockSpace small(12);
    CHECK(is_resolved(0, DisplacementAmplitude(0.1), small));
    CHECK_FALSE(is_resolved(10, DisplacementAmplitude(1.0), small));
    CHECK(truncation_loss(10, DisplacementAmplitude(1.0), small) > 1e-3);
    CHECK(is_resolved(10, DisplacementAmplitude(1.0), small, 0.9));
    CHECK(recommended_n_max(20, 2.0) == 110);
}

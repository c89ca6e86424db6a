#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "specsense/special_functions.hpp"

using Catch::Matchers::WithinAbs;
using namespace specsense;

TEST_CASE("gaussian_q basic values and symmetry") {
    REQUIRE_THAT(gaussian_q(0.0), WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(gaussian_q(1.2815515655446004), WithinAbs(0.1, 1e-12));
    for (double x = -6.0; x <= 6.0; x += 0.25)
        REQUIRE_THAT(gaussian_q(x) + gaussian_q(-x), WithinAbs(1.0, 1e-14));
    REQUIRE(gaussian_q(40.0) == 0.0);
    REQUIRE(gaussian_q(-40.0) == 1.0);
}

TEST_CASE("gaussian_q is monotone decreasing") {
    double previous = 1.0;
    for (double x = -8.0; x <= 8.0; x += 0.125) {
        const double value = gaussian_q(x);
        REQUIRE(value <= previous);
        previous = value;
    }
}

TEST_CASE("gaussian_q_inv anchor and round trip") {
    REQUIRE_THAT(gaussian_q_inv(0.1), WithinAbs(1.2815515655446004, 1e-12));
    REQUIRE_THAT(gaussian_q_inv(0.5), WithinAbs(0.0, 1e-14));
    for (double p = 0.0005; p < 1.0; p += 0.0125) {
        const double x = gaussian_q_inv(p);
        REQUIRE_THAT(gaussian_q(x), WithinAbs(p, 1e-12));
    }
    // Extreme tails still round-trip to relative precision.
    for (double p : {1e-10, 1e-14, 1.0 - 1e-10}) {
        const double x = gaussian_q_inv(p);
        REQUIRE(std::fabs(gaussian_q(x) - p) <= 1e-6 * p + 1e-15);
    }
    REQUIRE_THROWS_AS(gaussian_q_inv(0.0), std::domain_error);
    REQUIRE_THROWS_AS(gaussian_q_inv(1.0), std::domain_error);
    REQUIRE_THROWS_AS(gaussian_q_inv(-0.3), std::domain_error);
}

TEST_CASE("reg_upper_gamma anchors") {
    REQUIRE_THAT(reg_upper_gamma(2.5, 3.0), WithinAbs(0.3062189184132784, 1e-12));
    REQUIRE_THAT(reg_upper_gamma(10.0, 10.0), WithinAbs(0.4579297144718522, 1e-12));
    // Exponential special case: a = 1 gives exp(-x).
    REQUIRE_THAT(reg_upper_gamma(1.0, std::log(2.0)), WithinAbs(0.5, 1e-12));
    REQUIRE(reg_upper_gamma(3.0, 0.0) == 1.0);
    REQUIRE_THAT(reg_upper_gamma(1.0, 700.0), WithinAbs(0.0, 1e-300));
}

TEST_CASE("reg_upper_gamma is a survival function in x") {
    for (double a : {0.5, 1.0, 2.5, 10.0, 50.0}) {
        double previous = 1.0;
        for (double x = 0.0; x <= 4.0 * a + 20.0; x += a / 4.0 + 0.25) {
            const double value = reg_upper_gamma(a, x);
            REQUIRE(value >= 0.0);
            REQUIRE(value <= previous + 1e-14);
            previous = value;
        }
    }
    REQUIRE_THROWS_AS(reg_upper_gamma(0.0, 1.0), std::domain_error);
    REQUIRE_THROWS_AS(reg_upper_gamma(2.0, -1.0), std::domain_error);
}

TEST_CASE("reg_upper_gamma is smooth across the series/fraction crossover") {
    // The implementation switches algorithms at x = a + 1; values on both
    // sides of the seam must agree to the step size.
    for (double a : {1.5, 4.0, 12.0}) {
        const double left = reg_upper_gamma(a, a + 1.0 - 1e-9);
        const double right = reg_upper_gamma(a, a + 1.0 + 1e-9);
        REQUIRE_THAT(left, WithinAbs(right, 1e-8));
    }
}

TEST_CASE("marcum_q anchors") {
    REQUIRE_THAT(marcum_q(1, 0.0, 1.0), WithinAbs(0.6065306597126334, 1e-10));
    REQUIRE_THAT(marcum_q(2, 1.5, 2.0), WithinAbs(0.6552779002523661, 1e-10));
    REQUIRE_THAT(marcum_q(5, 3.0, 4.0), WithinAbs(0.6175189941220039, 1e-10));
    REQUIRE_THAT(marcum_q(10, 2.0, 6.0), WithinAbs(0.06735231019825783, 1e-10));
    REQUIRE_THAT(marcum_q(1, 0.5, 1.0), WithinAbs(0.6427142302725438, 1e-10));
}

TEST_CASE("marcum_q edge behaviour") {
    REQUIRE(marcum_q(3, 1.0, 0.0) == 1.0);
    // Zero non-centrality reduces to the chi-square survival function.
    REQUIRE_THAT(marcum_q(4, 0.0, 2.0), WithinAbs(0.8571234604985470, 1e-12));
    // ... continuously: a tiny non-centrality must land next to it.
    REQUIRE_THAT(marcum_q(4, 1e-8, 2.0), WithinAbs(0.8571234604985470, 1e-9));
    REQUIRE_THROWS_AS(marcum_q(0, 1.0, 1.0), std::domain_error);
    REQUIRE_THROWS_AS(marcum_q(2, -1.0, 1.0), std::domain_error);
    REQUIRE_THROWS_AS(marcum_q(2, 1.0, -1.0), std::domain_error);
}

TEST_CASE("marcum_q is monotone in its arguments") {
    // Increasing the threshold lowers the tail; increasing the
    // non-centrality raises it; more degrees of freedom raise it.
    for (int m : {1, 3, 8}) {
        double previous = 1.0;
        for (double b = 0.0; b <= 12.0; b += 0.5) {
            const double value = marcum_q(m, 2.0, b);
            REQUIRE(value >= 0.0);
            REQUIRE(value <= 1.0);
            REQUIRE(value <= previous + 1e-12);
            previous = value;
        }
    }
    double previous = 0.0;
    for (double a = 0.0; a <= 8.0; a += 0.5) {
        const double value = marcum_q(2, a, 3.0);
        REQUIRE(value + 1e-12 >= previous);
        previous = value;
    }
    previous = 0.0;
    for (int m = 1; m <= 30; ++m) {
        const double value = marcum_q(m, 1.5, 4.0);
        REQUIRE(value + 1e-12 >= previous);
        previous = value;
    }
}

TEST_CASE("clamp01 saturates") {
    REQUIRE(clamp01(-0.5) == 0.0);
    REQUIRE(clamp01(1.5) == 1.0);
    REQUIRE(clamp01(0.25) == 0.25);
}

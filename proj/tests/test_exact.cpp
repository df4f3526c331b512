#include "doctest.h"

#include "pflow/errors.hpp"
#include "pflow/exact.hpp"

#include <cmath>

using namespace pflow;
using doctest::Approx;

namespace {
constexpr double kE = 2.718281828459045235;
} // namespace

TEST_SUITE("exact") {

TEST_CASE("Lambert W: pinned values and the defining identity") {
    CHECK(exact::lambert_w0(0.0) == 0.0);
    CHECK(exact::lambert_w0(kE) == Approx(1.0).epsilon(1e-15));
    CHECK(exact::lambert_w0(-1.0 / kE) == Approx(-1.0).epsilon(1e-12));
    // W(-1/(2 sqrt(e))) = -1/2 (middle of the branch)
    CHECK(exact::lambert_w0(-0.5 / std::sqrt(kE)) == Approx(-0.5).epsilon(1e-12));
    CHECK_THROWS_AS(exact::lambert_w0(-0.4), OutOfBranch);

    // w e^w returns x across the branch, 10^4-point grid on [-1/e, 10]
    const int n = 10000;
    const double lo = -1.0 / kE, hi = 10.0;
    for (int i = 0; i <= n; ++i) {
        double x = lo + (hi - lo) * i / n;
        double w = exact::lambert_w0(x);
        CHECK(w >= -1.0);
        double back = w * std::exp(w);
        CHECK(std::fabs(back - x) <= 1e-13 * std::max(1.0, std::fabs(x)));
    }
}

TEST_CASE("plateau radius: initial value, ODE residual, monotonicity") {
    CHECK(exact::plateau_radius(0.0) == Approx(0.5).epsilon(1e-13));

    // (1/(1-r) - t/r) r' = 1 via central differences
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
        double dt = 1e-5;
        double rp = (exact::plateau_radius(t + dt) - exact::plateau_radius(t - dt)) / (2 * dt);
        double r = exact::plateau_radius(t);
        double res = (1.0 / (1.0 - r) - t / r) * rp - 1.0;
        CHECK(std::fabs(res) <= 1e-6);
    }

    double prev = exact::plateau_radius(0.0);
    for (int i = 1; i <= 500; ++i) {
        double r = exact::plateau_radius(i * 0.01);
        CHECK(r > prev);
        CHECK(r < 1.0);
        prev = r;
    }
}

TEST_CASE("plateau profile values") {
    CHECK(exact::plateau_value(0.0, 0.5) == 0.0);
    CHECK(exact::plateau_value(0.0, 0.75) == Approx(std::log(3.0)).epsilon(1e-15));
    CHECK(exact::plateau_value(1.0, 0.9) == Approx(std::log(9.0) + 1.0 / 0.9).epsilon(1e-15));
    CHECK(exact::plateau_level(0.7) == Approx(exact::plateau_value(0.7, 0.0)).epsilon(1e-15));

    // constant on the flat region, nondecreasing in rho
    double r = exact::plateau_radius(1.0);
    CHECK(exact::plateau_value(1.0, 0.0) == Approx(exact::plateau_value(1.0, 0.9 * r)));
    double last = -1e300;
    for (int i = 0; i < 99; ++i) {
        double v = exact::plateau_value(1.0, i / 100.0);
        CHECK(v >= last - 1e-14);
        last = v;
    }

    CHECK_THROWS_AS(exact::plateau_value(1.0, 1.0), BadRange);
    CHECK_THROWS_AS(exact::plateau_value(1.0, -0.1), BadRange);
}

TEST_CASE("blow-up exponents and the half-space amplitude") {
    CHECK(exact::barrier_time_exponent(1.5) == Approx(2.0).epsilon(1e-15));
    CHECK(exact::barrier_distance_exponent(1.5) == Approx(3.0).epsilon(1e-15));
    CHECK(exact::barrier_time_exponent(1.2) == Approx(1.25).epsilon(1e-15));
    CHECK(exact::barrier_distance_exponent(1.2) == Approx(1.5).epsilon(1e-15));
    CHECK(exact::barrier_time_exponent(1.0) == Approx(1.0).epsilon(1e-15));

    // A solves a A = A^{p-1} b^{p-1} (b+1) (p-1) with a = 1/(2-p), b = p/(2-p)
    for (double p : {1.3, 1.5, 1.7}) {
        double A = exact::barrier_halfspace_amplitude(p);
        CHECK(A > 0.0);
        double a = 1.0 / (2.0 - p), b = p / (2.0 - p);
        double lhs = a * A;
        double rhs = std::pow(A, p - 1.0) * std::pow(b, p - 1.0) * (b + 1.0) * (p - 1.0);
        CHECK(lhs == Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("barrier evaluation") {
    CHECK(exact::barrier(1.2, 0.0, 0.5, 1000.0) == 0.0);
    CHECK(exact::barrier(1.2, 2.0, 0.5, 1.0) ==
          Approx(std::pow(2.0, 1.25) * std::pow(0.5, -1.5)).epsilon(1e-14));
    CHECK_THROWS_AS(exact::barrier(2.0, 1.0, 0.5, 1.0), BadExponent);
    CHECK_THROWS_AS(exact::barrier(0.9, 1.0, 0.5, 1.0), BadExponent);
    CHECK_THROWS_AS(exact::barrier(1.0, 1.0, 0.5, 1.0), BadExponent);

    // increasing in t, blowing up as d -> 0
    CHECK(exact::barrier(1.5, 2.0, 0.3, 1.0) > exact::barrier(1.5, 1.0, 0.3, 1.0));
    CHECK(exact::barrier(1.5, 1.0, 0.1, 1.0) > exact::barrier(1.5, 1.0, 0.2, 1.0));
}

TEST_CASE("growth rate of the flat large solution") {
    CHECK(exact::calibrable_rate(ConvexShape::disk({0.0, 0.0}, 1.0)) == Approx(2.0).epsilon(1e-15));
    CHECK(exact::calibrable_rate(ConvexShape::disk({0.0, 0.0}, 0.5)) == Approx(4.0).epsilon(1e-15));
    CHECK(exact::calibrable_rate(ConvexShape::rectangle({0.0, 0.0}, {1.0, 1.0})) ==
          Approx(4.0).epsilon(1e-15));
    CHECK(exact::calibrable_rate(ConvexShape::rectangle({0.0, 0.0}, {2.0, 1.0})) ==
          Approx(3.0).epsilon(1e-15));
}

} // TEST_SUITE("exact")

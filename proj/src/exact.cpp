#include "pflow/exact.hpp"

#include "pflow/errors.hpp"

#include <cmath>

namespace pflow::exact {

double lambert_w0(double x) {
    const double branch = -std::exp(-1.0);
    if (x < branch) {
        if (x > branch - 1e-12 * std::fabs(branch)) {
            x = branch;
        } else {
            throw OutOfBranch("lambert_w0: argument below -1/e");
        }
    }
    if (x == 0.0) return 0.0;

    // Series at the branch point; enough terms that no iteration is needed
    // when the correction q is tiny (Halley degenerates there, W'(x) blows up).
    double q = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
    if (q < 1e-4) {
        return -1.0 + q * (1.0 + q * (-1.0 / 3.0 + q * (11.0 / 72.0 - q * 43.0 / 540.0)));
    }

    double w;
    if (x < -0.25) {
        w = -1.0 + q * (1.0 - q / 3.0);
    } else if (x < 2.0) {
        w = x * (1.0 + x * (-1.0 + x * 1.5)) / (1.0 + x * 0.5);
    } else {
        double l1 = std::log(x), l2 = std::log(std::log(x));
        w = l1 - l2 + l2 / l1;
    }

    for (int it = 0; it < 100; ++it) {
        double ew = std::exp(w);
        double f = w * ew - x;
        double d1 = ew * (1.0 + w);
        double step = f / (d1 - f * (2.0 + w) / (2.0 * (1.0 + w)));
        w -= step;
        if (std::fabs(step) <= 2e-16 * (1.0 + std::fabs(w))) return w;
    }
    throw NoConvergence("lambert_w0: Halley iteration stalled", 100, 0.0);
}

double plateau_radius(double t) {
    if (t < 0.0) throw BadRange("plateau_radius: negative time");
    double arg = -0.5 * (t + 1.0) * std::exp(-t - 0.5);
    return lambert_w0(arg) / (t + 1.0) + 1.0;
}

double plateau_value(double t, double rho) {
    if (rho < 0.0 || rho >= 1.0)
        throw BadRange("plateau_value: rho must lie in [0, 1)");
    double s = std::max(rho, plateau_radius(t));
    return std::log(s / (1.0 - s)) + t / s;
}

double plateau_level(double t) {
    double r = plateau_radius(t);
    return std::log(r / (1.0 - r)) + t / r;
}

double barrier_time_exponent(double p) {
    if (p < 1.0 || p >= 2.0) throw BadExponent("barrier exponents need 1 <= p < 2");
    return 1.0 / (2.0 - p);
}

double barrier_distance_exponent(double p) {
    if (p < 1.0 || p >= 2.0) throw BadExponent("barrier exponents need 1 <= p < 2");
    return p / (2.0 - p);
}

double barrier_halfspace_amplitude(double p) {
    if (p <= 1.0 || p >= 2.0) throw BadExponent("half-space amplitude needs 1 < p < 2");
    double a = barrier_time_exponent(p);
    double b = barrier_distance_exponent(p);
    // A solves a*A = A^(p-1) * b^(p-1) * (b+1) * (p-1)
    return std::pow(std::pow(b, p - 1.0) * (b + 1.0) * (p - 1.0) / a, 1.0 / (2.0 - p));
}

double barrier(double p, double t, double d, double C0) {
    if (p <= 1.0 || p >= 2.0) throw BadExponent("barrier needs 1 < p < 2");
    if (t < 0.0) throw BadRange("barrier: negative time");
    if (!(d > 0.0)) throw BadRange("barrier: distance must be positive");
    if (t == 0.0) return 0.0;
    return C0 * std::pow(t, barrier_time_exponent(p)) *
           std::pow(d, -barrier_distance_exponent(p));
}

double calibrable_rate(const ConvexShape& c) { return c.perimeter() / c.area(); }

} // namespace pflow::exact

#pragma once

#include "pflow/geom.hpp"

namespace pflow::exact {

// Principal branch of the Lambert W function (W >= -1, defined on
// [-1/e, inf)). Throws OutOfBranch below -1/e.
double lambert_w0(double x);

// Radially symmetric total-variation flow benchmark on the unit disk:
// initial datum 0 on rho <= 1/2 and log(rho/(1-rho)) outside, boundary
// datum +inf. The flat region's edge r(t) starts at 1/2 and obeys
// (1/(1-r) - t/r) r' = 1; in closed form
//   r(t) = W(-(t+1) e^{-t-1/2} / 2) / (t+1) + 1.
double plateau_radius(double t);
// Solution value u(t, rho) = b(t, max(rho, r(t))) with
// b(t, s) = log(s/(1-s)) + t/s. Requires 0 <= rho < 1.
double plateau_value(double t, double rho);
// b(t, r(t)): the value on the flat region.
double plateau_level(double t);

// Power-law boundary blow-up shape for 1 <= p < 2: the large solution with
// zero initial datum scales like t^a * d^-b near the boundary.
double barrier_time_exponent(double p);      // 1/(2-p)
double barrier_distance_exponent(double p);  // p/(2-p)
// Amplitude A of the exact half-space profile u = A t^a d^-b (1 < p < 2).
double barrier_halfspace_amplitude(double p);
// C0 * t^{1/(2-p)} * d^{-p/(2-p)}; requires 1 < p < 2, t >= 0, d > 0.
double barrier(double p, double t, double d, double C0);

// Slope of u(t) = (Per(C)/|C|) t, the large solution on a calibrable set.
double calibrable_rate(const ConvexShape& c);

} // namespace pflow::exact

#pragma once

#include "pflow/fastdiff.hpp"

#include <vector>

namespace pflow {

// Structural checks on computed trajectories: the truncation-entropy
// identity, order preservation / L1 contraction, the flat-datum growth
// bound, and the exact-linearity signature that separates p = 2 from the
// fast regime.

// Nondecreasing clamp with S(0) = 0 and derivative supported in [a, b].
// Smooth rises 0 -> 1 along a C^2 quintic ramp; Hard is the slope-one
// two-sided truncation.
struct SClamp {
    enum class Profile { Smooth, Hard };
    Profile profile = Profile::Smooth;
    double a = 0.0;
    double b = 1.0;

    static SClamp smooth(double a, double b);
    static SClamp hard(double a, double b);
    double operator()(double r) const;
};

// j(r) = integral from l to r of S(T_h(s) - T_h(l)) ds, the convex weight
// appearing under the time derivative of the entropy identity.
double entropy_j(const SClamp& S, double h_trunc, double l, double r);

// Nonnegative product bump eta(t, x) = phi(|x - center| / radius) *
// phi(time ramp), phi(s) = (1 - s^2)^4 on [-1, 1]; compactly supported in
// space and in (t0, t1).
struct SpaceTimeBump {
    Vec2 center{};
    double radius = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;

    double space(Vec2 p) const;
    double time_factor(double t) const;
    double operator()(double t, Vec2 p) const { return space(p) * time_factor(t); }
};

struct EntropyParams {
    SClamp S;
    double h_trunc = 1.0;  // truncation height inside S
    double l = 0.0;        // reference level
    SpaceTimeBump eta;
};

// Residual of the truncation-entropy identity on the trajectory's
// snapshots (trapezoid in time, two-point differences in space, eta
// evaluated at cell centers and face midpoints).
//   p > 1:  | sum eta a(grad u) . grad S + sum S a(grad u) . grad eta
//            - sum j(u) eta_t |
//   p = 1:  positive part of  - sum j(u) eta_t + sum eta |D S| +
//            sum S z . grad eta   (needs the trajectory's flux snapshots)
// Throws BadSupport unless eta vanishes on every near-boundary cell, at
// the boundary face midpoints, and at the first and last snapshot times.
// When signed_out is given it receives the discrete value before the
// positive-part / absolute-value reduction (diagnostic: its sign says
// which side of the inequality the quadrature error landed on).
double entropy_residual(const Trajectory& traj, const EntropyParams& ep,
                        double* signed_out = nullptr);

// max over matching snapshot times of
//   integral (u - v)^+ (t)  -  integral (u0 - v0)^+ ;
// nonpositive when the scheme contracts. Trajectories must share the mesh,
// snapshot times, and boundary datum.
double contraction_gap(const Trajectory& a, const Trajectory& b);

// p = 1 only: max over snapshots of  max u(t) - (max u0 + 2 t / s0),
// the flat-datum growth bound with interior-ball radius s0.
double sup_bound_gap(const Trajectory& traj);

// Run the flow from zero initial datum once per boundary level n and
// return the largest pairwise sup distance of u_n(T)/n over the cells at
// distance >= 4h. Zero (to solver tolerance) exactly when the equation is
// linear (p = 2).
double scaling_spread(const MeshPtr& mesh, double p, double T, double tau,
                      const std::vector<double>& levels, const StepControls& ctl = {});

// min over a small family of odd bounded nondecreasing clamps q of
//   sum q((u - ubar)/theta) (v - vbar) vol,
// theta swept below sup|u - ubar|; nonnegative when the resolvent pairs
// u = R(v), ubar = R(vbar) come from the same monotone operator.
double accretivity_gap(const Field& u, const Field& ubar, const Field& v, const Field& vbar);

} // namespace pflow

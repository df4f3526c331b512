#pragma once

#include "pflow/fastdiff.hpp"

#include <utility>
#include <vector>

namespace pflow {

// Total variation flow (p = 1) via eps-continuation: the resolvent
// u - tau div(grad u / sqrt(|grad u|^2 + eps^2)) = v is solved for each eps
// in a strictly decreasing schedule, warm-starting from the previous level.
// The returned face field z = grad u / sqrt(|grad u|^2 + eps_min^2) obeys
// |z| <= 1 up to solver slack.

std::vector<double> default_eps_schedule(double bval, double u0_sup, double diameter);

struct TvResult {
    Field u;
    FaceVector z;
};

TvResult tv_resolvent(const Field& v, double tau, double bval,
                      const std::vector<double>& eps_schedule,
                      const StepControls& ctl = {}, StepStats* stats = nullptr,
                      const Field* warm = nullptr);

Trajectory tv_evolve(const Field& u0, double T, double tau, double bval,
                     const std::vector<double>& eps_schedule,
                     const std::vector<double>& snapshot_times,
                     const StepControls& ctl = {});

// Min over boundary faces of the outward normal component of z. Values near
// 1 are the discrete shadow of the relaxed boundary condition of a large
// solution.
double boundary_trace_diagnostic(const FaceVector& z);

} // namespace pflow

#pragma once

#include "pflow/mesh.hpp"

#include <vector>

namespace pflow {

// Diffusion flux q = (|grad u|^2 + eps^2)^((p-2)/2) grad u. For p < 2 the
// coefficient blows up at flat gradients, so eps > 0 is mandatory there.
struct FluxParams {
    double p = 2.0;
    double eps = 0.0;

    void validate() const;
};

double flux_coefficient(double g2, const FluxParams& fp);

struct StepControls {
    double tol_picard = 1e-10;  // max-norm of successive Picard updates
    int max_picard = 400;
    // The relative CG residual sets the Picard noise floor at roughly
    // tol_lin times the datum, so it sits well under tol_picard even for
    // data of order 10^2.
    double tol_lin = 1e-13;
    int max_lin = 20000;
    // p = 1 continuation levels: the Picard tolerance is tv_tol_rel times
    // max(1, |bval|, sup|v|) — the near-degenerate diffusivity contracts too
    // slowly for the absolute p > 1 tolerance to be reachable.
    double tv_tol_rel = 1e-8;
    int tv_max_picard = 600;
};

struct StepStats {
    int picard = 0;
    long lin_iters = 0;
    double last_update = 0.0;
};

// One implicit Euler step: solve u - tau div(c(|grad u|) grad u) = v with
// Dirichlet value `bval` by lagged diffusivity. `warm` seeds the iteration
// (defaults to v).
Field resolvent_step(const Field& v, double tau, const FluxParams& fp, double bval,
                     const StepControls& ctl = {}, StepStats* stats = nullptr,
                     const Field* warm = nullptr);

struct Trajectory {
    MeshPtr mesh;
    double p = 2.0;
    double eps = 0.0;
    double tau = 0.0;
    double bval = 0.0;
    double T = 0.0;
    std::vector<double> eps_schedule;  // p = 1 runs only

    std::vector<Field> snaps;          // snaps[0] holds the initial datum at t = 0
    std::vector<FaceVector> z_snaps;   // p = 1: flux field at the snapshot times
    std::vector<FaceVector> z_steps;   // p = 1: flux field after every step
    std::vector<double> step_times;

    long picard_total = 0;
    long lin_total = 0;
    int picard_max = 0;
    double z_abs_max = 0.0;
    double z_trace_min = 0.0;
    double step_residual_max = 0.0;

    const Field& at_time(double t, double tol = 1e-9) const;
};

// Implicit Euler chain over [0, T]; snapshots are linearly interpolated
// between step times. snapshot_times must lie in [0, T].
Trajectory evolve(const Field& u0, double T, double tau, const FluxParams& fp, double bval,
                  const std::vector<double>& snapshot_times, const StepControls& ctl = {});

// Default regularization: 1e-6 of the run's value scale per unit diameter.
double default_eps(double bval, double u0_sup, double diameter);

// eps-regularized p-Dirichlet energy over all faces (boundary datum bval),
// the quantity the implicit stepping dissipates.
double flux_energy(const Field& u, const FluxParams& fp, double bval);

} // namespace pflow

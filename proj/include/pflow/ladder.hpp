#pragma once

#include "pflow/fastdiff.hpp"
#include "pflow/tvflow.hpp"

#include <functional>
#include <string>
#include <vector>

namespace pflow {

// Boundary-lift ladder. The flow is run with constant Dirichlet datum
// n_k = n0 * 2^k and initial datum min(u0, n_k) for k = 0..levels-1, and
// successive levels are compared on the monitor set K_delta of cells at
// distance >= delta from the boundary. For 1 <= p < 2 the levels increase
// and settle on K_delta (the limit is the large solution); for p >= 2 the
// interior values grow without bound.

enum class LadderClass { Converged, Diverging, Undecided };
std::string to_string(LadderClass c);

struct LadderConfig {
    double n0 = 4.0;
    int levels = 6;
    double delta = -1.0;  // monitor margin; < 0 selects 4h
    double tol_ladder = 1e-3;
    double tau = -1.0;  // < 0 selects T / 400
    int snapshots = 8;  // uniform on [0, T], endpoints included
    bool radial = false;
    int jobs = 1;
    double eps = -1.0;                 // 1 < p < 2; < 0 selects a per-level default
    std::vector<double> eps_schedule;  // p = 1; empty selects a per-level default
    StepControls controls{};
};

struct LadderLevel {
    double n = 0.0;
    bool failed = false;
    std::string error;
    Trajectory traj;
    std::vector<double> l1_K, sup_K;  // per snapshot, on the monitor set
    // Relative L1 gap to the previous level per snapshot (empty on level 0
    // or after a failure on either side).
    std::vector<double> diff_prev;
    // Positive part of max over K_delta of (previous - this), per snapshot;
    // zero when the discrete comparison principle holds exactly.
    std::vector<double> viol_prev;
    double violation = 0.0;  // max of viol_prev
};

struct LadderReport {
    MeshPtr mesh;
    double p = 2.0;
    double T = 0.0;
    double delta = 0.0;
    double tol_ladder = 1e-3;
    double tau = 0.0;
    Mask monitor;
    std::vector<double> snapshot_times;
    std::vector<LadderLevel> levels;
    LadderClass classification = LadderClass::Undecided;
};

// u0 must be nonnegative on the mesh (BadRange otherwise). cfg.jobs > 1
// runs the levels concurrently; per-level failures are recorded, not thrown.
LadderReport run_ladder(const DomainSpec& dom, const std::function<double(Vec2)>& u0,
                        double T, double p, const LadderConfig& cfg = {});

// Max over levels, snapshots and K_delta of (previous level - this level):
// <= 0 means the ladder is monotone. Needs >= 2 successful levels.
double monotone_check(const LadderReport& rep);

struct BarrierFit {
    double time_exponent = 0.0;      // ~ 1/(2-p) for 1 < p < 2
    double distance_exponent = 0.0;  // log-log slope vs distance, ~ -p/(2-p)
    int time_points = 0;
    int distance_bands = 0;
    double fit_time = 0.0;  // snapshot used for the distance fit
};

// Least-squares log-log slopes of the top level: value vs time at the
// deepest cell, and band-averaged value vs boundary distance at the
// earliest snapshot with enough unsaturated bands. Throws BadExponent
// outside 1 < p < 2 and InsufficientData when fewer than 4 usable points
// or bands exist.
BarrierFit barrier_exponent_fit(const LadderReport& rep);

} // namespace pflow

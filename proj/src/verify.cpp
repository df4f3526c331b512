#include "pflow/verify.hpp"

#include "pflow/errors.hpp"
#include "pflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace pflow {

SClamp SClamp::smooth(double a, double b) {
    if (!(a < b)) throw BadRange("SClamp: ramp needs a < b");
    return {Profile::Smooth, a, b};
}

SClamp SClamp::hard(double a, double b) {
    if (!(a < b)) throw BadRange("SClamp: ramp needs a < b");
    return {Profile::Hard, a, b};
}

double SClamp::operator()(double r) const {
    auto raw = [&](double x) {
        if (profile == Profile::Hard) return std::min(std::max(x, a), b);
        double t = (x - a) / (b - a);
        t = std::min(std::max(t, 0.0), 1.0);
        return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
    };
    return raw(r) - raw(0.0);
}

namespace {

double bump_profile(double s2) {
    if (s2 >= 1.0) return 0.0;
    double q = 1.0 - s2;
    return q * q * q * q;
}

// Adaptive Simpson on [a, b] (a <= b) with absolute tolerance.
double simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

} // namespace

double entropy_j(const SClamp& S, double h_trunc, double l, double r) {
    if (!(h_trunc > 0.0)) throw BadRange("entropy_j: truncation height must be positive");
    if (r == l) return 0.0;
    auto Th = [&](double s) { return std::min(std::max(s, -h_trunc), h_trunc); };
    const double thl = Th(l);
    std::function<double(double)> f = [&](double s) { return S(Th(s) - thl); };

    double lo = std::min(l, r), hi = std::max(l, r);
    // Integrand kinks: the truncation corners and where the inner argument
    // crosses the ends of the ramp of S.
    double cuts[4] = {-h_trunc, h_trunc, thl + S.a, thl + S.b};
    std::vector<double> pts{lo, hi};
    for (double c : cuts)
        if (c > lo && c < hi) pts.push_back(c);
    std::sort(pts.begin(), pts.end());

    double total = 0.0;
    const double tol = 1e-14 * std::max(1.0, hi - lo);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += integrate(f, pts[i], pts[i + 1], tol);
    return r < l ? -total : total;
}

double SpaceTimeBump::space(Vec2 p) const {
    double dx = p.x - center.x, dy = p.y - center.y;
    return bump_profile((dx * dx + dy * dy) / (radius * radius));
}

double SpaceTimeBump::time_factor(double t) const {
    double s = (2.0 * t - t0 - t1) / (t1 - t0);
    return bump_profile(s * s);
}

double entropy_residual(const Trajectory& traj, const EntropyParams& ep,
                        double* signed_out) {
    const Mesh& m = *traj.mesh;
    const std::vector<Field>& snaps = traj.snaps;
    const std::size_t N = snaps.size();
    if (N < 3) throw InsufficientData("entropy_residual: need at least three snapshots");
    if (!(ep.h_trunc > 0.0)) throw BadRange("entropy_residual: truncation height must be positive");
    if (!(ep.eta.radius > 0.0) || !(ep.eta.t1 > ep.eta.t0))
        throw BadRange("entropy_residual: degenerate test bump");
    const bool tv = traj.p == 1.0;
    if (tv && traj.z_snaps.size() != N)
        throw InsufficientData("entropy_residual: flux snapshots missing on the trajectory");

    // Support checks: the bump must die before it sees the boundary or the
    // time interval's ends.
    for (std::size_t i = 0; i < m.n_cells(); ++i)
        if (m.near_boundary[i] && ep.eta.space({m.cx[i], m.cy[i]}) != 0.0)
            throw BadSupport("entropy_residual: test bump touches a near-boundary cell");
    for (int f : m.bface)
        if (ep.eta.space({m.fx[f], m.fy[f]}) != 0.0)
            throw BadSupport("entropy_residual: test bump touches a boundary face");
    if (ep.eta.time_factor(snaps.front().t) != 0.0 ||
        ep.eta.time_factor(snaps.back().t) != 0.0)
        throw BadSupport("entropy_residual: test bump touches the time interval's ends");

    auto Th = [&](double r) { return std::min(std::max(r, -ep.h_trunc), ep.h_trunc); };
    const double thl = Th(ep.l);
    auto Sof = [&](double r) { return ep.S(Th(r) - thl); };

    // Trapezoid weights and one-sided/central slopes of the time factor:
    // together they telescope exactly, so time-constant integrands drop out.
    std::vector<double> t(N), w(N), slope(N);
    for (std::size_t i = 0; i < N; ++i) t[i] = snaps[i].t;
    for (std::size_t i = 0; i < N; ++i) {
        double tm = i > 0 ? t[i - 1] : t[i];
        double tp = i + 1 < N ? t[i + 1] : t[i];
        w[i] = 0.5 * (tp - tm);
        if (tp == tm) throw BadRange("entropy_residual: coincident snapshot times");
        slope[i] = (ep.eta.time_factor(tp) - ep.eta.time_factor(tm)) / (tp - tm);
    }

    std::vector<double> eta_cell(m.n_cells());
    for (std::size_t i = 0; i < m.n_cells(); ++i)
        eta_cell[i] = ep.eta.space({m.cx[i], m.cy[i]});
    std::vector<double> eta_face(m.n_faces());
    for (std::size_t f = 0; f < m.n_faces(); ++f)
        eta_face[f] = ep.eta.space({m.fx[f], m.fy[f]});

    double J = 0.0;       // sum j(u) eta_t
    double space_ac = 0.0;  // accumulated spatial terms
    for (std::size_t i = 0; i < N; ++i) {
        const Field& u = snaps[i];
        double jsum = 0.0;
        for (std::size_t c = 0; c < m.n_cells(); ++c) {
            if (eta_cell[c] == 0.0) continue;
            jsum += m.vol[c] * eta_cell[c] * entropy_j(ep.S, ep.h_trunc, ep.l, u.v[c]);
        }
        J += w[i] * slope[i] * jsum;

        const double tf = ep.eta.time_factor(t[i]);
        if (tf == 0.0) continue;
        double term = 0.0;
        for (std::size_t f = 0; f < m.n_faces(); ++f) {
            int a = m.fneg[f], b = m.fpos[f];
            if (b < 0) continue;
            double Sa = Sof(u.v[a]), Sb = Sof(u.v[b]);
            double dS = Sb - Sa;
            double deta = (eta_cell[b] - eta_cell[a]) * tf;
            if (!tv) {
                double g = (u.v[b] - u.v[a]) / m.fdist[f];
                double af = flux_coefficient(g * g, FluxParams{traj.p, traj.eps}) * g;
                term += m.farea[f] * af * (dS * eta_face[f] * tf + 0.5 * (Sa + Sb) * deta);
            } else {
                double zf = traj.z_snaps[i].q[f];
                term += m.farea[f] *
                        (std::fabs(dS) * eta_face[f] * tf + 0.5 * (Sa + Sb) * zf * deta);
            }
        }
        space_ac += w[i] * term;
    }

    if (signed_out) *signed_out = space_ac - J;
    return tv ? std::max(0.0, space_ac - J) : std::fabs(space_ac - J);
}

double contraction_gap(const Trajectory& a, const Trajectory& b) {
    check_same_mesh(a.mesh, b.mesh);
    if (a.snaps.size() != b.snaps.size() || a.snaps.size() < 2)
        throw InsufficientData("contraction_gap: trajectories disagree on snapshots");
    if (a.bval != b.bval) throw BadRange("contraction_gap: boundary data differ");
    double base = pos_part_integral(a.snaps.front(), b.snaps.front());
    double gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.snaps.size(); ++i) {
        if (std::fabs(a.snaps[i].t - b.snaps[i].t) > 1e-9 * std::max(1.0, a.T))
            throw BadRange("contraction_gap: snapshot times differ");
        gap = std::max(gap, pos_part_integral(a.snaps[i], b.snaps[i]) - base);
    }
    return gap;
}

double sup_bound_gap(const Trajectory& traj) {
    if (traj.p != 1.0) throw BadExponent("sup_bound_gap: the growth bound holds for p = 1");
    if (traj.snaps.empty()) throw InsufficientData("sup_bound_gap: empty trajectory");
    const double s0 = traj.mesh->domain.s0;
    if (!(s0 > 0.0)) throw BadRange("sup_bound_gap: domain lacks an interior-ball radius");
    const Field& u0 = traj.snaps.front();
    const double m0 = kern::max_val(u0.v.data(), u0.v.size());
    double gap = -std::numeric_limits<double>::infinity();
    for (const Field& s : traj.snaps) {
        double mu = kern::max_val(s.v.data(), s.v.size());
        gap = std::max(gap, mu - (m0 + 2.0 * s.t / s0));
    }
    return gap;
}

double scaling_spread(const MeshPtr& mesh, double p, double T, double tau,
                      const std::vector<double>& levels, const StepControls& ctl) {
    if (levels.empty()) throw InsufficientData("scaling_spread: need at least one level");
    if (levels.size() == 1) return 0.0;
    if (!(T > 0.0) || !(tau > 0.0)) throw BadRange("scaling_spread: bad time parameters");
    Mask k = monitor_mask(mesh, 4.0 * mesh->h);
    if (k.cells.empty()) throw BadRange("scaling_spread: monitor margin leaves no cells");
    const double diam = mesh->domain.diameter();

    std::vector<Field> finals;
    for (double n : levels) {
        if (!(n > 0.0)) throw BadRange("scaling_spread: levels must be positive");
        FluxParams fp;
        fp.p = p;
        fp.eps = p < 2.0 ? default_eps(n, 0.0, diam) : 0.0;
        Field u0 = make_field(mesh, 0.0);
        Trajectory traj = evolve(u0, T, tau, fp, n, {0.0, T}, ctl);
        Field scaled = traj.snaps.back();
        for (double& x : scaled.v) x /= n;
        finals.push_back(std::move(scaled));
    }
    double spread = 0.0;
    for (std::size_t i = 0; i < finals.size(); ++i)
        for (std::size_t j = i + 1; j < finals.size(); ++j)
            spread = std::max(spread, sup_diff(finals[i], finals[j], k));
    return spread;
}

double accretivity_gap(const Field& u, const Field& ubar, const Field& v, const Field& vbar) {
    check_same_mesh(u.mesh, ubar.mesh);
    check_same_mesh(u.mesh, v.mesh);
    check_same_mesh(u.mesh, vbar.mesh);
    const Mesh& m = *u.mesh;
    double scale = sup_diff(u, ubar);
    if (scale == 0.0) return 0.0;
    double gap = std::numeric_limits<double>::infinity();
    for (double frac : {1.0, 0.1, 0.01}) {
        double theta = frac * scale;
        double s = 0.0;
        for (std::size_t i = 0; i < m.n_cells(); ++i) {
            double x = (u.v[i] - ubar.v[i]) / theta;
            double q = x / std::sqrt(1.0 + x * x);  // odd, bounded, nondecreasing
            s += q * (v.v[i] - vbar.v[i]) * m.vol[i];
        }
        gap = std::min(gap, s);
    }
    return gap;
}

} // namespace pflow

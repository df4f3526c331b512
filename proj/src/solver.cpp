#include "pflow/fastdiff.hpp"
#include "pflow/tvflow.hpp"

#include "pflow/errors.hpp"
#include "pflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pflow {

void FluxParams::validate() const {
    if (!(p >= 1.0)) throw BadExponent("flux: p must be at least 1");
    if (eps < 0.0) throw BadRange("flux: negative eps");
    if (p < 2.0 && !(eps > 0.0))
        throw Degenerate("flux: p < 2 needs a positive regularization eps");
}

double flux_coefficient(double g2, const FluxParams& fp) {
    if (g2 < 0.0) throw BadRange("flux_coefficient: negative squared gradient");
    if (fp.p == 2.0) return 1.0;
    double s = g2 + fp.eps * fp.eps;
    if (s == 0.0) {
        if (fp.p < 2.0) throw Degenerate("flux_coefficient: zero gradient with p < 2 and eps = 0");
        return 0.0;
    }
    return std::pow(s, 0.5 * (fp.p - 2.0));
}

namespace {

// Implicit-step machinery shared by all p. The lagged-diffusivity sweep
// freezes the face coefficient at the current iterate, leaving the linear
// system  (I - tau div(c grad)) u = v + boundary load,  which is symmetric
// positive definite in the cell-volume inner product.
struct StepSolver {
    const Mesh* m;
    double p, eps2, pm2h;
    bool p_is_2, p_is_1;

    // interior faces
    std::vector<int> ineg, ipos;
    std::vector<double> iinvd, iad;     // 1/dist, area/dist
    std::vector<double> ivneg, ivpos;   // 1/vol on each side
    std::vector<double> wneg, wpos;     // assembled off-diagonal weights
    // boundary faces
    std::vector<int> bcell;
    std::vector<double> binvd, bad, bvinv;
    std::vector<double> diag, inv_diag, rhs;
    std::vector<double> r, z, pd, ap;
    // 1D chains (radial and segment layouts) admit a direct tridiagonal
    // solve, which sidesteps the ill-conditioned small-eps CG entirely.
    bool chain = true;
    std::vector<double> tlo, tup, cp, dp;

    StepSolver(const Mesh& mesh, const FluxParams& fp) : m(&mesh) {
        p = fp.p;
        eps2 = fp.eps * fp.eps;
        pm2h = 0.5 * (p - 2.0);
        p_is_2 = (p == 2.0);
        p_is_1 = (p == 1.0);
        for (std::size_t f = 0; f < mesh.n_faces(); ++f) {
            if (mesh.fpos[f] >= 0) {
                ineg.push_back(mesh.fneg[f]);
                ipos.push_back(mesh.fpos[f]);
                iinvd.push_back(1.0 / mesh.fdist[f]);
                iad.push_back(mesh.farea[f] / mesh.fdist[f]);
                ivneg.push_back(1.0 / mesh.vol[mesh.fneg[f]]);
                ivpos.push_back(1.0 / mesh.vol[mesh.fpos[f]]);
            } else {
                bcell.push_back(mesh.fneg[f]);
                binvd.push_back(1.0 / mesh.fdist[f]);
                bad.push_back(mesh.farea[f] / mesh.fdist[f]);
                bvinv.push_back(1.0 / mesh.vol[mesh.fneg[f]]);
            }
        }
        const std::size_t nc = mesh.n_cells();
        for (std::size_t k = 0; k < ineg.size(); ++k)
            if (ipos[k] != ineg[k] + 1) chain = false;
        if (chain) {
            tlo.resize(nc);
            tup.resize(nc);
            cp.resize(nc);
            dp.resize(nc);
        }
        wneg.resize(ineg.size());
        wpos.resize(ineg.size());
        diag.resize(nc);
        inv_diag.resize(nc);
        rhs.resize(nc);
        r.resize(nc);
        z.resize(nc);
        pd.resize(nc);
        ap.resize(nc);
    }

    double coef(double g2) const {
        if (p_is_2) return 1.0;
        if (p_is_1) return 1.0 / std::sqrt(g2 + eps2);
        return std::pow(g2 + eps2, pm2h);
    }

    void assemble(const std::vector<double>& u, const std::vector<double>& v,
                  double tau, double bval) {
        const std::size_t nc = diag.size();
        for (std::size_t i = 0; i < nc; ++i) {
            diag[i] = 1.0;
            rhs[i] = v[i];
        }
        for (std::size_t k = 0; k < ineg.size(); ++k) {
            double g = (u[ipos[k]] - u[ineg[k]]) * iinvd[k];
            double w = tau * coef(g * g) * iad[k];
            double wn = w * ivneg[k];
            double wp = w * ivpos[k];
            wneg[k] = wn;
            wpos[k] = wp;
            diag[ineg[k]] += wn;
            diag[ipos[k]] += wp;
        }
        for (std::size_t k = 0; k < bcell.size(); ++k) {
            double g = (bval - u[bcell[k]]) * binvd[k];
            double w = tau * coef(g * g) * bad[k] * bvinv[k];
            diag[bcell[k]] += w;
            rhs[bcell[k]] += w * bval;
        }
        for (std::size_t i = 0; i < nc; ++i) inv_diag[i] = 1.0 / diag[i];
    }

    void apply(const double* x, double* y) const {
        const std::size_t nc = diag.size();
        for (std::size_t i = 0; i < nc; ++i) y[i] = diag[i] * x[i];
        for (std::size_t k = 0; k < ineg.size(); ++k) {
            y[ineg[k]] -= wneg[k] * x[ipos[k]];
            y[ipos[k]] -= wpos[k] * x[ineg[k]];
        }
    }

    // Jacobi-preconditioned CG in the volume-weighted inner product, or a
    // direct Thomas sweep when the cells form a chain.
    int solve(std::vector<double>& x, double tol, int maxit) {
        const std::size_t nc = diag.size();
        if (chain) {
            std::fill(tlo.begin(), tlo.end(), 0.0);
            std::fill(tup.begin(), tup.end(), 0.0);
            for (std::size_t k = 0; k < ineg.size(); ++k) {
                tup[ineg[k]] = -wneg[k];
                tlo[ipos[k]] = -wpos[k];
            }
            cp[0] = tup[0] / diag[0];
            dp[0] = rhs[0] / diag[0];
            for (std::size_t i = 1; i < nc; ++i) {
                double mlt = 1.0 / (diag[i] - tlo[i] * cp[i - 1]);
                cp[i] = tup[i] * mlt;
                dp[i] = (rhs[i] - tlo[i] * dp[i - 1]) * mlt;
            }
            x[nc - 1] = dp[nc - 1];
            for (std::size_t i = nc - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
            return 0;
        }
        const double* vol = m->vol.data();
        double bnorm = std::sqrt(kern::dot_w(rhs.data(), rhs.data(), vol, nc));
        double target = tol * bnorm;
        if (bnorm == 0.0) {
            std::fill(x.begin(), x.end(), 0.0);
            return 0;
        }
        apply(x.data(), ap.data());
        for (std::size_t i = 0; i < nc; ++i) r[i] = rhs[i] - ap[i];
        double rn = std::sqrt(kern::dot_w(r.data(), r.data(), vol, nc));
        if (rn <= target) return 0;

        double rz = 0.0;
        for (int it = 1; it <= maxit; ++it) {
            for (std::size_t i = 0; i < nc; ++i) z[i] = r[i] * inv_diag[i];
            double rz_new = kern::dot_w(r.data(), z.data(), vol, nc);
            if (it == 1) {
                pd = z;
            } else {
                kern::xpay(z.data(), rz_new / rz, pd.data(), nc);
            }
            rz = rz_new;
            apply(pd.data(), ap.data());
            double alpha = rz / kern::dot_w(pd.data(), ap.data(), vol, nc);
            kern::axpy(alpha, pd.data(), x.data(), nc);
            kern::axpy(-alpha, ap.data(), r.data(), nc);
            rn = std::sqrt(kern::dot_w(r.data(), r.data(), vol, nc));
            if (rn <= target) return it;
        }
        throw NoConvergence("inner CG solve stalled", maxit, rn / bnorm);
    }
};

Field picard_step(const Field& v, double tau, const FluxParams& fp, double bval,
                  const StepControls& ctl, StepStats* stats, const Field* warm) {
    fp.validate();
    if (!(tau > 0.0)) throw BadRange("resolvent step: tau must be positive");
    if (warm) check_same_mesh(v.mesh, warm->mesh);

    StepSolver s(*v.mesh, fp);
    Field u = warm ? *warm : v;
    std::vector<double> x = u.v;

    // Roundoff floor: at datum scale n the inner solves cannot resolve
    // updates below a few thousand ulps of n, however tight tol_lin is.
    const double scale = std::max({1.0, std::fabs(bval), sup_norm(v)});
    const double tol_eff = std::max(ctl.tol_picard, 4e-13 * scale);

    StepStats local;
    for (int it = 1; it <= ctl.max_picard; ++it) {
        s.assemble(u.v, v.v, tau, bval);
        local.lin_iters += s.solve(x, ctl.tol_lin, ctl.max_lin);
        local.picard = it;
        local.last_update = kern::max_abs_diff(x.data(), u.v.data(), x.size());
        std::swap(u.v, x);
        if (local.last_update <= tol_eff) {
            if (stats) *stats = local;
            u.t = v.t + tau;
            return u;
        }
    }
    if (stats) *stats = local;
    std::ostringstream os;
    os << "lagged-diffusivity iteration stalled (p = " << fp.p << ", eps = " << fp.eps
       << ", last update " << local.last_update << ")";
    throw NoConvergence(os.str(), local.picard, local.last_update);
}

} // namespace

Field resolvent_step(const Field& v, double tau, const FluxParams& fp, double bval,
                     const StepControls& ctl, StepStats* stats, const Field* warm) {
    return picard_step(v, tau, fp, bval, ctl, stats, warm);
}

const Field& Trajectory::at_time(double t, double tol) const {
    for (const Field& f : snaps)
        if (std::fabs(f.t - t) <= tol) return f;
    throw BadRange("trajectory holds no snapshot at the requested time");
}

namespace {

std::vector<double> clean_snapshot_times(const std::vector<double>& req, double T) {
    std::vector<double> s = req;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (double t : s)
        if (t < -1e-12 || t > T * (1.0 + 1e-12))
            throw BadRange("snapshot time outside [0, T]");
    return s;
}

template <typename StepFn>
Trajectory evolve_impl(const Field& u0, double T, double tau, double bval,
                       const std::vector<double>& snapshot_times, StepFn&& one_step,
                       bool store_z) {
    if (!(T > 0.0)) throw BadRange("evolve: T must be positive");
    if (!(tau > 0.0)) throw BadRange("evolve: tau must be positive");
    std::vector<double> pending = clean_snapshot_times(snapshot_times, T);

    Trajectory traj;
    traj.mesh = u0.mesh;
    traj.tau = tau;
    traj.bval = bval;
    traj.T = T;
    traj.z_trace_min = std::numeric_limits<double>::infinity();

    Field cur = u0;
    cur.t = 0.0;
    traj.snaps.push_back(cur);
    std::size_t next = 0;
    while (next < pending.size() && pending[next] <= 1e-12) ++next;

    FaceVector z_prev;  // previous step's z (zero before the first step)
    if (store_z) {
        z_prev.mesh = u0.mesh;
        z_prev.q.assign(u0.mesh->n_faces(), 0.0);
        traj.z_snaps.push_back(z_prev);
    }

    double t = 0.0;
    const double t_end = T * (1.0 - 1e-12);
    while (t < t_end) {
        double dt = std::min(tau, T - t);
        FaceVector z_next;
        Field nxt = one_step(cur, dt, &z_next);
        double t_next = t + dt;
        nxt.t = t_next;

        if (store_z) {
            // step-wise flux balance residual ||du/dt - div z||_1
            Field dz = divergence(z_next);
            double res = 0.0;
            for (std::size_t i = 0; i < dz.v.size(); ++i)
                res += std::fabs((nxt.v[i] - cur.v[i]) / dt - dz.v[i]) * u0.mesh->vol[i];
            traj.step_residual_max = std::max(traj.step_residual_max, res);
            traj.z_abs_max = std::max(traj.z_abs_max, kern::max_abs(z_next.q.data(), z_next.q.size()));
            traj.z_trace_min = std::min(traj.z_trace_min, boundary_trace_diagnostic(z_next));
            traj.z_steps.push_back(z_next);
            traj.step_times.push_back(t_next);
        }

        while (next < pending.size() && pending[next] <= t_next + 1e-12) {
            double s = std::min(pending[next], t_next);
            double w = (s - t) / dt;
            Field snap = make_field(u0.mesh);
            snap.t = s;
            for (std::size_t i = 0; i < snap.v.size(); ++i)
                snap.v[i] = (1.0 - w) * cur.v[i] + w * nxt.v[i];
            traj.snaps.push_back(std::move(snap));
            if (store_z) {
                FaceVector zs;
                zs.mesh = u0.mesh;
                zs.q.resize(z_next.q.size());
                for (std::size_t f = 0; f < zs.q.size(); ++f)
                    zs.q[f] = (1.0 - w) * z_prev.q[f] + w * z_next.q[f];
                traj.z_snaps.push_back(std::move(zs));
            }
            ++next;
        }
        cur = std::move(nxt);
        if (store_z) z_prev = std::move(z_next);
        t = t_next;
    }
    return traj;
}

} // namespace

Trajectory evolve(const Field& u0, double T, double tau, const FluxParams& fp, double bval,
                  const std::vector<double>& snapshot_times, const StepControls& ctl) {
    fp.validate();
    long picard_total = 0, lin_total = 0;
    int picard_max = 0;
    Trajectory traj = evolve_impl(
        u0, T, tau, bval, snapshot_times,
        [&](const Field& cur, double dt, FaceVector*) {
            StepStats st;
            Field nxt = picard_step(cur, dt, fp, bval, ctl, &st, nullptr);
            picard_total += st.picard;
            lin_total += st.lin_iters;
            picard_max = std::max(picard_max, st.picard);
            return nxt;
        },
        false);
    traj.p = fp.p;
    traj.eps = fp.eps;
    traj.picard_total = picard_total;
    traj.lin_total = lin_total;
    traj.picard_max = picard_max;
    traj.z_trace_min = 0.0;
    return traj;
}

double default_eps(double bval, double u0_sup, double diameter) {
    double range = std::max({std::fabs(bval), std::fabs(u0_sup), 1e-6});
    return 1e-6 * range / diameter;
}

double flux_energy(const Field& u, const FluxParams& fp, double bval) {
    const Mesh& m = *u.mesh;
    FaceVector g = gradient(u, bval);
    double e = 0.0;
    for (std::size_t f = 0; f < m.n_faces(); ++f) {
        double s = g.q[f] * g.q[f] + fp.eps * fp.eps;
        e += std::pow(s, 0.5 * fp.p) * m.fweight[f];
    }
    return e / fp.p;
}

std::vector<double> default_eps_schedule(double bval, double u0_sup, double diameter) {
    double scale = std::max({std::fabs(bval), std::fabs(u0_sup), 1e-6}) / diameter;
    return {1e-1 * scale, 1e-2 * scale, 1e-3 * scale, 1e-4 * scale};
}

TvResult tv_resolvent(const Field& v, double tau, double bval,
                      const std::vector<double>& eps_schedule,
                      const StepControls& ctl, StepStats* stats, const Field* warm) {
    if (eps_schedule.empty()) throw BadRange("tv_resolvent: empty eps schedule");
    for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
        if (!(eps_schedule[i] > 0.0)) throw BadRange("tv_resolvent: eps must be positive");
        if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
            throw BadRange("tv_resolvent: eps schedule must be strictly decreasing");
    }
    Field u = warm ? *warm : v;
    StepControls c2 = ctl;
    c2.tol_picard = ctl.tv_tol_rel * std::max({1.0, std::fabs(bval), sup_norm(v)});
    c2.max_picard = ctl.tv_max_picard;
    StepStats total;
    for (double eps : eps_schedule) {
        FluxParams fp{1.0, eps};
        StepStats st;
        try {
            u = picard_step(v, tau, fp, bval, c2, &st, &u);
        } catch (const NoConvergence& e) {
            std::ostringstream os;
            os << e.what() << " [continuation level eps = " << eps << "]";
            throw NoConvergence(os.str(), e.iterations, e.residual);
        }
        total.picard += st.picard;
        total.lin_iters += st.lin_iters;
        total.last_update = st.last_update;
    }
    if (stats) *stats = total;

    double eps_min = eps_schedule.back();
    FaceVector g = gradient(u, bval);
    FaceVector z;
    z.mesh = v.mesh;
    z.q.resize(g.q.size());
    for (std::size_t f = 0; f < g.q.size(); ++f)
        z.q[f] = g.q[f] / std::sqrt(g.q[f] * g.q[f] + eps_min * eps_min);
    return {std::move(u), std::move(z)};
}

Trajectory tv_evolve(const Field& u0, double T, double tau, double bval,
                     const std::vector<double>& eps_schedule,
                     const std::vector<double>& snapshot_times, const StepControls& ctl) {
    long picard_total = 0, lin_total = 0;
    int picard_max = 0;
    Trajectory traj = evolve_impl(
        u0, T, tau, bval, snapshot_times,
        [&](const Field& cur, double dt, FaceVector* zout) {
            StepStats st;
            TvResult res = tv_resolvent(cur, dt, bval, eps_schedule, ctl, &st, &cur);
            picard_total += st.picard;
            lin_total += st.lin_iters;
            picard_max = std::max(picard_max, st.picard);
            *zout = std::move(res.z);
            return std::move(res.u);
        },
        true);
    traj.p = 1.0;
    traj.eps = eps_schedule.back();
    traj.eps_schedule = eps_schedule;
    traj.picard_total = picard_total;
    traj.lin_total = lin_total;
    traj.picard_max = picard_max;
    return traj;
}

double boundary_trace_diagnostic(const FaceVector& z) {
    const Mesh& m = *z.mesh;
    double mn = std::numeric_limits<double>::infinity();
    for (int f : m.bface) mn = std::min(mn, z.q[f]);
    if (m.bface.empty()) return 0.0;
    return mn;
}

} // namespace pflow

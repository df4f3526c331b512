#include "pflow/ladder.hpp"

#include "pflow/errors.hpp"
#include "pflow/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace pflow {

std::string to_string(LadderClass c) {
    switch (c) {
        case LadderClass::Converged: return "CONVERGED";
        case LadderClass::Diverging: return "DIVERGING";
        default: return "UNDECIDED";
    }
}

namespace {

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= x.size();
    ym /= y.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    if (sxx == 0.0) throw Degenerate("lsq_slope: abscissas coincide");
    return sxy / sxx;
}

} // namespace

LadderReport run_ladder(const DomainSpec& dom, const std::function<double(Vec2)>& u0,
                        double T, double p, const LadderConfig& cfg) {
    if (!(T > 0.0)) throw BadRange("run_ladder: final time must be positive");
    if (!(cfg.n0 > 0.0)) throw BadRange("run_ladder: n0 must be positive");
    if (cfg.levels < 1) throw BadRange("run_ladder: need at least one level");
    if (cfg.snapshots < 2) throw BadRange("run_ladder: need at least two snapshots");
    if (!(cfg.tol_ladder > 0.0)) throw BadRange("run_ladder: tolerance must be positive");
    if (p < 1.0) throw BadExponent("run_ladder: p must be at least 1");

    LadderReport rep;
    rep.mesh = cfg.radial ? build_radial_mesh(dom) : build_mesh(dom);
    rep.p = p;
    rep.T = T;
    rep.tau = cfg.tau > 0.0 ? cfg.tau : T / 400.0;
    rep.delta = cfg.delta >= 0.0 ? cfg.delta : 4.0 * rep.mesh->h;
    if (rep.delta < 2.0 * rep.mesh->h * (1.0 - 1e-12))
        throw BadRange("run_ladder: monitor margin must be at least 2h");
    rep.tol_ladder = cfg.tol_ladder;
    rep.monitor = monitor_mask(rep.mesh, rep.delta);
    if (rep.monitor.cells.empty())
        throw BadRange("run_ladder: the monitor margin leaves no cells");

    for (int i = 0; i < cfg.snapshots; ++i)
        rep.snapshot_times.push_back(T * i / (cfg.snapshots - 1));

    Field base = make_field_from(rep.mesh, u0);
    if (kern::min_val(base.v.data(), base.v.size()) < 0.0)
        throw BadRange("run_ladder: initial datum must be nonnegative");
    const double u0_sup = sup_norm(base);
    const double diam = dom.diameter();

    const int L = cfg.levels;
    rep.levels.resize(L);
    for (int k = 0; k < L; ++k) rep.levels[k].n = cfg.n0 * std::pow(2.0, k);

    // One regularization for every level, sized for the top datum: with a
    // level-dependent eps the levels solve different operators and the
    // discrete comparison u_n <= u_{2n} no longer holds exactly.
    const double n_top = rep.levels[L - 1].n;
    const std::vector<double> sched_all = cfg.eps_schedule.empty()
                                              ? default_eps_schedule(n_top, u0_sup, diam)
                                              : cfg.eps_schedule;
    const double eps_all =
        cfg.eps >= 0.0 ? cfg.eps : (p < 2.0 ? default_eps(n_top, u0_sup, diam) : 0.0);

    auto run_level = [&](int k) {
        LadderLevel& lev = rep.levels[k];
        try {
            Field init = truncate(base, 0.0, lev.n);
            init.t = 0.0;
            if (p == 1.0) {
                lev.traj = tv_evolve(init, T, rep.tau, lev.n, sched_all, rep.snapshot_times,
                                     cfg.controls);
            } else {
                FluxParams fp;
                fp.p = p;
                fp.eps = eps_all;
                lev.traj = evolve(init, T, rep.tau, fp, lev.n, rep.snapshot_times, cfg.controls);
            }
        } catch (const std::exception& e) {
            lev.failed = true;
            lev.error = e.what();
        }
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1 || L == 1) {
        for (int k = 0; k < L; ++k) run_level(k);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int k = next.fetch_add(1); k < L; k = next.fetch_add(1)) run_level(k);
        };
        std::vector<std::thread> pool;
        const int nt = std::min(jobs, L);
        pool.reserve(nt);
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (int k = 0; k < L; ++k) {
        LadderLevel& lev = rep.levels[k];
        if (lev.failed) continue;
        for (const Field& s : lev.traj.snaps) {
            lev.l1_K.push_back(l1_norm(s, rep.monitor));
            lev.sup_K.push_back(sup_norm(s, rep.monitor));
        }
        if (k == 0 || rep.levels[k - 1].failed) continue;
        const LadderLevel& prev = rep.levels[k - 1];
        for (std::size_t i = 0; i < lev.traj.snaps.size(); ++i) {
            double denom = std::max(lev.l1_K[i], 1e-30);
            lev.diff_prev.push_back(
                l1_diff(lev.traj.snaps[i], prev.traj.snaps[i], rep.monitor) / denom);
            lev.viol_prev.push_back(std::max(
                0.0, max_drop(prev.traj.snaps[i], lev.traj.snaps[i], rep.monitor)));
            lev.violation = std::max(lev.violation, lev.viol_prev.back());
        }
    }

    bool all_ok = std::none_of(rep.levels.begin(), rep.levels.end(),
                               [](const LadderLevel& l) { return l.failed; });
    rep.classification = LadderClass::Undecided;
    if (all_ok && L >= 2) {
        double s_prev = rep.levels[L - 2].sup_K.back();
        double s_last = rep.levels[L - 1].sup_K.back();
        if (s_prev > 0.0 && s_last >= 1.5 * s_prev) {
            rep.classification = LadderClass::Diverging;
        } else if (L >= 3) {
            double d1 = max_of(rep.levels[L - 2].diff_prev);
            double d2 = max_of(rep.levels[L - 1].diff_prev);
            double viol = 0.0;
            for (const LadderLevel& l : rep.levels) viol = std::max(viol, l.violation);
            if (d1 <= rep.tol_ladder && d2 <= rep.tol_ladder && viol <= 1e-9)
                rep.classification = LadderClass::Converged;
        }
    }
    return rep;
}

double monotone_check(const LadderReport& rep) {
    double worst = -std::numeric_limits<double>::infinity();
    int pairs = 0;
    for (std::size_t k = 1; k < rep.levels.size(); ++k) {
        const LadderLevel& a = rep.levels[k - 1];
        const LadderLevel& b = rep.levels[k];
        if (a.failed || b.failed) continue;
        for (std::size_t i = 0; i < b.traj.snaps.size(); ++i)
            worst = std::max(worst, max_drop(a.traj.snaps[i], b.traj.snaps[i], rep.monitor));
        ++pairs;
    }
    if (pairs == 0) throw InsufficientData("monotone_check: need two successful levels");
    return worst;
}

BarrierFit barrier_exponent_fit(const LadderReport& rep) {
    if (!(rep.p > 1.0 && rep.p < 2.0))
        throw BadExponent("barrier_exponent_fit: needs 1 < p < 2");
    if (rep.classification != LadderClass::Converged)
        throw InsufficientData("barrier_exponent_fit: ladder has not converged");
    const LadderLevel* top = nullptr;
    for (auto it = rep.levels.rbegin(); it != rep.levels.rend(); ++it)
        if (!it->failed) {
            top = &*it;
            break;
        }
    if (!top) throw InsufficientData("barrier_exponent_fit: no successful level");
    const Mesh& m = *rep.mesh;
    const std::vector<Field>& snaps = top->traj.snaps;

    BarrierFit fit;

    // Value vs time at the deepest cell.
    std::size_t deep = 0;
    for (std::size_t i = 1; i < m.n_cells(); ++i)
        if (m.bdist[i] > m.bdist[deep]) deep = i;
    {
        std::vector<double> lx, ly;
        for (const Field& s : snaps) {
            if (s.t <= 0.0) continue;
            double u = s.v[deep];
            if (u <= 1e-12 * std::max(1.0, top->n)) continue;
            lx.push_back(std::log(s.t));
            ly.push_back(std::log(u));
        }
        fit.time_points = static_cast<int>(lx.size());
        if (lx.size() < 4)
            throw InsufficientData("barrier_exponent_fit: too few usable snapshot times");
        fit.time_exponent = lsq_slope(lx, ly);
    }

    // Band-averaged value vs boundary distance: geometric bands between 3h
    // and a quarter of the inradius, at the earliest snapshot where at least
    // four bands are populated yet unsaturated (mean below n/4). The blow-up
    // power law is a near-boundary asymptotic; past a quarter inradius the
    // interior plateau bends the profile and pollutes the slope.
    const double d_lo = 3.0 * m.h;
    const double d_hi = 0.25 * m.domain.inradius();
    std::vector<double> edges{d_lo};
    while (edges.back() * 1.35 <= d_hi * (1.0 + 1e-12)) edges.push_back(edges.back() * 1.35);
    const std::size_t nb = edges.size() > 1 ? edges.size() - 1 : 0;
    if (nb < 4) throw InsufficientData("barrier_exponent_fit: grid too coarse for bands");

    for (const Field& s : snaps) {
        if (s.t <= 0.0) continue;
        std::vector<double> su(nb, 0.0), sd(nb, 0.0), sw(nb, 0.0);
        for (std::size_t i = 0; i < m.n_cells(); ++i) {
            double d = m.bdist[i];
            if (d < edges.front() || d >= edges.back()) continue;
            std::size_t b = static_cast<std::size_t>(
                std::upper_bound(edges.begin(), edges.end(), d) - edges.begin() - 1);
            if (b >= nb) continue;
            su[b] += s.v[i] * m.vol[i];
            sd[b] += d * m.vol[i];
            sw[b] += m.vol[i];
        }
        std::vector<double> lx, ly;
        for (std::size_t b = 0; b < nb; ++b) {
            if (sw[b] <= 0.0) continue;
            double mu = su[b] / sw[b];
            double md = sd[b] / sw[b];
            if (mu < 1e-8 || mu > 0.25 * top->n) continue;
            lx.push_back(std::log(md));
            ly.push_back(std::log(mu));
        }
        if (lx.size() >= 4) {
            fit.distance_bands = static_cast<int>(lx.size());
            fit.distance_exponent = lsq_slope(lx, ly);
            fit.fit_time = s.t;
            return fit;
        }
    }
    throw InsufficientData("barrier_exponent_fit: no snapshot offers four unsaturated bands");
}

} // namespace pflow

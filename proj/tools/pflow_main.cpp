// Command-line laboratory for the degenerate parabolic flow u_t = div(
// |grad u|^{p-2} grad u ) on convex planar domains with constant Dirichlet
// data, including the boundary-lift ladder toward the datum +infinity.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 solver
// failure (the failing manifest path is printed).

#include "pflow/cheeger.hpp"
#include "pflow/errors.hpp"
#include "pflow/exact.hpp"
#include "pflow/io.hpp"
#include "pflow/kernels.hpp"
#include "pflow/ladder.hpp"
#include "pflow/verify.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

namespace {

using namespace pflow;

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

struct U0Preset {
    std::string desc;
    std::function<double(Vec2)> f;  // null when desc names a file
    std::string file;
};

U0Preset parse_u0(const std::string& s, const DomainSpec& dom, bool radial) {
    U0Preset out;
    out.desc = s;
    if (s == "zero") {
        out.f = [](Vec2) { return 0.0; };
        return out;
    }
    if (s.rfind("const:", 0) == 0) {
        double c = std::stod(s.substr(6));
        out.f = [c](Vec2) { return c; };
        return out;
    }
    if (s == "plateau") {
        if (dom.kind != DomainKind::Disk || std::fabs(dom.shape.disk_radius() - 1.0) > 1e-12)
            throw BadRange("u0 preset 'plateau' wants the unit disk (disk:1)");
        bool r = radial;
        out.f = [r](Vec2 p) {
            double rho = r ? p.x : std::sqrt(p.x * p.x + p.y * p.y);
            return exact::plateau_value(0.0, rho);
        };
        return out;
    }
    if (s.rfind("file:", 0) == 0) {
        out.file = s.substr(5);
        return out;
    }
    throw BadRange("unknown u0 '" + s + "' (zero | const:c | plateau | file:PATH)");
}

std::vector<double> uniform_times(double T, int count) {
    std::vector<double> t;
    for (int i = 0; i < count; ++i) t.push_back(T * i / (count - 1));
    return t;
}

void write_failed_manifest(const std::string& dir, const std::string& domain_str,
                           double h, double p, double n, double T, const std::string& err) {
    io::Manifest mf;
    mf.set("format", std::string("pflow-run-1"));
    mf.set("status", std::string("failed"));
    mf.set("domain", domain_str);
    mf.set("h", h);
    mf.set("p", p);
    mf.set("n", n);
    mf.set("T", T);
    mf.set("error", err);
    std::filesystem::create_directories(dir);
    io::write_manifest(mf, dir + "/manifest.txt");
}

// ---------------------------------------------------------------- simulate
struct SimulateArgs {
    std::string domain, u0 = "zero", out;
    double p = 1.5, n = 1.0, T = 1.0, tau = -1.0, h = 1.0 / 32.0, eps = -1.0, s0 = -1.0;
    std::string eps_schedule;
    int snapshots = 8, jobs = 1;
    bool radial = false;
};

int run_simulate(const SimulateArgs& a) {
    DomainSpec dom = io::parse_domain(a.domain, a.h, a.s0);
    if (auto w = resolution_warning(dom)) std::cerr << "warning: " << *w << "\n";
    MeshPtr mesh = a.radial ? build_radial_mesh(dom) : build_mesh(dom);

    U0Preset u0 = parse_u0(a.u0, dom, a.radial);
    Field init = u0.f ? make_field_from(mesh, u0.f)
                      : io::read_snapshot_csv(mesh, u0.file, 0.0);
    init.t = 0.0;

    const double tau = a.tau > 0.0 ? a.tau : a.T / 400.0;
    const std::vector<double> times = uniform_times(a.T, a.snapshots);
    const double u0sup = sup_norm(init);

    Trajectory traj;
    try {
        if (a.p == 1.0) {
            std::vector<double> sched;
            if (!a.eps_schedule.empty()) {
                io::Manifest tmp;
                tmp.set("s", a.eps_schedule);
                sched = tmp.get_list("s");
            } else {
                sched = default_eps_schedule(a.n, u0sup, dom.diameter());
            }
            traj = tv_evolve(init, a.T, tau, a.n, sched, times);
        } else {
            FluxParams fp;
            fp.p = a.p;
            fp.eps = a.eps >= 0.0 ? a.eps
                                  : (a.p < 2.0 ? default_eps(a.n, u0sup, dom.diameter()) : 0.0);
            traj = evolve(init, a.T, tau, fp, a.n, times);
        }
    } catch (const NoConvergence& e) {
        write_failed_manifest(a.out, a.domain, a.h, a.p, a.n, a.T, e.what());
        std::cerr << "solver failure: " << e.what() << "\n" << a.out << "/manifest.txt\n";
        return kExitSolver;
    }
    io::write_run(traj, a.out, a.domain, a.u0, StepControls{}, a.jobs);
    std::cout << a.out << "/manifest.txt\n";
    return kExitOk;
}

// ------------------------------------------------------------------ ladder
struct LadderArgs {
    std::string domain, u0 = "zero", out;
    double p = 1.5, T = 0.5, n0 = 4.0, delta = -1.0, tau = -1.0, h = 1.0 / 32.0;
    double tol = 1e-3, eps = -1.0, s0 = -1.0;
    std::string eps_schedule;
    int levels = 6, snapshots = 8, jobs = 1;
    bool radial = false, plot = false;
};

int run_ladder_cmd(const LadderArgs& a) {
    DomainSpec dom = io::parse_domain(a.domain, a.h, a.s0);
    if (auto w = resolution_warning(dom)) std::cerr << "warning: " << *w << "\n";
    U0Preset u0 = parse_u0(a.u0, dom, a.radial);
    if (!u0.f) throw BadRange("ladder supports u0 presets only (zero | const:c | plateau)");

    LadderConfig cfg;
    cfg.n0 = a.n0;
    cfg.levels = a.levels;
    cfg.delta = a.delta;
    cfg.tol_ladder = a.tol;
    cfg.tau = a.tau;
    cfg.snapshots = a.snapshots;
    cfg.radial = a.radial;
    cfg.jobs = a.jobs;
    cfg.eps = a.eps;
    if (!a.eps_schedule.empty()) {
        io::Manifest tmp;
        tmp.set("s", a.eps_schedule);
        cfg.eps_schedule = tmp.get_list("s");
    }

    LadderReport rep = run_ladder(dom, u0.f, a.T, a.p, cfg);
    io::write_ladder_report(rep, a.out, a.domain, a.jobs, a.plot);

    bool any_ok = false;
    for (const LadderLevel& lev : rep.levels) {
        if (lev.failed)
            std::cerr << "level n = " << lev.n << " failed: " << lev.error << "\n";
        else
            any_ok = true;
    }
    std::cout << "classification = " << to_string(rep.classification) << "\n";
    if (!any_ok) {
        std::cerr << a.out << "/manifest.txt\n";
        return kExitSolver;
    }
    return kExitOk;
}

// --------------------------------------------------------------- example51
struct Example51Args {
    double t = 0.0;
    int samples = 200;
    std::string out, compare;
};

int run_example51(const Example51Args& a) {
    if (a.t < 0.0) throw BadRange("example51: t must be nonnegative");
    if (a.samples < 2) throw BadRange("example51: need at least two samples");

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw Error("cannot open '" + a.out + "' for writing");
        os = &file;
    }
    *os << "rho,value\n";
    for (int i = 0; i < a.samples; ++i) {
        double rho = static_cast<double>(i) / a.samples;
        *os << io::fmt(rho) << ',' << io::fmt(exact::plateau_value(a.t, rho)) << "\n";
    }

    if (!a.compare.empty()) {
        io::RunData run = io::read_run(a.compare);
        if (run.mesh->layout != Mesh::Layout::Radial)
            throw BadRange("example51 --compare wants a radial run directory");
        // snapshot nearest to t
        const Field* best = nullptr;
        for (const Field& s : run.traj.snaps)
            if (!best || std::fabs(s.t - a.t) < std::fabs(best->t - a.t)) best = &s;
        if (!best) throw InsufficientData("run directory has no snapshots");
        const Mesh& m = *run.mesh;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < m.n_cells(); ++i) {
            if (m.cx[i] > 0.9) continue;
            double ex = exact::plateau_value(best->t, m.cx[i]);
            num += std::fabs(best->v[i] - ex) * m.vol[i];
            den += std::fabs(ex) * m.vol[i];
        }
        double rel = num / std::max(den, 1e-300);
        std::cout << "compare_time = " << io::fmt(best->t) << "\n";
        std::cout << "l1_rel_error = " << io::fmt(rel) << "\n";
    }
    return kExitOk;
}

// ----------------------------------------------------------------- cheeger
struct CheegerArgs {
    std::string shape, out = "hfield.csv";
    int raster = 0;
};

int run_cheeger(const CheegerArgs& a) {
    ConvexShape c = io::parse_shape(a.shape);
    cheeger::CheegerResult res = cheeger::cheeger_constant(c);
    std::printf("r_star = %.8g\n", res.r_star);
    std::printf("h = %.8g\n", res.h);
    std::printf("calibrable = %s\n", res.calibrable ? "true" : "false");

    if (a.raster > 0) {
        Vec2 lo, hi;
        c.bbox(lo, hi);
        std::ofstream f(a.out);
        if (!f) throw Error("cannot open '" + a.out + "' for writing");
        f << "x,y,H_C\n";
        for (int j = 0; j < a.raster; ++j) {
            for (int i = 0; i < a.raster; ++i) {
                Vec2 p{lo.x + (i + 0.5) * (hi.x - lo.x) / a.raster,
                       lo.y + (j + 0.5) * (hi.y - lo.y) / a.raster};
                if (!c.contains(p)) continue;
                auto hf = cheeger::h_field(c, p);
                f << io::fmt(p.x) << ',' << io::fmt(p.y) << ','
                  << (hf ? io::fmt(*hf) : "inf") << "\n";
            }
        }
        std::cout << a.out << "\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------------ verify
struct VerifyArgs {
    std::string suite, in;
};

struct CheckRow {
    std::string name;
    double value;
    double threshold;
};

int emit_checks(const std::vector<CheckRow>& rows) {
    bool fail = false;
    std::cout << "check,value,threshold,verdict\n";
    for (const CheckRow& r : rows) {
        bool ok = r.value <= r.threshold;
        fail = fail || !ok;
        std::cout << r.name << ',' << io::fmt(r.value) << ',' << io::fmt(r.threshold) << ','
                  << (ok ? "PASS" : "FAIL") << "\n";
    }
    return fail ? kExitVerdict : kExitOk;
}

int run_verify(const VerifyArgs& a) {
    io::RunData run = io::read_run(a.in);
    const Trajectory& traj = run.traj;
    const Mesh& m = *run.mesh;
    std::vector<CheckRow> rows;

    if (a.suite == "entropy") {
        std::size_t deep = 0;
        for (std::size_t i = 1; i < m.n_cells(); ++i)
            if (m.bdist[i] > m.bdist[deep]) deep = i;
        SpaceTimeBump eta;
        eta.center = {m.cx[deep], m.cy[deep]};
        eta.radius = 0.75 * m.bdist[deep];
        eta.t0 = 0.1 * traj.T;
        eta.t1 = 0.9 * traj.T;
        const double thr = 5e-2 * std::max(1.0, traj.bval);
        struct Combo {
            const char* name;
            SClamp S;
            double h_trunc, l;
        };
        const Combo combos[3] = {
            {"entropy_smooth_0_1", SClamp::smooth(0.0, 1.0), 1.0, 0.0},
            {"entropy_smooth_m1_1", SClamp::smooth(-1.0, 1.0), 2.0, 0.25},
            {"entropy_hard_m1_0", SClamp::hard(-1.0, 0.0), 1.0, 0.5},
        };
        for (const Combo& cb : combos) {
            EntropyParams ep{cb.S, cb.h_trunc, cb.l, eta};
            rows.push_back({cb.name, entropy_residual(traj, ep), thr});
        }
    } else if (a.suite == "bounds") {
        if (traj.p != 1.0) throw BadRange("bounds suite wants a p = 1 run");
        rows.push_back({"sup_bound_gap", sup_bound_gap(traj), 0.05});
        rows.push_back({"z_abs_max_minus_1", traj.z_abs_max - 1.0, 1e-6});
        // The recorded flux balance carries the Picard lag amplified by
        // 1/eps_min (z is the consistent unit-bounded field, not the lagged
        // one the linear solve used), so the threshold is an empirical pin.
        rows.push_back({"step_residual_max", traj.step_residual_max, 0.05 * std::max(1.0, traj.bval)});
    } else if (a.suite == "contraction") {
        const double T = 10.0 * traj.tau;
        std::vector<double> times = uniform_times(T, 3);
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        Vec2 lo, hi;
        m.domain.shape.bbox(lo, hi);
        auto random_field = [&] {
            double cx = lo.x + unif(rng) * (hi.x - lo.x);
            double cy = lo.y + unif(rng) * (hi.y - lo.y);
            double w = 0.1 + 0.4 * unif(rng);
            double amp = traj.bval * (0.2 + 0.8 * unif(rng));
            return make_field_from(run.mesh, [&](Vec2 q) {
                double dx = q.x - cx, dy = q.y - cy;
                return amp * std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
            });
        };
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            Field u0 = random_field(), v0 = random_field();
            Trajectory tu, tvj;
            if (traj.p == 1.0) {
                tu = tv_evolve(u0, T, traj.tau, traj.bval, traj.eps_schedule, times);
                tvj = tv_evolve(v0, T, traj.tau, traj.bval, traj.eps_schedule, times);
            } else {
                FluxParams fp{traj.p, traj.eps};
                tu = evolve(u0, T, traj.tau, fp, traj.bval, times);
                tvj = evolve(v0, T, traj.tau, fp, traj.bval, times);
            }
            worst = std::max(worst, contraction_gap(tu, tvj));
        }
        rows.push_back({"contraction_gap_max", worst, 1e-6 * m.total_volume()});
    } else {
        throw BadRange("unknown suite '" + a.suite + "' (entropy | bounds | contraction)");
    }
    return emit_checks(rows);
}

// ------------------------------------------------------------ nonexistence
struct NonexistenceArgs {
    std::string domain = "disk:1", out;
    double p = 2.0, T = 0.5, n0 = 4.0, h = 1.0 / 32.0, tau = -1.0, delta = -1.0;
    int levels = 4, snapshots = 8, jobs = 1;
};

int run_nonexistence(const NonexistenceArgs& a) {
    if (a.p < 2.0) throw BadRange("nonexistence wants p >= 2 (the regime without a limit)");
    DomainSpec dom = io::parse_domain(a.domain, a.h);
    LadderConfig cfg;
    cfg.n0 = a.n0;
    cfg.levels = a.levels;
    cfg.delta = a.delta;
    cfg.tau = a.tau;
    cfg.snapshots = a.snapshots;
    cfg.jobs = a.jobs;
    LadderReport rep = run_ladder(dom, [](Vec2) { return 0.0; }, a.T, a.p, cfg);
    if (!a.out.empty()) io::write_ladder_report(rep, a.out, a.domain, a.jobs, false);
    std::cout << "classification = " << to_string(rep.classification) << "\n";
    return rep.classification == LadderClass::Diverging ? kExitOk : kExitVerdict;
}

// Expands "--config FILE" into the equivalent command-line tokens so a flat
// "key = value" file configures whichever subcommand was invoked.  Explicit
// flags win over file entries; unknown keys surface as the usual
// unrecognized-argument errors.  '#' starts a comment.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);

    CLI::App* sub = args.empty() ? nullptr : app.get_subcommand_no_throw(args.front());
    auto trim = [](const std::string& s) {
        const char* ws = " \t\r";
        auto a = s.find_first_not_of(ws);
        if (a == std::string::npos) return std::string();
        return s.substr(a, s.find_last_not_of(ws) - a + 1);
    };
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (given) continue;  // explicit flags win
        CLI::Option* opt = sub ? sub->get_option_no_throw(flag) : nullptr;
        if (opt != nullptr && opt->get_expected_min() == 0) {
            // flag-style option: presence only, no value token
            if (val == "true" || val == "1" || val == "on" || val == "yes") args.push_back(flag);
            continue;
        }
        args.push_back(flag);
        args.push_back(val);
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for u_t = div(|grad u|^{p-2} grad u) with "
                 "boundary datum lifted to +infinity"};
    app.require_subcommand(1);
    std::string config_file;  // consumed by expand_config before parsing

    SimulateArgs sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "one flow run; writes snapshots + manifest");
    c_sim->set_help_flag("--help", "print help");  // frees -h / --h for the grid spacing
    c_sim->add_option("--config", config_file, "key = value config file (flags win)");
    c_sim->add_option("--domain", sim.domain, "disk:R | square:L | rect:WxH | poly:x,y;...")
        ->required();
    c_sim->add_option("--p", sim.p, "flow exponent (1 = total variation)")->required();
    c_sim->add_option("--n", sim.n, "constant Dirichlet datum")->required();
    c_sim->add_option("--T", sim.T, "final time")->required();
    c_sim->add_option("--tau", sim.tau, "time step (default T/400)");
    c_sim->add_option("--h", sim.h, "grid spacing");
    c_sim->add_option("--eps", sim.eps, "gradient regularization (default auto)");
    c_sim->add_option("--eps-schedule", sim.eps_schedule, "p = 1 continuation, comma list");
    c_sim->add_option("--u0", sim.u0, "zero | const:c | plateau | file:PATH");
    c_sim->add_option("--s0", sim.s0, "interior-ball radius (default inradius)");
    c_sim->add_option("--snapshots", sim.snapshots, "snapshot count over [0, T]");
    c_sim->add_option("--jobs", sim.jobs, "worker bound (recorded)");
    c_sim->add_flag("--radial", sim.radial, "1D radial mesh (disks only)");
    c_sim->add_option("--out", sim.out, "run directory")->required();

    LadderArgs lad;
    CLI::App* c_lad = app.add_subcommand("ladder", "boundary-lift ladder n0, 2n0, ...");
    c_lad->set_help_flag("--help", "print help");
    c_lad->add_option("--config", config_file, "key = value config file (flags win)");
    c_lad->add_option("--domain", lad.domain, "shape string")->required();
    c_lad->add_option("--p", lad.p, "flow exponent")->required();
    c_lad->add_option("--T", lad.T, "final time")->required();
    c_lad->add_option("--n0", lad.n0, "first datum level");
    c_lad->add_option("--levels", lad.levels, "level count");
    c_lad->add_option("--delta", lad.delta, "monitor margin (default 4h)");
    c_lad->add_option("--tol", lad.tol, "relative L1 stop tolerance");
    c_lad->add_option("--tau", lad.tau, "time step (default T/400)");
    c_lad->add_option("--h", lad.h, "grid spacing");
    c_lad->add_option("--eps", lad.eps, "regularization override");
    c_lad->add_option("--eps-schedule", lad.eps_schedule, "p = 1 continuation, comma list");
    c_lad->add_option("--u0", lad.u0, "zero | const:c | plateau");
    c_lad->add_option("--s0", lad.s0, "interior-ball radius");
    c_lad->add_option("--snapshots", lad.snapshots, "snapshot count");
    c_lad->add_option("--jobs", lad.jobs, "parallel levels");
    c_lad->add_flag("--radial", lad.radial, "1D radial mesh (disks only)");
    c_lad->add_flag("--plot", lad.plot, "emit barrier_fit.svg when the fit exists");
    c_lad->add_option("--out", lad.out, "report directory")->required();

    Example51Args ex;
    CLI::App* c_ex = app.add_subcommand(
        "example51", "closed-form radial benchmark: (rho, value) CSV at time t");
    c_ex->add_option("--t", ex.t, "time")->required();
    c_ex->add_option("--samples", ex.samples, "row count (rho = i/samples)");
    c_ex->add_option("--out", ex.out, "CSV path (default stdout)");
    c_ex->add_option("--compare", ex.compare, "radial run directory for the L1 error");

    CheegerArgs ch;
    CLI::App* c_ch = app.add_subcommand("cheeger", "Cheeger radius/constant and the H_C field");
    c_ch->add_option("--shape", ch.shape, "shape string")->required();
    c_ch->add_option("--raster", ch.raster, "emit an m x m (x, y, H_C) raster");
    c_ch->add_option("--out", ch.out, "raster CSV path");

    VerifyArgs ver;
    CLI::App* c_ver = app.add_subcommand("verify", "property suite over a stored run");
    c_ver->add_option("--suite", ver.suite, "entropy | bounds | contraction")->required();
    c_ver->add_option("--in", ver.in, "run directory")->required();

    NonexistenceArgs non;
    CLI::App* c_non = app.add_subcommand(
        "nonexistence", "ladder preset that must diverge (p >= 2); exit 0 iff DIVERGING");
    c_non->set_help_flag("--help", "print help");
    c_non->add_option("--config", config_file, "key = value config file (flags win)");
    c_non->add_option("--p", non.p, "exponent >= 2");
    c_non->add_option("--domain", non.domain, "shape string");
    c_non->add_option("--T", non.T, "final time");
    c_non->add_option("--h", non.h, "grid spacing");
    c_non->add_option("--n0", non.n0, "first datum level");
    c_non->add_option("--levels", non.levels, "level count");
    c_non->add_option("--tau", non.tau, "time step");
    c_non->add_option("--delta", non.delta, "monitor margin");
    c_non->add_option("--snapshots", non.snapshots, "snapshot count");
    c_non->add_option("--jobs", non.jobs, "parallel levels");
    c_non->add_option("--out", non.out, "optional report directory");

    try {
        std::vector<std::string> args =
            expand_config(app, std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_lad->parsed()) return run_ladder_cmd(lad);
        if (c_ex->parsed()) return run_example51(ex);
        if (c_ch->parsed()) return run_cheeger(ch);
        if (c_ver->parsed()) return run_verify(ver);
        if (c_non->parsed()) return run_nonexistence(non);
    } catch (const NoConvergence& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

#include "pflow/io.hpp"

#include "pflow/errors.hpp"
#include "pflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pflow::io {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_num(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (trim(s.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw BadRange("cannot parse number '" + s + "' in " + what);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open '" + path + "' for reading");
    return f;
}

std::string numbered(const char* stem, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03zu.csv", stem, i);
    return buf;
}

std::string join_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fmt(v[i]);
    }
    return s;
}

std::string join_names(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += v[i];
    }
    return s;
}

} // namespace

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void Manifest::set(const std::string& key, const std::string& value) {
    for (auto& kv : items)
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    items.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, fmt(value)); }

void Manifest::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

bool Manifest::has(const std::string& key) const {
    for (const auto& kv : items)
        if (kv.first == key) return true;
    return false;
}

const std::string& Manifest::get(const std::string& key) const {
    for (const auto& kv : items)
        if (kv.first == key) return kv.second;
    throw BadRange("manifest lacks key '" + key + "'");
}

double Manifest::get_num(const std::string& key) const {
    return parse_num(get(key), "manifest key '" + key + "'");
}

std::vector<double> Manifest::get_list(const std::string& key) const {
    std::vector<double> out;
    const std::string& s = get(key);
    if (trim(s).empty()) return out;
    for (const std::string& part : split(s, ','))
        out.push_back(parse_num(part, "manifest key '" + key + "'"));
    return out;
}

Manifest read_manifest(const std::string& path) {
    std::ifstream f = open_in(path);
    Manifest m;
    std::string line;
    while (std::getline(f, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw BadRange("manifest line without '=': " + t);
        m.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return m;
}

void write_manifest(const Manifest& m, const std::string& path) {
    std::ofstream f = open_out(path);
    for (const auto& kv : m.items) f << kv.first << " = " << kv.second << "\n";
}

void write_snapshot_csv(const Field& u, const std::string& path) {
    const Mesh& m = *u.mesh;
    std::ofstream f = open_out(path);
    if (m.layout == Mesh::Layout::Radial) {
        f << "rho,value\n";
        for (std::size_t i = 0; i < m.n_cells(); ++i)
            f << fmt(m.cx[i]) << ',' << fmt(u.v[i]) << "\n";
    } else {
        f << "x,y,value\n";
        for (std::size_t i = 0; i < m.n_cells(); ++i)
            f << fmt(m.cx[i]) << ',' << fmt(m.cy[i]) << ',' << fmt(u.v[i]) << "\n";
    }
}

Field read_snapshot_csv(const MeshPtr& mesh, const std::string& path, double t) {
    const Mesh& m = *mesh;
    std::ifstream f = open_in(path);
    std::string line;
    if (!std::getline(f, line)) throw Error("empty snapshot file '" + path + "'");
    const bool radial = trim(line) == "rho,value";
    if (!radial && trim(line) != "x,y,value")
        throw BadRange("unknown snapshot header in '" + path + "'");

    Field u = make_field(mesh);
    u.t = t;
    std::size_t i = 0;
    while (std::getline(f, line)) {
        if (trim(line).empty()) continue;
        if (i >= m.n_cells()) throw MeshMismatch("snapshot '" + path + "' has extra rows");
        std::vector<std::string> cols = split(trim(line), ',');
        std::size_t want = radial ? 2 : 3;
        if (cols.size() != want) throw BadRange("bad row in '" + path + "': " + line);
        double x = parse_num(cols[0], path);
        double tol = 1e-12 * std::max(1.0, m.domain.diameter());
        if (std::fabs(x - m.cx[i]) > tol)
            throw MeshMismatch("snapshot '" + path + "' row " + std::to_string(i) +
                               " does not match the mesh");
        if (!radial) {
            double y = parse_num(cols[1], path);
            if (std::fabs(y - m.cy[i]) > tol)
                throw MeshMismatch("snapshot '" + path + "' row " + std::to_string(i) +
                                   " does not match the mesh");
        }
        u.v[i++] = parse_num(cols.back(), path);
    }
    if (i != m.n_cells()) throw MeshMismatch("snapshot '" + path + "' has too few rows");
    return u;
}

void write_face_csv(const FaceVector& z, const std::string& path) {
    std::ofstream f = open_out(path);
    f << "face,value\n";
    for (std::size_t i = 0; i < z.q.size(); ++i) f << i << ',' << fmt(z.q[i]) << "\n";
}

FaceVector read_face_csv(const MeshPtr& mesh, const std::string& path) {
    std::ifstream f = open_in(path);
    std::string line;
    if (!std::getline(f, line) || trim(line) != "face,value")
        throw BadRange("unknown face-file header in '" + path + "'");
    FaceVector z;
    z.mesh = mesh;
    z.q.assign(mesh->n_faces(), 0.0);
    std::size_t i = 0;
    while (std::getline(f, line)) {
        if (trim(line).empty()) continue;
        if (i >= z.q.size()) throw MeshMismatch("face file '" + path + "' has extra rows");
        std::vector<std::string> cols = split(trim(line), ',');
        if (cols.size() != 2) throw BadRange("bad row in '" + path + "': " + line);
        z.q[i++] = parse_num(cols[1], path);
    }
    if (i != z.q.size()) throw MeshMismatch("face file '" + path + "' has too few rows");
    return z;
}

ConvexShape parse_shape(const std::string& s) {
    std::size_t colon = s.find(':');
    if (colon == std::string::npos)
        throw BadRange("shape '" + s + "' lacks a ':' (try disk:1 or square:1)");
    std::string kind = trim(s.substr(0, colon));
    std::string rest = trim(s.substr(colon + 1));
    if (kind == "disk") return ConvexShape::disk({0.0, 0.0}, parse_num(rest, "disk radius"));
    if (kind == "square") {
        double L = parse_num(rest, "square side");
        return ConvexShape::rectangle({-0.5 * L, -0.5 * L}, {0.5 * L, 0.5 * L});
    }
    if (kind == "rect") {
        std::vector<std::string> wh = split(rest, 'x');
        if (wh.size() != 2) throw BadRange("rect wants WxH, got '" + rest + "'");
        double w = parse_num(wh[0], "rect width"), hgt = parse_num(wh[1], "rect height");
        return ConvexShape::rectangle({-0.5 * w, -0.5 * hgt}, {0.5 * w, 0.5 * hgt});
    }
    if (kind == "poly") {
        std::vector<Vec2> verts;
        for (const std::string& pair : split(rest, ';')) {
            std::vector<std::string> xy = split(pair, ',');
            if (xy.size() != 2) throw BadRange("poly vertex wants x,y; got '" + pair + "'");
            verts.push_back({parse_num(xy[0], "poly vertex"), parse_num(xy[1], "poly vertex")});
        }
        return ConvexShape::polygon(std::move(verts));
    }
    throw BadRange("unknown shape kind '" + kind + "'");
}

DomainSpec parse_domain(const std::string& s, double h, double s0) {
    ConvexShape shape = parse_shape(s);
    switch (shape.kind()) {
        case ConvexShape::Kind::Disk:
            return DomainSpec::disk(shape.disk_radius(), h, s0);
        default: {
            DomainSpec d;
            d.kind = s.rfind("poly", 0) == 0 ? DomainKind::Polygon : DomainKind::Rectangle;
            d.shape = shape;
            d.h = h;
            d.s0 = s0 < 0.0 ? shape.inradius() : s0;
            if (!(d.h > 0.0)) throw BadRange("domain: spacing h must be positive");
            if (!(d.s0 > 0.0) || d.s0 > shape.inradius() * (1.0 + 1e-9))
                throw BadRange("domain: bad interior-ball radius s0");
            return d;
        }
    }
}

void write_run(const Trajectory& traj, const std::string& dir, const std::string& domain_str,
               const std::string& u0_desc, const StepControls& ctl, int jobs,
               const std::vector<std::pair<std::string, std::string>>& extra) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const Mesh& m = *traj.mesh;
    const bool tv = traj.p == 1.0;

    std::vector<double> times;
    std::vector<std::string> snap_files, z_files;
    for (std::size_t i = 0; i < traj.snaps.size(); ++i) {
        times.push_back(traj.snaps[i].t);
        snap_files.push_back(numbered("snapshot", i));
        write_snapshot_csv(traj.snaps[i], dir + "/" + snap_files.back());
    }
    if (tv) {
        for (std::size_t i = 0; i < traj.z_snaps.size(); ++i) {
            z_files.push_back(numbered("z", i));
            write_face_csv(traj.z_snaps[i], dir + "/" + z_files.back());
        }
    }

    Manifest mf;
    mf.set("format", std::string("pflow-run-1"));
    mf.set("domain", domain_str);
    mf.set("h", m.h);
    mf.set("s0", m.domain.s0);
    mf.set("layout", std::string(m.layout == Mesh::Layout::Radial
                                     ? "radial"
                                     : (m.layout == Mesh::Layout::Segment ? "segment"
                                                                          : "cartesian")));
    mf.set("p", traj.p);
    mf.set("eps", traj.eps);
    if (tv) mf.set("eps_schedule", join_list(traj.eps_schedule));
    mf.set("tau", traj.tau);
    mf.set("n", traj.bval);
    mf.set("T", traj.T);
    mf.set("u0", u0_desc);
    mf.set("snapshot_times", join_list(times));
    mf.set("snapshot_files", join_names(snap_files));
    if (tv) mf.set("z_files", join_names(z_files));
    mf.set("tol_picard", ctl.tol_picard);
    mf.set("max_picard", static_cast<long long>(ctl.max_picard));
    mf.set("tol_lin", ctl.tol_lin);
    mf.set("max_lin", static_cast<long long>(ctl.max_lin));
    mf.set("picard_total", static_cast<long long>(traj.picard_total));
    mf.set("lin_total", static_cast<long long>(traj.lin_total));
    mf.set("picard_max", static_cast<long long>(traj.picard_max));
    if (tv) {
        mf.set("z_min_boundary_trace", traj.z_trace_min);
        mf.set("z_abs_max", traj.z_abs_max);
        mf.set("step_residual_max", traj.step_residual_max);
    }
    mf.set("quadrature", std::string("midpoint-space,trapezoid-time"));
    mf.set("kernels", std::string(kern::backend_name()));
    mf.set("jobs", static_cast<long long>(jobs));
    for (const auto& kv : extra) mf.set(kv.first, kv.second);
    write_manifest(mf, dir + "/manifest.txt");
}

RunData read_run(const std::string& dir) {
    RunData rd;
    rd.manifest = read_manifest(dir + "/manifest.txt");
    const Manifest& mf = rd.manifest;

    DomainSpec dom = parse_domain(mf.get("domain"), mf.get_num("h"), mf.get_num("s0"));
    const std::string layout = mf.get("layout");
    if (layout == "radial") {
        rd.mesh = build_radial_mesh(dom);
    } else if (layout == "cartesian") {
        rd.mesh = build_mesh(dom);
    } else {
        throw BadRange("run manifest has unsupported layout '" + layout + "'");
    }

    Trajectory& tr = rd.traj;
    tr.mesh = rd.mesh;
    tr.p = mf.get_num("p");
    tr.eps = mf.get_num("eps");
    tr.tau = mf.get_num("tau");
    tr.bval = mf.get_num("n");
    tr.T = mf.get_num("T");
    if (mf.has("eps_schedule")) tr.eps_schedule = mf.get_list("eps_schedule");

    std::vector<double> times = mf.get_list("snapshot_times");
    std::vector<std::string> files = split(mf.get("snapshot_files"), ',');
    if (times.size() != files.size())
        throw BadRange("run manifest: snapshot_times and snapshot_files disagree");
    for (std::size_t i = 0; i < files.size(); ++i)
        tr.snaps.push_back(read_snapshot_csv(rd.mesh, dir + "/" + trim(files[i]), times[i]));

    if (mf.has("z_files")) {
        for (const std::string& zf : split(mf.get("z_files"), ','))
            tr.z_snaps.push_back(read_face_csv(rd.mesh, dir + "/" + trim(zf)));
    }
    tr.picard_total = static_cast<long>(mf.get_num("picard_total"));
    tr.lin_total = static_cast<long>(mf.get_num("lin_total"));
    tr.picard_max = static_cast<int>(mf.get_num("picard_max"));
    if (mf.has("z_min_boundary_trace")) tr.z_trace_min = mf.get_num("z_min_boundary_trace");
    if (mf.has("z_abs_max")) tr.z_abs_max = mf.get_num("z_abs_max");
    if (mf.has("step_residual_max")) tr.step_residual_max = mf.get_num("step_residual_max");
    return rd;
}

void write_ladder_report(const LadderReport& rep, const std::string& dir,
                         const std::string& domain_str, int jobs, bool svg_plot) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    {
        std::ofstream f = open_out(dir + "/report.csv");
        f << "level,time,L1_K,sup_K,diff_prev,violations\n";
        for (const LadderLevel& lev : rep.levels) {
            if (lev.failed) continue;
            for (std::size_t i = 0; i < lev.traj.snaps.size(); ++i) {
                double dp = i < lev.diff_prev.size() ? lev.diff_prev[i] : 0.0;
                double vi = i < lev.viol_prev.size() ? lev.viol_prev[i] : 0.0;
                f << fmt(lev.n) << ',' << fmt(lev.traj.snaps[i].t) << ',' << fmt(lev.l1_K[i])
                  << ',' << fmt(lev.sup_K[i]) << ',' << fmt(dp) << ',' << fmt(vi) << "\n";
            }
        }
    }
    {
        std::ofstream f = open_out(dir + "/classification.txt");
        f << to_string(rep.classification) << "\n";
    }

    const LadderLevel* top = nullptr;
    for (auto it = rep.levels.rbegin(); it != rep.levels.rend(); ++it)
        if (!it->failed) {
            top = &*it;
            break;
        }
    if (top) write_snapshot_csv(top->traj.snaps.back(), dir + "/limit.csv");

    Manifest mf;
    mf.set("format", std::string("pflow-ladder-1"));
    mf.set("domain", domain_str);
    mf.set("h", rep.mesh->h);
    mf.set("s0", rep.mesh->domain.s0);
    mf.set("layout", std::string(rep.mesh->layout == Mesh::Layout::Radial ? "radial"
                                                                          : "cartesian"));
    mf.set("p", rep.p);
    mf.set("T", rep.T);
    mf.set("tau", rep.tau);
    mf.set("delta", rep.delta);
    mf.set("tol_ladder", rep.tol_ladder);
    mf.set("levels", static_cast<long long>(rep.levels.size()));
    std::vector<double> ns;
    for (const LadderLevel& lev : rep.levels) ns.push_back(lev.n);
    mf.set("n_values", join_list(ns));
    mf.set("snapshot_times", join_list(rep.snapshot_times));
    for (std::size_t k = 0; k < rep.levels.size(); ++k) {
        if (rep.levels[k].failed)
            mf.set("level_" + std::to_string(k) + "_error", rep.levels[k].error);
        else
            mf.set("level_" + std::to_string(k) + "_eps",
                   rep.levels[k].traj.eps_schedule.empty()
                       ? fmt(rep.levels[k].traj.eps)
                       : join_list(rep.levels[k].traj.eps_schedule));
    }
    mf.set("classification", to_string(rep.classification));
    mf.set("quadrature", std::string("midpoint-space,trapezoid-time"));
    mf.set("kernels", std::string(kern::backend_name()));
    mf.set("jobs", static_cast<long long>(jobs));
    write_manifest(mf, dir + "/manifest.txt");

    if (svg_plot && top) {
        try {
            BarrierFit fit = barrier_exponent_fit(rep);
            const Mesh& m = *rep.mesh;
            std::size_t deep = 0;
            for (std::size_t i = 1; i < m.n_cells(); ++i)
                if (m.bdist[i] > m.bdist[deep]) deep = i;
            std::vector<double> xs, ys;
            for (const Field& s : top->traj.snaps) {
                if (s.t <= 0.0 || s.v[deep] <= 0.0) continue;
                xs.push_back(s.t);
                ys.push_back(s.v[deep]);
            }
            write_loglog_svg(dir + "/barrier_fit.svg",
                             "deep-cell growth, slope " + fmt(fit.time_exponent), xs, ys,
                             fit.time_exponent, "t", "u");
        } catch (const Error&) {
            // No fit available (not converged / too coarse): plots are
            // best-effort extras, the report stands without them.
        }
    }
}

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::vector<double>& x, const std::vector<double>& y, double slope,
                      const std::string& xlabel, const std::string& ylabel) {
    if (x.size() != y.size() || x.size() < 2)
        throw InsufficientData("write_loglog_svg: need matching points");
    const double W = 480, H = 360, ML = 60, MR = 20, MT = 40, MB = 50;
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw BadRange("write_loglog_svg: log axes want positive data");
        lx[i] = std::log10(x[i]);
        ly[i] = std::log10(y[i]);
    }
    double x0 = *std::min_element(lx.begin(), lx.end());
    double x1 = *std::max_element(lx.begin(), lx.end());
    double y0 = *std::min_element(ly.begin(), ly.end());
    double y1 = *std::max_element(ly.begin(), ly.end());
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto X = [&](double v) { return ML + (v - x0) / (x1 - x0) * (W - ML - MR); };
    auto Y = [&](double v) { return H - MB - (v - y0) / (y1 - y0) * (H - MT - MB); };

    std::ofstream f = open_out(path);
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    f << "<rect width='100%' height='100%' fill='white'/>\n";
    f << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
      << "</text>\n";
    f << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
      << "' stroke='black'/>\n";
    f << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
      << "' stroke='black'/>\n";
    f << "<text x='" << W / 2 << "' y='" << H - 12
      << "' text-anchor='middle' font-size='12'>log10 " << xlabel << "</text>\n";
    f << "<text x='16' y='" << H / 2 << "' font-size='12' transform='rotate(-90 16 " << H / 2
      << ")' text-anchor='middle'>log10 " << ylabel << "</text>\n";
    for (std::size_t i = 0; i < lx.size(); ++i)
        f << "<circle cx='" << X(lx[i]) << "' cy='" << Y(ly[i]) << "' r='3' fill='steelblue'/>\n";
    // fitted line through the mean point
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    // slope given for natural log == slope in log10/log10
    double ya = my + slope * (x0 - mx), yb = my + slope * (x1 - mx);
    f << "<line x1='" << X(x0) << "' y1='" << Y(ya) << "' x2='" << X(x1) << "' y2='" << Y(yb)
      << "' stroke='crimson' stroke-dasharray='4 3'/>\n";
    f << "<text x='" << W - MR - 4 << "' y='" << MT + 14
      << "' text-anchor='end' font-size='12' fill='crimson'>slope " << fmt(slope) << "</text>\n";
    f << "</svg>\n";
}

} // namespace pflow::io

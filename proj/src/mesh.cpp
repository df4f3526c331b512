#include "pflow/mesh.hpp"

#include "pflow/errors.hpp"
#include "pflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pflow {

double Mesh::total_volume() const { return kern::sum(vol.data(), vol.size()); }

namespace {

void add_boundary_face(Mesh& m, int cell, Vec2 fpos_xy, double area, double dist) {
    m.fneg.push_back(cell);
    m.fpos.push_back(-1);
    m.farea.push_back(area);
    m.fdist.push_back(dist);
    m.fweight.push_back(area * dist);
    m.fx.push_back(fpos_xy.x);
    m.fy.push_back(fpos_xy.y);
    m.faxis.push_back(0);
    m.bface.push_back(static_cast<int>(m.fneg.size()) - 1);
    Vec2 n = m.domain.shape.outward_normal_at(fpos_xy);
    m.bnx.push_back(n.x);
    m.bny.push_back(n.y);
    m.near_boundary[cell] = 1;
}

} // namespace

MeshPtr build_mesh(const DomainSpec& d) {
    auto mesh = std::make_shared<Mesh>();
    Mesh& m = *mesh;
    m.layout = Mesh::Layout::Cartesian2D;
    m.domain = d;
    m.h = d.h;

    const ConvexShape& shape = d.shape;
    const double h = d.h;
    Vec2 c = shape.centroid();
    Vec2 lo, hi;
    shape.bbox(lo, hi);

    // Grid symmetric about the centroid: centers at c + (i + 1/2) h.
    int imin = static_cast<int>(std::floor((lo.x - c.x) / h - 0.5)) - 1;
    int imax = static_cast<int>(std::ceil((hi.x - c.x) / h + 0.5)) + 1;
    int jmin = static_cast<int>(std::floor((lo.y - c.y) / h - 0.5)) - 1;
    int jmax = static_cast<int>(std::ceil((hi.y - c.y) / h + 0.5)) + 1;
    m.nx = imax - imin + 1;
    m.ny = jmax - jmin + 1;
    m.ox = c.x + (imin + 0.5) * h;
    m.oy = c.y + (jmin + 0.5) * h;
    m.cell_at.assign(static_cast<std::size_t>(m.nx) * m.ny, -1);

    auto center = [&](int gi, int gj) -> Vec2 {
        return {m.ox + gi * h, m.oy + gj * h};
    };
    auto grid = [&](int gi, int gj) -> int& {
        return m.cell_at[static_cast<std::size_t>(gj) * m.nx + gi];
    };

    for (int gj = 0; gj < m.ny; ++gj) {
        for (int gi = 0; gi < m.nx; ++gi) {
            Vec2 p = center(gi, gj);
            if (!shape.contains(p)) continue;
            if (shape.boundary_distance(p) <= 1e-9 * h) continue;
            grid(gi, gj) = static_cast<int>(m.cx.size());
            m.cx.push_back(p.x);
            m.cy.push_back(p.y);
            m.vol.push_back(h * h);
            m.bdist.push_back(shape.boundary_distance(p));
        }
    }
    if (m.cx.empty()) throw EmptyDomain("build_mesh: no cell center falls inside the domain");
    m.near_boundary.assign(m.n_cells(), 0);

    for (int gj = 0; gj < m.ny; ++gj) {
        for (int gi = 0; gi < m.nx; ++gi) {
            int cell = grid(gi, gj);
            if (cell < 0) continue;
            Vec2 p = center(gi, gj);
            const int nbors[4][2] = {{gi + 1, gj}, {gi - 1, gj}, {gi, gj + 1}, {gi, gj - 1}};
            const Vec2 offs[4] = {{0.5 * h, 0.0}, {-0.5 * h, 0.0}, {0.0, 0.5 * h}, {0.0, -0.5 * h}};
            for (int s = 0; s < 4; ++s) {
                int ni = nbors[s][0], nj = nbors[s][1];
                int nb = (ni >= 0 && ni < m.nx && nj >= 0 && nj < m.ny) ? grid(ni, nj) : -1;
                if (nb >= 0) {
                    // interior face, built once from the lower-index side
                    if (s == 0 || s == 2) {
                        m.fneg.push_back(cell);
                        m.fpos.push_back(nb);
                        m.farea.push_back(h);
                        m.fdist.push_back(h);
                        m.fweight.push_back(h * h);
                        m.fx.push_back(p.x + offs[s].x);
                        m.fy.push_back(p.y + offs[s].y);
                        m.faxis.push_back(s == 0 ? 0 : 1);
                    }
                } else {
                    add_boundary_face(m, cell, p + offs[s], h, 0.5 * h);
                    m.faxis.back() = (s < 2) ? 0 : 1;
                }
            }
        }
    }
    return mesh;
}

MeshPtr build_radial_mesh(const DomainSpec& d) {
    if (d.kind != DomainKind::Disk)
        throw BadRange("build_radial_mesh: domain must be a disk");
    auto mesh = std::make_shared<Mesh>();
    Mesh& m = *mesh;
    m.layout = Mesh::Layout::Radial;
    m.domain = d;
    m.h = d.h;

    const double R = d.shape.disk_radius();
    const double h = d.h;
    const int cells = static_cast<int>(std::floor(R / h + 0.5));
    if (cells < 1) throw EmptyDomain("build_radial_mesh: spacing exceeds the radius");

    const double two_pi = 2.0 * M_PI;
    for (int i = 0; i < cells; ++i) {
        double rho = (i + 0.5) * h;
        m.cx.push_back(rho);
        m.cy.push_back(0.0);
        m.vol.push_back(two_pi * rho * h);  // exact annulus area
        m.bdist.push_back(R - rho);
    }
    m.near_boundary.assign(m.n_cells(), 0);

    for (int i = 1; i < cells; ++i) {
        m.fneg.push_back(i - 1);
        m.fpos.push_back(i);
        m.farea.push_back(two_pi * i * h);
        m.fdist.push_back(h);
        m.fweight.push_back(two_pi * i * h * h);
        m.fx.push_back(i * h);
        m.fy.push_back(0.0);
        m.faxis.push_back(0);
    }
    add_boundary_face(m, cells - 1, {cells * h, 0.0}, two_pi * cells * h, 0.5 * h);
    return mesh;
}

MeshPtr build_segment_mesh(double length, double h) {
    if (!(length > 0.0) || !(h > 0.0)) throw BadRange("build_segment_mesh: bad length or spacing");
    const int cells = static_cast<int>(std::lround(length / h));
    if (cells < 1) throw EmptyDomain("build_segment_mesh: spacing exceeds the length");
    const double L = cells * h;

    auto mesh = std::make_shared<Mesh>();
    Mesh& m = *mesh;
    m.layout = Mesh::Layout::Segment;
    m.domain = DomainSpec::rectangle(L, L, h);
    m.h = h;

    for (int i = 0; i < cells; ++i) {
        double x = (i + 0.5) * h;
        m.cx.push_back(x);
        m.cy.push_back(0.0);
        m.vol.push_back(h);
        m.bdist.push_back(std::min(x, L - x));
    }
    m.near_boundary.assign(m.n_cells(), 0);

    // left end, oriented outward (-x)
    m.fneg.push_back(0);
    m.fpos.push_back(-1);
    m.farea.push_back(1.0);
    m.fdist.push_back(0.5 * h);
    m.fweight.push_back(0.5 * h);
    m.fx.push_back(0.0);
    m.fy.push_back(0.0);
    m.faxis.push_back(0);
    m.bface.push_back(0);
    m.bnx.push_back(-1.0);
    m.bny.push_back(0.0);
    m.near_boundary[0] = 1;

    for (int i = 1; i < cells; ++i) {
        m.fneg.push_back(i - 1);
        m.fpos.push_back(i);
        m.farea.push_back(1.0);
        m.fdist.push_back(h);
        m.fweight.push_back(h);
        m.fx.push_back(i * h);
        m.fy.push_back(0.0);
        m.faxis.push_back(0);
    }

    m.fneg.push_back(cells - 1);
    m.fpos.push_back(-1);
    m.farea.push_back(1.0);
    m.fdist.push_back(0.5 * h);
    m.fweight.push_back(0.5 * h);
    m.fx.push_back(L);
    m.fy.push_back(0.0);
    m.faxis.push_back(0);
    m.bface.push_back(static_cast<int>(m.fneg.size()) - 1);
    m.bnx.push_back(1.0);
    m.bny.push_back(0.0);
    m.near_boundary[cells - 1] = 1;
    return mesh;
}

Field make_field(const MeshPtr& m, double value) {
    Field f;
    f.mesh = m;
    f.v.assign(m->n_cells(), value);
    return f;
}

void check_same_mesh(const MeshPtr& a, const MeshPtr& b) {
    if (a.get() != b.get())
        throw MeshMismatch("fields live on different meshes");
}

FaceVector gradient(const Field& u, double bval) {
    const Mesh& m = *u.mesh;
    FaceVector g;
    g.mesh = u.mesh;
    g.q.resize(m.n_faces());
    for (std::size_t f = 0; f < m.n_faces(); ++f) {
        int a = m.fneg[f], b = m.fpos[f];
        g.q[f] = ((b >= 0 ? u.v[b] : bval) - u.v[a]) / m.fdist[f];
    }
    return g;
}

FaceVector gradient(const Field& u, const std::vector<double>& bvals) {
    const Mesh& m = *u.mesh;
    if (bvals.size() != m.bface.size())
        throw MeshMismatch("gradient: boundary value count does not match the mesh");
    FaceVector g;
    g.mesh = u.mesh;
    g.q.resize(m.n_faces());
    for (std::size_t f = 0; f < m.n_faces(); ++f) {
        int a = m.fneg[f], b = m.fpos[f];
        if (b >= 0) g.q[f] = (u.v[b] - u.v[a]) / m.fdist[f];
    }
    for (std::size_t k = 0; k < m.bface.size(); ++k) {
        int f = m.bface[k];
        g.q[f] = (bvals[k] - u.v[m.fneg[f]]) / m.fdist[f];
    }
    return g;
}

Field divergence(const FaceVector& q) {
    const Mesh& m = *q.mesh;
    Field d = make_field(q.mesh);
    for (std::size_t f = 0; f < m.n_faces(); ++f) {
        double t = q.q[f] * m.farea[f];
        d.v[m.fneg[f]] += t;
        if (m.fpos[f] >= 0) d.v[m.fpos[f]] -= t;
    }
    for (std::size_t i = 0; i < m.n_cells(); ++i) d.v[i] /= m.vol[i];
    return d;
}

Field truncate(const Field& u, double a, double b) {
    if (a > b) throw BadRange("truncate: lower bound exceeds upper bound");
    Field out;
    out.mesh = u.mesh;
    out.t = u.t;
    out.v.resize(u.v.size());
    kern::clamp(u.v.data(), a, b, out.v.data(), u.v.size());
    return out;
}

double integral(const Field& u) {
    const Mesh& m = *u.mesh;
    std::vector<double> ones(u.v.size(), 1.0);
    return kern::dot_w(u.v.data(), ones.data(), m.vol.data(), u.v.size());
}

double l1_norm(const Field& u) {
    const Mesh& m = *u.mesh;
    std::vector<double> zero(u.v.size(), 0.0);
    return kern::asum_diff_w(u.v.data(), zero.data(), m.vol.data(), u.v.size());
}

double sup_norm(const Field& u) { return kern::max_abs(u.v.data(), u.v.size()); }

double l1_diff(const Field& a, const Field& b) {
    check_same_mesh(a.mesh, b.mesh);
    return kern::asum_diff_w(a.v.data(), b.v.data(), a.mesh->vol.data(), a.v.size());
}

double sup_diff(const Field& a, const Field& b) {
    check_same_mesh(a.mesh, b.mesh);
    return kern::max_abs_diff(a.v.data(), b.v.data(), a.v.size());
}

double pos_part_integral(const Field& a, const Field& b) {
    check_same_mesh(a.mesh, b.mesh);
    return kern::psum_diff_w(a.v.data(), b.v.data(), a.mesh->vol.data(), a.v.size());
}

Mask monitor_mask(const MeshPtr& m, double delta) {
    if (!(delta >= 0.0)) throw BadRange("monitor_mask: negative margin");
    Mask k;
    for (std::size_t i = 0; i < m->n_cells(); ++i) {
        if (m->bdist[i] >= delta * (1.0 - 1e-12)) {
            k.cells.push_back(static_cast<std::uint32_t>(i));
            k.volume += m->vol[i];
        }
    }
    return k;
}

double l1_norm(const Field& u, const Mask& k) {
    const Mesh& m = *u.mesh;
    double s = 0.0;
    for (std::uint32_t i : k.cells) s += std::fabs(u.v[i]) * m.vol[i];
    return s;
}

double sup_norm(const Field& u, const Mask& k) {
    double s = 0.0;
    for (std::uint32_t i : k.cells) s = std::max(s, std::fabs(u.v[i]));
    return s;
}

double l1_diff(const Field& a, const Field& b, const Mask& k) {
    check_same_mesh(a.mesh, b.mesh);
    const Mesh& m = *a.mesh;
    double s = 0.0;
    for (std::uint32_t i : k.cells) s += std::fabs(a.v[i] - b.v[i]) * m.vol[i];
    return s;
}

double sup_diff(const Field& a, const Field& b, const Mask& k) {
    check_same_mesh(a.mesh, b.mesh);
    double s = 0.0;
    for (std::uint32_t i : k.cells) s = std::max(s, std::fabs(a.v[i] - b.v[i]));
    return s;
}

double max_drop(const Field& a, const Field& b, const Mask& k) {
    check_same_mesh(a.mesh, b.mesh);
    double s = -std::numeric_limits<double>::infinity();
    for (std::uint32_t i : k.cells) s = std::max(s, a.v[i] - b.v[i]);
    return s;
}

double p_energy(const std::vector<Field>& snaps, double p, double k) {
    if (!(k > 0.0)) throw BadRange("p_energy: truncation level must be positive");
    if (!(p >= 1.0)) throw BadExponent("p_energy: p must be at least 1");
    if (snaps.size() < 2) throw InsufficientData("p_energy: need at least two snapshots");
    const MeshPtr mesh = snaps.front().mesh;
    const Mesh& m = *mesh;

    auto energy = [&](const Field& u) {
        Field tu = truncate(u, -k, k);
        double e = 0.0;
        for (std::size_t f = 0; f < m.n_faces(); ++f) {
            if (m.fpos[f] < 0) continue;
            double g = (tu.v[m.fpos[f]] - tu.v[m.fneg[f]]) / m.fdist[f];
            e += std::pow(std::fabs(g), p) * m.fweight[f];
        }
        return e;
    };

    double total = 0.0;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        check_same_mesh(snaps[i].mesh, mesh);
        double t_prev = (i == 0) ? snaps[i].t : snaps[i - 1].t;
        double t_next = (i + 1 == snaps.size()) ? snaps[i].t : snaps[i + 1].t;
        double w = 0.5 * (t_next - t_prev);
        if (w < 0.0) throw BadRange("p_energy: snapshot times must be nondecreasing");
        total += w * energy(snaps[i]);
    }
    return total;
}

} // namespace pflow

#pragma once

#include "pflow/domain.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace pflow {

// Cell-centered finite volume mesh. Cartesian meshes keep cells whose
// center lies strictly inside the domain; where a neighbor center falls
// outside, the cell gets a boundary face at distance h/2 carrying the
// Dirichlet datum. Radial meshes discretize a disk in the radius only.
//
// Face data is stored flat. Interior faces are oriented along +axis from
// cell `fneg` to cell `fpos`; boundary faces (fpos < 0) are oriented along
// the outward normal, so a positive face value always means outflow in
// divergence() and gradient() needs no per-face sign.
struct Mesh {
    enum class Layout { Cartesian2D, Radial, Segment };

    Layout layout = Layout::Cartesian2D;
    DomainSpec domain;
    double h = 0.0;

    // cells
    std::vector<double> cx, cy;  // centers (radial: cx = rho; segment: cx = x)
    std::vector<double> vol;
    std::vector<double> bdist;   // center distance to the domain boundary
    std::vector<std::uint8_t> near_boundary;

    // faces
    std::vector<int> fneg, fpos;            // fpos = -1 on boundary faces
    std::vector<double> farea, fdist, fweight;  // fweight = farea * fdist
    std::vector<double> fx, fy;             // face midpoints
    std::vector<std::uint8_t> faxis;

    // boundary faces (indices into the face arrays) and their outward
    // normals taken from the continuum shape, not the grid staircase
    std::vector<int> bface;
    std::vector<double> bnx, bny;

    // cartesian index map (Cartesian2D only)
    int nx = 0, ny = 0;
    double ox = 0.0, oy = 0.0;  // center of index (0,0)
    std::vector<int> cell_at;   // nx*ny entries, -1 where no cell

    std::size_t n_cells() const { return cx.size(); }
    std::size_t n_faces() const { return fneg.size(); }
    double total_volume() const;
};

using MeshPtr = std::shared_ptr<const Mesh>;

MeshPtr build_mesh(const DomainSpec& d);
// 1D reduction of a disk domain. Throws BadRange for non-disk domains.
MeshPtr build_radial_mesh(const DomainSpec& d);
// 1D segment [0, L], both endpoints Dirichlet.
MeshPtr build_segment_mesh(double length, double h);

struct Field {
    MeshPtr mesh;
    std::vector<double> v;
    double t = 0.0;

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
};

struct FaceVector {
    MeshPtr mesh;
    std::vector<double> q;
};

Field make_field(const MeshPtr& m, double value = 0.0);
template <typename F>
Field make_field_from(const MeshPtr& m, F&& f) {
    Field out = make_field(m);
    for (std::size_t i = 0; i < m->n_cells(); ++i) out.v[i] = f(Vec2{m->cx[i], m->cy[i]});
    return out;
}

void check_same_mesh(const MeshPtr& a, const MeshPtr& b);

// Two-point gradient; `bval` (or one value per boundary face) supplies the
// Dirichlet datum on boundary faces.
FaceVector gradient(const Field& u, double bval);
FaceVector gradient(const Field& u, const std::vector<double>& bvals);
Field divergence(const FaceVector& q);

// Pointwise clamp of the cell values into [a, b].
Field truncate(const Field& u, double a, double b);

double integral(const Field& u);
double l1_norm(const Field& u);
double sup_norm(const Field& u);
double l1_diff(const Field& a, const Field& b);
double sup_diff(const Field& a, const Field& b);
// integral of max(a-b, 0)
double pos_part_integral(const Field& a, const Field& b);

// Cells at distance >= delta from the boundary.
struct Mask {
    std::vector<std::uint32_t> cells;
    double volume = 0.0;
};
Mask monitor_mask(const MeshPtr& m, double delta);

double l1_norm(const Field& u, const Mask& k);
double sup_norm(const Field& u, const Mask& k);
double l1_diff(const Field& a, const Field& b, const Mask& k);
double sup_diff(const Field& a, const Field& b, const Mask& k);
// max over the mask of (a - b), not clipped at zero
double max_drop(const Field& a, const Field& b, const Mask& k);

// Space-time p-Dirichlet energy of the k-truncation over snapshots
// (interior faces only; trapezoid weights on the snapshot times).
double p_energy(const std::vector<Field>& snaps, double p, double k);

} // namespace pflow

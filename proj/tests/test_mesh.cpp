#include "doctest.h"

#include "pflow/domain.hpp"
#include "pflow/errors.hpp"
#include "pflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace pflow;
using doctest::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;
} // namespace

TEST_SUITE("mesh") {

TEST_CASE("unit square at h = 1/2 has the four symmetric cells") {
    MeshPtr m = build_mesh(DomainSpec::rectangle(1.0, 1.0, 0.5));
    REQUIRE(m->n_cells() == 4);
    std::vector<std::pair<double, double>> centers;
    for (std::size_t i = 0; i < 4; ++i) centers.emplace_back(m->cx[i], m->cy[i]);
    std::sort(centers.begin(), centers.end());
    CHECK(centers[0].first == Approx(-0.25).epsilon(1e-15));
    CHECK(centers[0].second == Approx(-0.25).epsilon(1e-15));
    CHECK(centers[3].first == Approx(0.25).epsilon(1e-15));
    CHECK(centers[3].second == Approx(0.25).epsilon(1e-15));
    for (std::size_t i = 0; i < 4; ++i) CHECK(m->vol[i] == Approx(0.25).epsilon(1e-15));
    // every cell has exactly four faces
    std::vector<int> deg(m->n_cells(), 0);
    for (std::size_t f = 0; f < m->n_faces(); ++f) {
        ++deg[m->fneg[f]];
        if (m->fpos[f] >= 0) ++deg[m->fpos[f]];
    }
    for (int d : deg) CHECK(d == 4);
}

TEST_CASE("too-coarse grids leave no cells") {
    CHECK_THROWS_AS(build_mesh(DomainSpec::disk(1.0, 2.5)), EmptyDomain);
}

TEST_CASE("disk cell count approaches area / h^2") {
    double h = 1.0 / 64;
    MeshPtr m = build_mesh(DomainSpec::disk(1.0, h));
    double expect = kPi / (h * h);
    CHECK(std::fabs(static_cast<double>(m->n_cells()) - expect) < 0.01 * expect);
    CHECK(m->total_volume() == Approx(m->n_cells() * h * h).epsilon(1e-12));
    // no cell center closer than h/2 to the boundary
    for (std::size_t i = 0; i < m->n_cells(); ++i) CHECK(m->bdist[i] >= h / 2 - 1e-12);
    // boundary-face normals point along the continuum outward radial direction
    for (std::size_t k = 0; k < m->bface.size(); ++k) {
        int f = m->bface[k];
        double r = std::hypot(m->fx[f], m->fy[f]);
        double along = (m->fx[f] * m->bnx[k] + m->fy[f] * m->bny[k]) / r;
        CHECK(along > 0.9);
    }
}

TEST_CASE("radial mesh integrates the disk exactly") {
    MeshPtr m = build_radial_mesh(DomainSpec::disk(1.0, 1.0 / 32));
    REQUIRE(m->n_cells() == 32);
    CHECK(m->total_volume() == Approx(kPi).epsilon(1e-13));
    for (std::size_t i = 0; i < m->n_cells(); ++i)
        CHECK(m->cx[i] == Approx((i + 0.5) / 32.0).epsilon(1e-15));
    CHECK_THROWS_AS(build_radial_mesh(DomainSpec::rectangle(1.0, 1.0, 0.25)), BadRange);
}

TEST_CASE("segment mesh and its gradients") {
    MeshPtr m = build_segment_mesh(3.0, 1.0);
    REQUIRE(m->n_cells() == 3);
    Field u = make_field(m);
    u[0] = 0.0;
    u[1] = 1.0;
    u[2] = 2.0;
    FaceVector g = gradient(u, 0.0);
    int n_interior = 0;
    for (std::size_t f = 0; f < m->n_faces(); ++f) {
        if (m->fpos[f] >= 0) {
            CHECK(g.q[f] == Approx(1.0).epsilon(1e-15));
            ++n_interior;
        }
    }
    CHECK(n_interior == 2);
    // two Dirichlet faces at distance h/2
    int n_b = 0;
    for (std::size_t f = 0; f < m->n_faces(); ++f)
        if (m->fpos[f] < 0) {
            CHECK(m->fdist[f] == Approx(0.5).epsilon(1e-15));
            ++n_b;
        }
    CHECK(n_b == 2);
}

TEST_CASE("constant fields have zero gradient against a matching datum") {
    MeshPtr m = build_mesh(DomainSpec::disk(1.0, 0.125));
    Field u = make_field(m, 3.25);
    FaceVector g = gradient(u, 3.25);
    for (double v : g.q) CHECK(v == 0.0);
}

TEST_CASE("divergence is the negative adjoint of the gradient") {
    MeshPtr m = build_mesh(DomainSpec::rectangle(1.0, 1.0, 0.1));
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Field u = make_field(m);
    for (auto& v : u.v) v = U(rng);
    FaceVector q{m, std::vector<double>(m->n_faces())};
    for (auto& v : q.q) v = U(rng);

    FaceVector g = gradient(u, 0.0);  // zero Dirichlet datum on the boundary
    Field dq = divergence(q);

    double lhs = 0.0;
    for (std::size_t i = 0; i < m->n_cells(); ++i) lhs += dq[i] * u[i] * m->vol[i];
    double rhs = 0.0, scale = 0.0;
    for (std::size_t f = 0; f < m->n_faces(); ++f) {
        rhs -= q.q[f] * g.q[f] * m->fweight[f];
        scale += std::fabs(q.q[f] * g.q[f]) * m->fweight[f];
    }
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, scale));
}

TEST_CASE("truncation clamps, is idempotent and 1-Lipschitz") {
    MeshPtr m = build_segment_mesh(3.0, 1.0);
    Field u = make_field(m);
    u[0] = 0.0;
    u[1] = 2.0;
    u[2] = 7.0;
    Field tu = truncate(u, 1.0, 3.0);
    CHECK(tu[0] == 1.0);
    CHECK(tu[1] == 2.0);
    CHECK(tu[2] == 3.0);
    Field tt = truncate(tu, 1.0, 3.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(tt[i] == tu[i]);
    // |T(a) - T(b)| <= |a - b| sampled
    Field w = make_field(m);
    w[0] = 0.5;
    w[1] = 2.5;
    w[2] = 3.5;
    Field tw = truncate(w, 1.0, 3.0);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::fabs(tw[i] - tu[i]) <= std::fabs(w[i] - u[i]) + 1e-15);
    CHECK_THROWS_AS(truncate(u, 2.0, 1.0), BadRange);
}

TEST_CASE("norms and integrals") {
    MeshPtr m = build_segment_mesh(2.0, 1.0);
    Field a = make_field(m);
    a[0] = 1.0;
    a[1] = -2.0;
    CHECK(integral(a) == Approx(-1.0).epsilon(1e-15));
    CHECK(l1_norm(a) == Approx(3.0).epsilon(1e-15));
    CHECK(sup_norm(a) == Approx(2.0).epsilon(1e-15));
    Field b = make_field(m, 0.5);
    CHECK(l1_diff(a, b) == Approx(0.5 + 2.5).epsilon(1e-15));
    CHECK(sup_diff(a, b) == Approx(2.5).epsilon(1e-15));
    CHECK(pos_part_integral(a, b) == Approx(0.5).epsilon(1e-15));
    CHECK(pos_part_integral(b, a) == Approx(2.5).epsilon(1e-15));
}

TEST_CASE("monitor mask keeps cells away from the boundary") {
    double h = 0.125;
    MeshPtr m = build_mesh(DomainSpec::rectangle(1.0, 1.0, h));
    Mask k = monitor_mask(m, 0.25);
    REQUIRE(!k.cells.empty());
    double vol = 0.0;
    for (auto c : k.cells) {
        CHECK(m->bdist[c] >= 0.25 * (1.0 - 1e-12));
        vol += m->vol[c];
    }
    CHECK(k.volume == Approx(vol).epsilon(1e-15));
    // interior 0.5 x 0.5 block = 16 cells of the 64
    CHECK(k.cells.size() == 16);

    Field u = make_field(m, 1.0);
    Field v = make_field(m, 0.0);
    for (auto c : k.cells) v.v[c] = 2.0;
    CHECK(sup_norm(u, k) == Approx(1.0));
    CHECK(l1_norm(v, k) == Approx(2.0 * k.volume).epsilon(1e-14));
    CHECK(max_drop(u, v, k) == Approx(-1.0).epsilon(1e-15));
    CHECK(max_drop(v, u, k) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("space-time energy of truncations") {
    MeshPtr m = build_segment_mesh(2.0, 1.0);
    Field a = make_field(m);
    a[0] = 0.0;
    a[1] = 3.0;
    a.t = 0.0;
    Field b = a;
    b.t = 1.0;
    std::vector<Field> snaps{a, b};

    // T_1 turns the jump 0 -> 3 into 0 -> 1 on the single interior face
    CHECK(p_energy(snaps, 2.0, 1.0) == Approx(1.0).epsilon(1e-14));
    // k above the range stops changing the energy
    CHECK(p_energy(snaps, 2.0, 3.0) == Approx(p_energy(snaps, 2.0, 5.0)).epsilon(1e-15));
    // nondecreasing in k
    double prev = 0.0;
    for (double k = 0.5; k <= 4.0; k += 0.5) {
        double e = p_energy(snaps, 1.5, k);
        CHECK(e >= prev - 1e-15);
        prev = e;
    }
    // constant snapshots carry no energy
    std::vector<Field> flat{make_field(m, 2.0), make_field(m, 2.0)};
    flat[1].t = 1.0;
    CHECK(p_energy(flat, 1.5, 1.0) == 0.0);
}

TEST_CASE("field helpers") {
    MeshPtr m = build_mesh(DomainSpec::disk(1.0, 0.25));
    Field f = make_field_from(m, [](Vec2 p) { return p.x + 2.0 * p.y; });
    for (std::size_t i = 0; i < m->n_cells(); ++i)
        CHECK(f[i] == Approx(m->cx[i] + 2.0 * m->cy[i]).epsilon(1e-15));
    MeshPtr m2 = build_mesh(DomainSpec::disk(1.0, 0.125));
    CHECK_THROWS_AS(check_same_mesh(m, m2), MeshMismatch);
}

} // TEST_SUITE("mesh")

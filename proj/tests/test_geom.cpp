#include "doctest.h"

#include "pflow/errors.hpp"
#include "pflow/geom.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace pflow;
using doctest::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<Vec2> unit_square() {
    return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
}

// Brute-force boundary distance: min over densely sampled edge points.
double sampled_boundary_distance(const std::vector<Vec2>& poly, Vec2 p) {
    double best = 1e300;
    const int n = static_cast<int>(poly.size());
    for (int e = 0; e < n; ++e) {
        Vec2 a = poly[e], b = poly[(e + 1) % n];
        for (int i = 0; i <= 20000; ++i) {
            Vec2 q = a + (i / 20000.0) * (b - a);
            best = std::min(best, norm(p - q));
        }
    }
    return best;
}
} // namespace

TEST_SUITE("geom") {

TEST_CASE("polygon area, perimeter, centroid") {
    auto sq = unit_square();
    CHECK(geom::polygon_area(sq) == Approx(1.0).epsilon(1e-15));
    CHECK(geom::polygon_perimeter(sq) == Approx(4.0).epsilon(1e-15));
    Vec2 c = geom::polygon_centroid(sq);
    CHECK(c.x == Approx(0.5).epsilon(1e-15));
    CHECK(c.y == Approx(0.5).epsilon(1e-15));

    // clockwise orientation flips the sign of the area
    std::vector<Vec2> cw(sq.rbegin(), sq.rend());
    CHECK(geom::polygon_area(cw) == Approx(-1.0).epsilon(1e-15));

    std::vector<Vec2> tri{{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}};
    CHECK(geom::polygon_area(tri) == Approx(2.0).epsilon(1e-15));
    CHECK(geom::polygon_perimeter(tri) == Approx(4.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("point-segment distance") {
    CHECK(geom::point_segment_distance({1.0, 1.0}, {0.0, 0.0}, {2.0, 0.0}) ==
          Approx(1.0).epsilon(1e-15));
    // projection beyond the segment end clamps to the endpoint
    CHECK(geom::point_segment_distance({3.0, 4.0}, {0.0, 0.0}, {1.0, 0.0}) ==
          Approx(std::sqrt(20.0)).epsilon(1e-15));
    // degenerate segment = point distance
    CHECK(geom::point_segment_distance({3.0, 4.0}, {0.0, 0.0}, {0.0, 0.0}) ==
          Approx(5.0).epsilon(1e-15));
}

TEST_CASE("halfplane clipping") {
    auto sq = unit_square();
    auto half = geom::clip_halfplane(sq, {1.0, 0.0}, 0.5);  // keep x <= 1/2
    CHECK(geom::polygon_area(half) == Approx(0.5).epsilon(1e-14));

    auto all = geom::clip_halfplane(sq, {1.0, 0.0}, 2.0);  // keeps everything
    CHECK(geom::polygon_area(all) == Approx(1.0).epsilon(1e-14));

    auto none = geom::clip_halfplane(sq, {1.0, 0.0}, -1.0);  // keeps nothing
    CHECK(none.size() < 3);
}

TEST_CASE("simplify drops collinear vertices") {
    std::vector<Vec2> withmid{{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    auto s = geom::simplify_polygon(withmid);
    CHECK(s.size() == 4);
    CHECK(geom::polygon_area(s) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("disk measurements") {
    auto d = ConvexShape::disk({0.0, 0.0}, 2.0);
    CHECK(d.area() == Approx(4.0 * kPi).epsilon(1e-15));
    CHECK(d.perimeter() == Approx(4.0 * kPi).epsilon(1e-15));
    CHECK(d.inradius() == Approx(2.0).epsilon(1e-15));
    CHECK(d.diameter() == Approx(4.0).epsilon(1e-15));
    CHECK(d.centroid().x == Approx(0.0));
    CHECK(d.incenter().y == Approx(0.0));
}

TEST_CASE("rectangle measurements") {
    auto r = ConvexShape::rectangle({-1.0, -0.5}, {1.0, 0.5});
    CHECK(r.area() == Approx(2.0).epsilon(1e-15));
    CHECK(r.perimeter() == Approx(6.0).epsilon(1e-15));
    CHECK(r.inradius() == Approx(0.5).epsilon(1e-15));
    CHECK(r.diameter() == Approx(std::sqrt(5.0)).epsilon(1e-15));
    Vec2 lo, hi;
    r.bbox(lo, hi);
    CHECK(lo.x == Approx(-1.0));
    CHECK(hi.y == Approx(0.5));
}

TEST_CASE("triangle measurements") {
    auto t = ConvexShape::polygon({{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}});
    CHECK(t.area() == Approx(2.0).epsilon(1e-15));
    // right isoceles with legs 2: inradius (a + b - c)/2
    CHECK(t.inradius() == Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(t.diameter() == Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("polygon factory validates convexity") {
    CHECK_THROWS_AS(ConvexShape::polygon({{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.5}, {2.0, 2.0}}),
                    EmptyShape);
    CHECK_THROWS_AS(ConvexShape::polygon({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}), EmptyShape);
    CHECK_THROWS_AS(ConvexShape::polygon({{0.0, 0.0}, {1.0, 0.0}}), EmptyShape);

    // clockwise input is accepted and stored counterclockwise
    auto cw = ConvexShape::polygon({{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}});
    CHECK(cw.area() == Approx(1.0).epsilon(1e-15));
    CHECK(geom::polygon_area(cw.vertices()) > 0.0);
}

TEST_CASE("containment") {
    auto d = ConvexShape::disk({0.0, 0.0}, 1.0);
    CHECK(d.contains({0.3, 0.4}));
    CHECK(!d.contains({1.1, 0.0}));
    CHECK(d.contains({1.05, 0.0}, 0.1));

    auto sq = ConvexShape::rectangle({0.0, 0.0}, {1.0, 1.0});
    CHECK(sq.contains({0.5, 0.5}));
    CHECK(sq.contains({1.0, 1.0}));
    CHECK(!sq.contains({1.0 + 1e-9, 0.5}));
}

TEST_CASE("boundary distance") {
    auto d = ConvexShape::disk({0.0, 0.0}, 1.0);
    CHECK(d.boundary_distance({0.3, 0.0}) == Approx(0.7).epsilon(1e-15));
    CHECK(d.boundary_distance({2.0, 0.0}) == Approx(1.0).epsilon(1e-15));
    CHECK(d.set_distance({2.0, 0.0}) == Approx(1.0).epsilon(1e-15));
    CHECK(d.set_distance({0.3, 0.0}) == Approx(0.0));

    auto sq = ConvexShape::rectangle({0.0, 0.0}, {1.0, 1.0});
    CHECK(sq.boundary_distance({0.5, 0.5}) == Approx(0.5).epsilon(1e-15));
    CHECK(sq.boundary_distance({0.1, 0.5}) == Approx(0.1).epsilon(1e-13));

    // triangle interior and exterior points against a dense sampling oracle
    std::vector<Vec2> tv{{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}};
    auto tri = ConvexShape::polygon(tv);
    for (Vec2 p : {Vec2{0.4, 0.4}, Vec2{0.2, 1.0}, Vec2{1.5, 1.5}, Vec2{-1.0, 0.5}}) {
        CHECK(tri.boundary_distance(p) == Approx(sampled_boundary_distance(tv, p)).epsilon(1e-7));
    }
}

TEST_CASE("outward normals") {
    auto d = ConvexShape::disk({0.0, 0.0}, 1.0);
    Vec2 nd = d.outward_normal_at({0.5, 0.0});
    CHECK(nd.x == Approx(1.0).epsilon(1e-15));
    CHECK(nd.y == Approx(0.0));

    auto sq = ConvexShape::rectangle({0.0, 0.0}, {1.0, 1.0});
    Vec2 ns = sq.outward_normal_at({0.9, 0.5});
    CHECK(ns.x == Approx(1.0).epsilon(1e-15));
    CHECK(ns.y == Approx(0.0));
}

TEST_CASE("erosion is exact on rectangles and disks") {
    auto sq = ConvexShape::rectangle({0.0, 0.0}, {1.0, 1.0});
    auto e1 = sq.erode(0.25);
    REQUIRE(e1.has_value());
    CHECK(e1->area() == Approx(0.25).epsilon(1e-14));
    CHECK(e1->perimeter() == Approx(2.0).epsilon(1e-14));

    auto d = ConvexShape::disk({0.0, 0.0}, 1.0);
    auto e2 = d.erode(0.3);
    REQUIRE(e2.has_value());
    CHECK(e2->disk_radius() == Approx(0.7).epsilon(1e-15));

    CHECK(!sq.erode(0.5).has_value());   // at the inradius nothing is left
    CHECK(!d.erode(1.01).has_value());
}

} // TEST_SUITE("geom")

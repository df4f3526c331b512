#pragma once

#include <optional>
#include <vector>

namespace pflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

namespace geom {

// Signed area of a polygon, positive when the vertices run counterclockwise.
double polygon_area(const std::vector<Vec2>& v);
double polygon_perimeter(const std::vector<Vec2>& v);
Vec2 polygon_centroid(const std::vector<Vec2>& v);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

// Keeps the part of a convex polygon with dot(n, x) <= c.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& v, Vec2 n, double c);

// Drops repeated and collinear vertices so that offsets of polygons with
// exact edges (rectangles in particular) stay exact.
std::vector<Vec2> simplify_polygon(const std::vector<Vec2>& v);

} // namespace geom

// Closed bounded convex region: a disk or a convex polygon (ccw vertices).
class ConvexShape {
public:
    enum class Kind { Disk, Polygon };

    // Degenerate placeholder (zero-radius disk at the origin); real shapes
    // come from the factories below.
    ConvexShape() = default;

    static ConvexShape disk(Vec2 center, double radius);
    static ConvexShape rectangle(Vec2 lo, Vec2 hi);
    // Vertices must describe a convex polygon with positive area; ccw or cw
    // accepted, stored ccw. Throws EmptyShape otherwise.
    static ConvexShape polygon(std::vector<Vec2> verts);

    Kind kind() const { return kind_; }
    Vec2 disk_center() const { return center_; }
    double disk_radius() const { return radius_; }
    const std::vector<Vec2>& vertices() const { return verts_; }

    double area() const;
    double perimeter() const;
    double inradius() const;
    double diameter() const;
    Vec2 centroid() const;
    // Center of a maximal inscribed disk.
    Vec2 incenter() const;
    void bbox(Vec2& lo, Vec2& hi) const;

    bool contains(Vec2 p, double tol = 0.0) const;
    // Distance from p to the boundary curve (works inside and outside).
    double boundary_distance(Vec2 p) const;
    // Distance from p to the set (zero inside).
    double set_distance(Vec2 p) const;
    // Outward unit normal of the boundary piece nearest to p.
    Vec2 outward_normal_at(Vec2 p) const;

    // Inward offset by r (Minkowski erosion with a disk of radius r).
    // Empty result (area below 1e-14 * scale^2) comes back as nullopt.
    std::optional<ConvexShape> erode(double r) const;

private:
    Kind kind_ = Kind::Disk;
    Vec2 center_{};
    double radius_ = 0.0;
    std::vector<Vec2> verts_;
};

} // namespace pflow

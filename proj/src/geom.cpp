#include "pflow/geom.hpp"

#include "pflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pflow {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

namespace geom {

double polygon_area(const std::vector<Vec2>& v) {
    double s = 0.0;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        s += cross(a, b);
    }
    return 0.5 * s;
}

double polygon_perimeter(const std::vector<Vec2>& v) {
    double s = 0.0;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) s += norm(v[(i + 1) % n] - v[i]);
    return s;
}

Vec2 polygon_centroid(const std::vector<Vec2>& v) {
    double a6 = 0.0;
    Vec2 c{0.0, 0.0};
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % n];
        double w = cross(p, q);
        a6 += w;
        c.x += w * (p.x + q.x);
        c.y += w * (p.y + q.y);
    }
    if (a6 == 0.0) throw EmptyShape("polygon_centroid: degenerate polygon");
    return {c.x / (3.0 * a6), c.y / (3.0 * a6)};
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 d = b - a;
    double len2 = dot(d, d);
    if (len2 == 0.0) return norm(p - a);
    double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return norm(p - (a + t * d));
}

std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& v, Vec2 n, double c) {
    std::vector<Vec2> out;
    const std::size_t m = v.size();
    out.reserve(m + 1);
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2& cur = v[i];
        const Vec2& nxt = v[(i + 1) % m];
        double dc = c - dot(n, cur);
        double dn = c - dot(n, nxt);
        if (dc >= 0.0) out.push_back(cur);
        if ((dc > 0.0 && dn < 0.0) || (dc < 0.0 && dn > 0.0)) {
            double t = dc / (dc - dn);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

std::vector<Vec2> simplify_polygon(const std::vector<Vec2>& v) {
    if (v.size() < 3) return {};
    double scale = 0.0;
    for (const Vec2& p : v) scale = std::max({scale, std::fabs(p.x), std::fabs(p.y)});
    const double tol = 1e-12 * std::max(scale, 1.0);

    std::vector<Vec2> dedup;
    for (const Vec2& p : v) {
        if (dedup.empty() || norm(p - dedup.back()) > tol) dedup.push_back(p);
    }
    while (dedup.size() > 1 && norm(dedup.front() - dedup.back()) <= tol) dedup.pop_back();
    if (dedup.size() < 3) return {};

    std::vector<Vec2> out;
    const std::size_t n = dedup.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& prev = dedup[(i + n - 1) % n];
        const Vec2& cur = dedup[i];
        const Vec2& nxt = dedup[(i + 1) % n];
        if (std::fabs(cross(cur - prev, nxt - cur)) > tol * std::max(norm(nxt - prev), 1.0))
            out.push_back(cur);
    }
    if (out.size() < 3) return {};
    return out;
}

} // namespace geom

ConvexShape ConvexShape::disk(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw EmptyShape("disk: radius must be positive");
    ConvexShape s;
    s.kind_ = Kind::Disk;
    s.center_ = center;
    s.radius_ = radius;
    return s;
}

ConvexShape ConvexShape::rectangle(Vec2 lo, Vec2 hi) {
    if (!(hi.x > lo.x) || !(hi.y > lo.y)) throw EmptyShape("rectangle: empty extent");
    return polygon({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}});
}

ConvexShape ConvexShape::polygon(std::vector<Vec2> verts) {
    std::vector<Vec2> v = geom::simplify_polygon(verts);
    if (v.size() < 3) throw EmptyShape("polygon: fewer than 3 distinct vertices");
    double a = geom::polygon_area(v);
    if (a < 0.0) {
        std::reverse(v.begin(), v.end());
        a = -a;
    }
    if (!(a > 0.0)) throw EmptyShape("polygon: zero area");
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 e1 = v[(i + 1) % n] - v[i];
        Vec2 e2 = v[(i + 2) % n] - v[(i + 1) % n];
        if (cross(e1, e2) <= 0.0) throw EmptyShape("polygon: not strictly convex");
    }
    ConvexShape s;
    s.kind_ = Kind::Polygon;
    s.verts_ = std::move(v);
    return s;
}

double ConvexShape::area() const {
    if (kind_ == Kind::Disk) return M_PI * radius_ * radius_;
    return geom::polygon_area(verts_);
}

double ConvexShape::perimeter() const {
    if (kind_ == Kind::Disk) return 2.0 * M_PI * radius_;
    return geom::polygon_perimeter(verts_);
}

double ConvexShape::inradius() const {
    if (kind_ == Kind::Disk) return radius_;
    // Largest r with nonempty inward offset; the offset is monotone in r.
    double lo = 0.0, hi = 0.5 * diameter();
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        if (erode(mid)) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double ConvexShape::diameter() const {
    if (kind_ == Kind::Disk) return 2.0 * radius_;
    double d2 = 0.0;
    for (std::size_t i = 0; i < verts_.size(); ++i)
        for (std::size_t j = i + 1; j < verts_.size(); ++j) {
            Vec2 d = verts_[j] - verts_[i];
            d2 = std::max(d2, dot(d, d));
        }
    return std::sqrt(d2);
}

Vec2 ConvexShape::centroid() const {
    if (kind_ == Kind::Disk) return center_;
    return geom::polygon_centroid(verts_);
}

Vec2 ConvexShape::incenter() const {
    if (kind_ == Kind::Disk) return center_;
    double r = inradius();
    // Offset by slightly less than the inradius: what is left hugs the
    // incenter set; its centroid is a valid center of an inscribed disk up
    // to the shaving margin.
    for (double f = 1e-6; f < 1.0; f *= 10.0) {
        auto core = erode(r * (1.0 - f));
        if (core) return core->centroid();
    }
    return centroid();
}

void ConvexShape::bbox(Vec2& lo, Vec2& hi) const {
    if (kind_ == Kind::Disk) {
        lo = {center_.x - radius_, center_.y - radius_};
        hi = {center_.x + radius_, center_.y + radius_};
        return;
    }
    lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    hi = {-lo.x, -lo.y};
    for (const Vec2& p : verts_) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
}

bool ConvexShape::contains(Vec2 p, double tol) const {
    if (kind_ == Kind::Disk) return norm(p - center_) <= radius_ + tol;
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 e = verts_[(i + 1) % n] - verts_[i];
        double len = norm(e);
        if (cross(e, p - verts_[i]) < -tol * len) return false;
    }
    return true;
}

double ConvexShape::boundary_distance(Vec2 p) const {
    if (kind_ == Kind::Disk) return std::fabs(radius_ - norm(p - center_));
    double d = std::numeric_limits<double>::max();
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i)
        d = std::min(d, geom::point_segment_distance(p, verts_[i], verts_[(i + 1) % n]));
    return d;
}

double ConvexShape::set_distance(Vec2 p) const {
    if (kind_ == Kind::Disk) return std::max(0.0, norm(p - center_) - radius_);
    if (contains(p)) return 0.0;
    return boundary_distance(p);
}

Vec2 ConvexShape::outward_normal_at(Vec2 p) const {
    if (kind_ == Kind::Disk) {
        Vec2 d = p - center_;
        double n = norm(d);
        if (n == 0.0) return {1.0, 0.0};
        return {d.x / n, d.y / n};
    }
    const std::size_t n = verts_.size();
    double best = std::numeric_limits<double>::max();
    Vec2 normal{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = verts_[i];
        const Vec2& b = verts_[(i + 1) % n];
        double d = geom::point_segment_distance(p, a, b);
        if (d < best) {
            best = d;
            Vec2 e = b - a;
            double len = norm(e);
            normal = {e.y / len, -e.x / len};
        }
    }
    return normal;
}

std::optional<ConvexShape> ConvexShape::erode(double r) const {
    if (r < 0.0) throw BadRange("erode: negative radius");
    if (r == 0.0) return *this;
    if (kind_ == Kind::Disk) {
        if (radius_ - r <= 1e-14 * radius_) return std::nullopt;
        return disk(center_, radius_ - r);
    }
    std::vector<Vec2> v = verts_;
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n && v.size() >= 3; ++i) {
        Vec2 e = verts_[(i + 1) % n] - verts_[i];
        double len = norm(e);
        Vec2 inward{-e.y / len, e.x / len};
        // keep inward side at depth >= r: dot(-inward, x) <= -c
        double c = dot(inward, verts_[i]) + r;
        v = geom::clip_halfplane(v, {-inward.x, -inward.y}, -c);
    }
    v = geom::simplify_polygon(v);
    if (v.size() < 3) return std::nullopt;
    double a = geom::polygon_area(v);
    double scale = diameter();
    if (a <= 1e-14 * scale * scale) return std::nullopt;
    try {
        return polygon(std::move(v));
    } catch (const EmptyShape&) {
        return std::nullopt;
    }
}

} // namespace pflow

#include "pflow/domain.hpp"

#include "pflow/errors.hpp"

#include <cmath>
#include <sstream>

namespace pflow {
namespace {

void check_params(double h, double& s0, const ConvexShape& shape) {
    if (!(h > 0.0)) throw BadRange("domain: spacing h must be positive");
    double inr = shape.inradius();
    if (s0 < 0.0) s0 = inr;
    if (!(s0 > 0.0)) throw BadRange("domain: s0 must be positive");
    if (s0 > inr * (1.0 + 1e-9))
        throw BadRange("domain: s0 exceeds the inradius");
}

} // namespace

DomainSpec DomainSpec::disk(double radius, double h, double s0) {
    DomainSpec d;
    d.kind = DomainKind::Disk;
    d.shape = ConvexShape::disk({0.0, 0.0}, radius);
    d.h = h;
    d.s0 = s0;
    check_params(d.h, d.s0, d.shape);
    return d;
}

DomainSpec DomainSpec::rectangle(double width, double height, double h, double s0) {
    DomainSpec d;
    d.kind = DomainKind::Rectangle;
    d.shape = ConvexShape::rectangle({-0.5 * width, -0.5 * height}, {0.5 * width, 0.5 * height});
    d.h = h;
    d.s0 = s0;
    check_params(d.h, d.s0, d.shape);
    return d;
}

DomainSpec DomainSpec::polygon(std::vector<Vec2> verts, double h, double s0) {
    DomainSpec d;
    d.kind = DomainKind::Polygon;
    d.shape = ConvexShape::polygon(std::move(verts));
    d.h = h;
    d.s0 = s0;
    check_params(d.h, d.s0, d.shape);
    return d;
}

double DomainSpec::boundary_distance(Vec2 p) const {
    if (!shape.contains(p, 1e-12 * diameter())) {
        std::ostringstream os;
        os << "point (" << p.x << ", " << p.y << ") lies outside the domain";
        throw OutsideDomain(os.str());
    }
    return shape.boundary_distance(p);
}

std::optional<std::string> resolution_warning(const DomainSpec& d) {
    double cells = d.inradius() / d.h;
    if (cells >= 8.0) return std::nullopt;
    std::ostringstream os;
    os << "grid resolves only " << cells << " cells across the inradius (< 8); "
       << "expect poor accuracy";
    return os.str();
}

} // namespace pflow

#pragma once

#include "pflow/geom.hpp"

#include <optional>
#include <string>

namespace pflow {

enum class DomainKind { Disk, Rectangle, Polygon };

// Convex computational domain plus the two scalar parameters every solver
// needs: the grid spacing h and the interior-ball radius s0 entering the
// flat-datum growth bound (boundary flux per unit ball volume).
struct DomainSpec {
    DomainKind kind = DomainKind::Disk;
    ConvexShape shape = ConvexShape::disk({0.0, 0.0}, 1.0);
    double h = 0.0;
    double s0 = 0.0;

    // s0 < 0 means "use the inradius".
    static DomainSpec disk(double radius, double h, double s0 = -1.0);
    static DomainSpec rectangle(double width, double height, double h, double s0 = -1.0);
    static DomainSpec polygon(std::vector<Vec2> verts, double h, double s0 = -1.0);

    bool inside(Vec2 p) const { return shape.contains(p); }
    // Distance to the boundary; throws OutsideDomain for exterior points.
    double boundary_distance(Vec2 p) const;
    double inradius() const { return shape.inradius(); }
    double diameter() const { return shape.diameter(); }
};

// Advisory resolution check: returns a warning when fewer than 8 cells fit
// across the inradius. Coarser grids still build, they just resolve little.
std::optional<std::string> resolution_warning(const DomainSpec& d);

} // namespace pflow

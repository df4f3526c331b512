#pragma once

#include "pflow/geom.hpp"

#include <optional>
#include <utility>

// Variational geometry of the total variation flow on a convex planar set C:
// the minimizers of Per(F) - lambda |F| over F within C form an increasing
// family C_lambda (the morphological opening of C at radius 1/lambda, empty
// below the Cheeger value), and u(t, x) = t * inf{lambda : x in C_lambda} is
// the large solution of the flow on C.

namespace pflow::cheeger {

// Inward offset; throws EmptyShape when nothing is left (r at or beyond the
// inradius).
ConvexShape erode(const ConvexShape& c, double r);

// (area, perimeter) of the opening (C (-) rB) (+) rB by Steiner's formulas.
std::pair<double, double> opening_measures(const ConvexShape& c, double r);

struct CheegerResult {
    double r_star = 0.0;   // |C (-) rB| = pi r^2 fixed point
    double h = 0.0;        // 1 / r_star
    ConvexShape core;      // C (-) r_star B
    bool calibrable = false;  // opening at r_star fills C (area match 1e-12)
};

CheegerResult cheeger_constant(const ConvexShape& c);

// Opening represented as core + sweep radius.
struct RoundedRegion {
    ConvexShape core;
    double radius = 0.0;

    double area() const;
    double perimeter() const;
    bool contains(Vec2 p, double tol = 0.0) const;
    // Per - lambda * Area, the quantity the minimizer family optimizes.
    double deficit(double lambda) const;
};

// Minimizer at level lambda: nullopt below the Cheeger value.
std::optional<RoundedRegion> c_lambda(const ConvexShape& c, double lambda);

// inf{lambda : p in C_lambda}; nullopt where no lambda <= lambda_cap admits
// the point (polygon corners). lambda_cap < 0 selects 1e6 * cheeger h.
std::optional<double> h_field(const ConvexShape& c, Vec2 p, double lambda_cap = -1.0);

// h_field * t, the large-solution value at (t, p).
std::optional<double> tv_large_solution(const ConvexShape& c, double t, Vec2 p);

} // namespace pflow::cheeger

#include "pflow/cheeger.hpp"

#include "pflow/errors.hpp"

#include <cmath>

namespace pflow::cheeger {

ConvexShape erode(const ConvexShape& c, double r) {
    auto e = c.erode(r);
    if (!e) throw EmptyShape("erode: inward offset is empty");
    return *e;
}

std::pair<double, double> opening_measures(const ConvexShape& c, double r) {
    if (r < 0.0) throw BadRange("opening_measures: negative radius");
    if (r == 0.0) return {c.area(), c.perimeter()};
    ConvexShape core = erode(c, r);
    double area = core.area() + core.perimeter() * r + M_PI * r * r;
    double per = core.perimeter() + 2.0 * M_PI * r;
    return {area, per};
}

CheegerResult cheeger_constant(const ConvexShape& c) {
    // |C (-) rB| - pi r^2 falls strictly from |C| to negative on (0, inradius].
    double lo = 0.0;
    double hi = c.inradius();
    auto excess = [&](double r) {
        auto core = c.erode(r);
        double a = core ? core->area() : 0.0;
        return a - M_PI * r * r;
    };
    for (int i = 0; i < 200 && hi - lo > 1e-17 * c.diameter(); ++i) {
        double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    CheegerResult res;
    res.r_star = 0.5 * (lo + hi);
    res.h = 1.0 / res.r_star;
    auto core = c.erode(res.r_star);
    if (!core) core = c.erode(lo);
    if (!core) throw EmptyShape("cheeger_constant: eroded core vanished at the fixed point");
    res.core = *core;
    auto [oa, op] = opening_measures(c, res.r_star);
    (void)op;
    res.calibrable = std::fabs(oa - c.area()) <= 1e-12 * std::max(1.0, c.area());
    return res;
}

double RoundedRegion::area() const {
    return core.area() + core.perimeter() * radius + M_PI * radius * radius;
}

double RoundedRegion::perimeter() const { return core.perimeter() + 2.0 * M_PI * radius; }

bool RoundedRegion::contains(Vec2 p, double tol) const {
    return core.set_distance(p) <= radius + tol;
}

double RoundedRegion::deficit(double lambda) const { return perimeter() - lambda * area(); }

std::optional<RoundedRegion> c_lambda(const ConvexShape& c, double lambda) {
    if (!(lambda > 0.0)) throw BadRange("c_lambda: lambda must be positive");
    CheegerResult ch = cheeger_constant(c);
    if (lambda < ch.h * (1.0 - 1e-12)) return std::nullopt;
    double r = std::min(1.0 / lambda, ch.r_star);
    auto core = c.erode(r);
    if (!core) core = ch.core;
    return RoundedRegion{*core, r};
}

std::optional<double> h_field(const ConvexShape& c, Vec2 p, double lambda_cap) {
    if (!c.contains(p)) throw OutsideDomain("h_field: point outside the set");
    CheegerResult ch = cheeger_constant(c);
    if (lambda_cap <= 0.0) lambda_cap = 1e6 * ch.h;

    auto member = [&](double lambda) {
        double r = std::min(1.0 / lambda, ch.r_star);
        auto core = c.erode(r);
        if (!core) return false;
        return core->set_distance(p) <= r * (1.0 + 1e-12);
    };

    if (member(ch.h)) return ch.h;
    if (!member(lambda_cap)) return std::nullopt;
    double lo = ch.h, hi = lambda_cap;
    while (hi - lo > 1e-13 * hi) {
        double mid = 0.5 * (lo + hi);
        if (member(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

std::optional<double> tv_large_solution(const ConvexShape& c, double t, Vec2 p) {
    if (t < 0.0) throw BadRange("tv_large_solution: negative time");
    auto h = h_field(c, p);
    if (!h) return std::nullopt;
    return *h * t;
}

} // namespace pflow::cheeger

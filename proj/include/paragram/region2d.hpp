#pragma once

#include <vector>

namespace paragram {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// a*x + b*y <= c
struct HalfPlane {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double norm() const;
    // Signed distance of p beyond the boundary (positive = violated), in
    // normalized units so tolerances read as geometric distances.
    double violation(const Vec2& p) const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = true;

    bool bounded() const;
    bool contains(const Interval& other, double slack) const;
    static bool overlap(const Interval& s, const Interval& t, double slack);
};

// Geometric slack used by all exact predicates.
inline constexpr double kGeomSlack = 1e-9;

// Intersection of half-planes in one correlation subspace; possibly empty or
// unbounded. Immutable value type.
class ConvexRegion2D {
   public:
    std::vector<HalfPlane> constraints;

    ConvexRegion2D() = default;
    explicit ConvexRegion2D(std::vector<HalfPlane> hs) : constraints(std::move(hs)) {}

    bool contains(const Vec2& p, double slack = 0.0) const;

    // Feasible intersections of constraint-boundary pairs, deduplicated.
    std::vector<Vec2> vertices(double slack = kGeomSlack) const;

    bool feasible(double slack = kGeomSlack) const;

    struct MaxResult {
        enum class Status { Infeasible, Unbounded, Optimal };
        Status status = Status::Infeasible;
        double value = 0.0;
        Vec2 arg;
    };

    // sup of objective·p over the region (tiny dense 2D LP: vertex and
    // boundary-projection candidates plus recession-direction probing).
    MaxResult maximize(const Vec2& objective, double slack = kGeomSlack) const;

    Interval project_x(double slack = kGeomSlack) const;  // +-inf endpoints when unbounded
    Interval project_y(double slack = kGeomSlack) const;

    ConvexRegion2D intersect(const ConvexRegion2D& other) const;
};

struct SubsumptionCheck {
    bool holds = false;
    // Worst normalized violation of an outer constraint by the inner region;
    // negative values mean strictly inside, -inf when inner is empty.
    double worst = 0.0;
};

// inner ⊆ outer, decided by maximizing each outer constraint over inner.
SubsumptionCheck region_subsumed_by(const ConvexRegion2D& inner, const ConvexRegion2D& outer,
                                    double slack = kGeomSlack);

bool regions_equal(const ConvexRegion2D& a, const ConvexRegion2D& b, double slack = kGeomSlack);

// Sequentially drops constraints implied by the remaining system.
ConvexRegion2D reduce(const ConvexRegion2D& region, double slack = kGeomSlack);

}  // namespace paragram

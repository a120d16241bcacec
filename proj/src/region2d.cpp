#include "paragram/region2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace paragram {

namespace {

constexpr double kParallelTol = 1e-12;
constexpr double kDirectionTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool solve_pair(const HalfPlane& p, const HalfPlane& q, Vec2& out) {
    double det = p.a * q.b - p.b * q.a;
    double scale = p.norm() * q.norm();
    if (scale == 0.0 || std::fabs(det) <= kParallelTol * scale) return false;
    out.x = (p.c * q.b - p.b * q.c) / det;
    out.y = (p.a * q.c - p.c * q.a) / det;
    return true;
}

}  // namespace

double HalfPlane::norm() const { return std::hypot(a, b); }

double HalfPlane::violation(const Vec2& p) const {
    double n = norm();
    double raw = a * p.x + b * p.y - c;
    if (n == 0.0) return c >= 0.0 ? -kInf : kInf;  // degenerate: 0 <= c
    return raw / n;
}

bool Interval::bounded() const { return !empty && std::isfinite(lo) && std::isfinite(hi); }

bool Interval::contains(const Interval& other, double slack) const {
    if (other.empty) return true;
    if (empty) return false;
    return lo - slack <= other.lo && other.hi <= hi + slack;
}

bool Interval::overlap(const Interval& s, const Interval& t, double slack) {
    if (s.empty || t.empty) return false;
    return std::max(s.lo, t.lo) <= std::min(s.hi, t.hi) + slack;
}

bool ConvexRegion2D::contains(const Vec2& p, double slack) const {
    for (const HalfPlane& h : constraints)
        if (h.violation(p) > slack) return false;
    return true;
}

std::vector<Vec2> ConvexRegion2D::vertices(double slack) const {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        for (std::size_t j = i + 1; j < constraints.size(); ++j) {
            Vec2 p;
            if (!solve_pair(constraints[i], constraints[j], p)) continue;
            if (!contains(p, slack)) continue;
            bool duplicate = false;
            for (const Vec2& q : out) {
                double scale = 1.0 + std::max(std::fabs(p.x) + std::fabs(p.y),
                                              std::fabs(q.x) + std::fabs(q.y));
                if (std::fabs(p.x - q.x) + std::fabs(p.y - q.y) <= 1e-9 * scale) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) out.push_back(p);
        }
    }
    return out;
}

bool ConvexRegion2D::feasible(double slack) const {
    if (constraints.empty()) return true;
    if (contains(Vec2{0.0, 0.0}, slack)) return true;
    // Projections of the origin onto each boundary cover the vertex-free
    // cases (parallel families, single constraints).
    for (const HalfPlane& h : constraints) {
        double n2 = h.a * h.a + h.b * h.b;
        if (n2 == 0.0) {
            if (h.c < -slack) return false;  // 0 <= c fails: empty by fiat
            continue;
        }
        Vec2 p{h.a * h.c / n2, h.b * h.c / n2};
        if (contains(p, slack)) return true;
    }
    for (std::size_t i = 0; i < constraints.size(); ++i)
        for (std::size_t j = i + 1; j < constraints.size(); ++j) {
            Vec2 p;
            if (solve_pair(constraints[i], constraints[j], p) && contains(p, slack)) return true;
        }
    return false;
}

ConvexRegion2D::MaxResult ConvexRegion2D::maximize(const Vec2& objective, double slack) const {
    MaxResult res;
    // Degenerate constraints (0,0,c) with c < 0 make the region empty.
    for (const HalfPlane& h : constraints)
        if (h.a == 0.0 && h.b == 0.0 && h.c < -slack) return res;

    bool found = false;
    auto consider = [&](const Vec2& p) {
        if (!contains(p, slack)) return;
        double v = dot(objective, p);
        if (!found || v > res.value) {
            res.value = v;
            res.arg = p;
        }
        found = true;
    };

    consider(Vec2{0.0, 0.0});
    for (const HalfPlane& h : constraints) {
        double n2 = h.a * h.a + h.b * h.b;
        if (n2 == 0.0) continue;
        consider(Vec2{h.a * h.c / n2, h.b * h.c / n2});
    }
    for (std::size_t i = 0; i < constraints.size(); ++i)
        for (std::size_t j = i + 1; j < constraints.size(); ++j) {
            Vec2 p;
            if (solve_pair(constraints[i], constraints[j], p)) consider(p);
        }
    if (!found) return res;  // Infeasible

    // Recession directions: the objective itself and the boundary directions.
    double obj_norm = std::hypot(objective.x, objective.y);
    std::vector<Vec2> dirs;
    if (obj_norm > 0.0) dirs.push_back(Vec2{objective.x / obj_norm, objective.y / obj_norm});
    for (const HalfPlane& h : constraints) {
        double n = h.norm();
        if (n == 0.0) continue;
        dirs.push_back(Vec2{-h.b / n, h.a / n});
        dirs.push_back(Vec2{h.b / n, -h.a / n});
    }
    for (const Vec2& d : dirs) {
        if (dot(objective, d) <= kDirectionTol * std::max(obj_norm, 1.0)) continue;
        bool receding = true;
        for (const HalfPlane& h : constraints) {
            double n = h.norm();
            if (n == 0.0) continue;
            if ((h.a * d.x + h.b * d.y) / n > kDirectionTol) {
                receding = false;
                break;
            }
        }
        if (receding) {
            res.status = MaxResult::Status::Unbounded;
            return res;
        }
    }
    res.status = MaxResult::Status::Optimal;
    return res;
}

Interval ConvexRegion2D::project_x(double slack) const {
    Interval iv;
    MaxResult hi = maximize(Vec2{1.0, 0.0}, slack);
    if (hi.status == MaxResult::Status::Infeasible) return iv;
    MaxResult lo = maximize(Vec2{-1.0, 0.0}, slack);
    iv.empty = false;
    iv.hi = hi.status == MaxResult::Status::Unbounded ? kInf : hi.value;
    iv.lo = lo.status == MaxResult::Status::Unbounded ? -kInf : -lo.value;
    return iv;
}

Interval ConvexRegion2D::project_y(double slack) const {
    Interval iv;
    MaxResult hi = maximize(Vec2{0.0, 1.0}, slack);
    if (hi.status == MaxResult::Status::Infeasible) return iv;
    MaxResult lo = maximize(Vec2{0.0, -1.0}, slack);
    iv.empty = false;
    iv.hi = hi.status == MaxResult::Status::Unbounded ? kInf : hi.value;
    iv.lo = lo.status == MaxResult::Status::Unbounded ? -kInf : -lo.value;
    return iv;
}

ConvexRegion2D ConvexRegion2D::intersect(const ConvexRegion2D& other) const {
    ConvexRegion2D out(*this);
    out.constraints.insert(out.constraints.end(), other.constraints.begin(),
                           other.constraints.end());
    return out;
}

SubsumptionCheck region_subsumed_by(const ConvexRegion2D& inner, const ConvexRegion2D& outer,
                                    double slack) {
    SubsumptionCheck check;
    if (!inner.feasible(slack)) {
        check.holds = true;
        check.worst = -std::numeric_limits<double>::infinity();
        return check;
    }
    check.holds = true;
    check.worst = -std::numeric_limits<double>::infinity();
    for (const HalfPlane& h : outer.constraints) {
        double n = h.norm();
        if (n == 0.0) {
            if (h.c < -slack) check.holds = false;
            continue;
        }
        auto r = inner.maximize(Vec2{h.a, h.b}, slack);
        if (r.status == ConvexRegion2D::MaxResult::Status::Infeasible) continue;
        if (r.status == ConvexRegion2D::MaxResult::Status::Unbounded) {
            check.holds = false;
            check.worst = std::numeric_limits<double>::infinity();
            return check;
        }
        double violation = (r.value - h.c) / n;
        check.worst = std::max(check.worst, violation);
        if (violation > slack) check.holds = false;
    }
    return check;
}

bool regions_equal(const ConvexRegion2D& a, const ConvexRegion2D& b, double slack) {
    return region_subsumed_by(a, b, slack).holds && region_subsumed_by(b, a, slack).holds;
}

ConvexRegion2D reduce(const ConvexRegion2D& region, double slack) {
    std::vector<HalfPlane> kept = region.constraints;
    std::size_t i = 0;
    while (i < kept.size()) {
        std::vector<HalfPlane> rest;
        rest.reserve(kept.size() - 1);
        for (std::size_t j = 0; j < kept.size(); ++j)
            if (j != i) rest.push_back(kept[j]);
        ConvexRegion2D others(std::move(rest));
        const HalfPlane& h = kept[i];
        double n = h.norm();
        bool redundant = false;
        if (n == 0.0) {
            redundant = h.c >= -slack;
        } else {
            auto r = others.maximize(Vec2{h.a, h.b}, slack);
            if (r.status == ConvexRegion2D::MaxResult::Status::Infeasible)
                redundant = true;
            else if (r.status == ConvexRegion2D::MaxResult::Status::Optimal)
                redundant = (r.value - h.c) / n <= slack;
        }
        if (redundant)
            kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
        else
            ++i;
    }
    return ConvexRegion2D(std::move(kept));
}

}  // namespace paragram

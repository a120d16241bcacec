#include "paragram/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <json.hpp>

#include "paragram/errors.hpp"

namespace paragram {

using nlohmann::json;

bool Parallelogram::bounded() const { return std::fabs(delta()) > kDegenerateDelta; }

Parallelogram parallelogram_of(const RelationEmbedding& r, std::size_t j) {
    if (j >= r.dim()) throw DataError("correlation subspace index out of range");
    Parallelogram p;
    p.head = Band{r.c_h[j], r.d_h[j], r.r_t[j]};
    p.tail = Band{r.c_t[j], r.d_t[j], r.r_h[j]};
    return p;
}

Parallelogram mirror(const Parallelogram& p) { return Parallelogram{p.tail, p.head}; }

ConvexRegion2D to_region(const Parallelogram& p) {
    ConvexRegion2D region;
    region.constraints = {
        {1.0, -p.head.slope, p.head.center + p.head.width},
        {-1.0, p.head.slope, -p.head.center + p.head.width},
        {-p.tail.slope, 1.0, p.tail.center + p.tail.width},
        {p.tail.slope, -1.0, -p.tail.center + p.tail.width},
    };
    return region;
}

CenterCorners center_and_corners(const Parallelogram& p) {
    double delta = p.delta();
    if (std::fabs(delta) <= kDegenerateDelta)
        throw DataError("parallelogram is unbounded (|1 - r_h*r_t| <= 1e-9)");
    const double ch = p.head.center, ct = p.tail.center;
    const double dh = p.head.width, dt = p.tail.width;
    const double rt = p.head.slope, rh = p.tail.slope;
    CenterCorners cc;
    cc.center = Vec2{(ch + rt * ct) / delta, (rh * ch + ct) / delta};
    Vec2 offset_a{(dh + rt * dt) / delta, (rh * dh + dt) / delta};
    Vec2 offset_b{(dh - rt * dt) / delta, (rh * dh - dt) / delta};
    std::vector<Vec2> corners = {
        {cc.center.x + offset_a.x, cc.center.y + offset_a.y},
        {cc.center.x - offset_a.x, cc.center.y - offset_a.y},
        {cc.center.x + offset_b.x, cc.center.y + offset_b.y},
        {cc.center.x - offset_b.x, cc.center.y - offset_b.y},
    };
    for (const Vec2& c : corners) {
        bool duplicate = false;
        for (const Vec2& kept : cc.corners)
            if (std::fabs(c.x - kept.x) + std::fabs(c.y - kept.y) <=
                1e-12 * (1.0 + std::fabs(c.x) + std::fabs(c.y)))
                duplicate = true;
        if (!duplicate) cc.corners.push_back(c);
    }
    return cc;
}

IntervalPair head_tail_intervals(const Parallelogram& p) {
    ConvexRegion2D region = to_region(p);
    return IntervalPair{region.project_x(), region.project_y()};
}

namespace {

// alpha*x + beta*y + gamma*z <= rhs, prior to eliminating y.
struct Constraint3 {
    double alpha, beta, gamma, rhs;
};

constexpr double kZeroCoef = 1e-12;

}  // namespace

ConvexRegion2D comp_def_region(const RelationEmbedding& r1, const RelationEmbedding& r2,
                               std::size_t j, double domain_bound) {
    if (j >= r1.dim() || j >= r2.dim()) throw DataError("correlation subspace index out of range");
    // r1(x,y):  |x - c1h - r1t*y| <= d1h,  |y - c1t - r1h*x| <= d1t
    // r2(y,z):  |y - c2h - r2t*z| <= d2h,  |z - c2t - r2h*y| <= d2t
    const double c1h = r1.c_h[j], d1h = r1.d_h[j], r1t = r1.r_t[j];
    const double c1t = r1.c_t[j], d1t = r1.d_t[j], r1h = r1.r_h[j];
    const double c2h = r2.c_h[j], d2h = r2.d_h[j], r2t = r2.r_t[j];
    const double c2t = r2.c_t[j], d2t = r2.d_t[j], r2h = r2.r_h[j];

    std::vector<Constraint3> system = {
        {1.0, -r1t, 0.0, c1h + d1h},   // x - r1t*y <= c1h + d1h
        {-1.0, r1t, 0.0, -c1h + d1h},  // -(x - r1t*y) <= -c1h + d1h
        {-r1h, 1.0, 0.0, c1t + d1t},   // y - r1h*x <= c1t + d1t
        {r1h, -1.0, 0.0, -c1t + d1t},
        {0.0, 1.0, -r2t, c2h + d2h},  // y - r2t*z <= c2h + d2h
        {0.0, -1.0, r2t, -c2h + d2h},
        {0.0, -r2h, 1.0, c2t + d2t},  // z - r2h*y <= c2t + d2t
        {0.0, r2h, -1.0, -c2t + d2t},
    };
    if (domain_bound > 0.0) {
        system.push_back({0.0, 1.0, 0.0, domain_bound});  // witness y within the universe
        system.push_back({0.0, -1.0, 0.0, domain_bound});
    }

    ConvexRegion2D region;
    std::vector<const Constraint3*> uppers, lowers;
    for (const Constraint3& c : system) {
        if (std::fabs(c.beta) <= kZeroCoef) {
            region.constraints.push_back(HalfPlane{c.alpha, c.gamma, c.rhs});
        } else if (c.beta > 0.0) {
            uppers.push_back(&c);
        } else {
            lowers.push_back(&c);
        }
    }
    for (const Constraint3* u : uppers) {
        for (const Constraint3* l : lowers) {
            double a = u->beta * l->alpha - l->beta * u->alpha;
            double b = u->beta * l->gamma - l->beta * u->gamma;
            double rhs = u->beta * l->rhs - l->beta * u->rhs;
            if (std::fabs(a) <= kZeroCoef && std::fabs(b) <= kZeroCoef) {
                if (rhs < 0.0) region.constraints.push_back(HalfPlane{0.0, 0.0, rhs});
                continue;  // tautology from pairing a band with itself
            }
            region.constraints.push_back(HalfPlane{a, b, rhs});
        }
    }
    return region;
}

std::vector<AbsConstraint> abs_constraints(const ConvexRegion2D& region) {
    std::vector<AbsConstraint> out;
    std::vector<bool> used(region.constraints.size(), false);
    for (std::size_t i = 0; i < region.constraints.size(); ++i) {
        if (used[i]) continue;
        const HalfPlane& hi = region.constraints[i];
        double ni = hi.norm();
        if (ni == 0.0) continue;
        for (std::size_t j = i + 1; j < region.constraints.size(); ++j) {
            if (used[j]) continue;
            const HalfPlane& hj = region.constraints[j];
            double nj = hj.norm();
            if (nj == 0.0) continue;
            // Opposite normals: hj ~ -hi after scaling.
            Vec2 a{hi.a / ni, hi.b / ni};
            Vec2 b{hj.a / nj, hj.b / nj};
            if (std::fabs(a.x + b.x) > 1e-9 || std::fabs(a.y + b.y) > 1e-9) continue;
            double ci = hi.c / ni;
            double cj = hj.c / nj;
            out.push_back(AbsConstraint{a.x, a.y, (ci - cj) / 2.0, (ci + cj) / 2.0});
            used[i] = used[j] = true;
            break;
        }
    }
    return out;
}

bool is_symmetric(const Parallelogram& p, double slack) {
    return regions_equal(to_region(p), to_region(mirror(p)), slack);
}

bool is_antisymmetric(const Parallelogram& p, double slack) {
    return intersect_empty(p, mirror(p), slack);
}

bool subsumes(const Parallelogram& outer, const Parallelogram& inner, double slack) {
    return region_subsumed_by(to_region(inner), to_region(outer), slack).holds;
}

bool intersect_empty(const Parallelogram& p1, const Parallelogram& p2, double slack) {
    return !to_region(p1).intersect(to_region(p2)).feasible(slack);
}

bool intersection_subsumed(const Parallelogram& p1, const Parallelogram& p2,
                           const Parallelogram& p3, double slack) {
    ConvexRegion2D both = to_region(p1).intersect(to_region(p2));
    return region_subsumed_by(both, to_region(p3), slack).holds;
}

SubsumptionCheck region_subsumed_by(const ConvexRegion2D& region, const Parallelogram& p,
                                    double slack) {
    return region_subsumed_by(region, to_region(p), slack);
}

namespace {

bool all_dims(const ModelConfig& m, const std::function<bool(std::size_t)>& pred) {
    for (std::size_t j = 0; j < m.dim; ++j)
        if (!pred(j)) return false;
    return m.dim > 0;
}

bool some_dim(const ModelConfig& m, const std::function<bool(std::size_t)>& pred) {
    for (std::size_t j = 0; j < m.dim; ++j)
        if (pred(j)) return true;
    return false;
}

}  // namespace

bool model_symmetric(const ModelConfig& m, std::uint32_t r, double slack) {
    const RelationEmbedding& rel = m.relations[r];
    return all_dims(m, [&](std::size_t j) { return is_symmetric(parallelogram_of(rel, j), slack); });
}

bool model_mirror_disjoint(const ModelConfig& m, std::uint32_t r, double slack) {
    const RelationEmbedding& rel = m.relations[r];
    return some_dim(m,
                    [&](std::size_t j) { return is_antisymmetric(parallelogram_of(rel, j), slack); });
}

bool model_not_symmetric_somewhere(const ModelConfig& m, std::uint32_t r, double slack) {
    const RelationEmbedding& rel = m.relations[r];
    return some_dim(m, [&](std::size_t j) { return !is_symmetric(parallelogram_of(rel, j), slack); });
}

bool model_inversion(const ModelConfig& m, std::uint32_t r1, std::uint32_t r2, double slack) {
    const RelationEmbedding& a = m.relations[r1];
    const RelationEmbedding& b = m.relations[r2];
    return all_dims(m, [&](std::size_t j) {
        return regions_equal(to_region(parallelogram_of(a, j)),
                             to_region(mirror(parallelogram_of(b, j))), slack);
    });
}

bool model_hierarchy(const ModelConfig& m, std::uint32_t sub, std::uint32_t super, double slack) {
    const RelationEmbedding& lo = m.relations[sub];
    const RelationEmbedding& hi = m.relations[super];
    return all_dims(m, [&](std::size_t j) {
        return subsumes(parallelogram_of(hi, j), parallelogram_of(lo, j), slack);
    });
}

bool model_mutual_exclusion(const ModelConfig& m, std::uint32_t r1, std::uint32_t r2,
                            double slack) {
    const RelationEmbedding& a = m.relations[r1];
    const RelationEmbedding& b = m.relations[r2];
    return some_dim(m, [&](std::size_t j) {
        return intersect_empty(parallelogram_of(a, j), parallelogram_of(b, j), slack);
    });
}

bool model_intersection_pattern(const ModelConfig& m, std::uint32_t r1, std::uint32_t r2,
                                std::uint32_t r3, double slack) {
    const RelationEmbedding& a = m.relations[r1];
    const RelationEmbedding& b = m.relations[r2];
    const RelationEmbedding& c = m.relations[r3];
    return all_dims(m, [&](std::size_t j) {
        return intersection_subsumed(parallelogram_of(a, j), parallelogram_of(b, j),
                                     parallelogram_of(c, j), slack);
    });
}

namespace {

// Precomputed per-(relation, dimension) regions, clipped to the entity
// universe when a domain bound is set.
struct CertifyContext {
    explicit CertifyContext(const ModelConfig& m) : model(m) {}

    const ModelConfig& model;
    double slack = kGeomSlack;
    double domain_bound = 0.0;
    std::vector<std::uint32_t> subset;
    std::vector<ConvexRegion2D> region;         // relation-major, dim-minor
    std::vector<ConvexRegion2D> mirror_region;  // same layout
    std::vector<IntervalPair> intervals;

    std::string name(std::uint32_t r) const { return model.relation_ids[r]; }
    const RelationEmbedding& rel(std::uint32_t r) const { return model.relations[r]; }
    const ConvexRegion2D& at(std::uint32_t r, std::size_t j) const {
        return region[r * model.dim + j];
    }
    const ConvexRegion2D& mirrored(std::uint32_t r, std::size_t j) const {
        return mirror_region[r * model.dim + j];
    }

    void clip(ConvexRegion2D& reg) const {
        if (domain_bound <= 0.0) return;
        reg.constraints.push_back(HalfPlane{1.0, 0.0, domain_bound});
        reg.constraints.push_back(HalfPlane{-1.0, 0.0, domain_bound});
        reg.constraints.push_back(HalfPlane{0.0, 1.0, domain_bound});
        reg.constraints.push_back(HalfPlane{0.0, -1.0, domain_bound});
    }
};

// Certificate with one DimFact per dimension; holds when every dim holds
// (universal) or some dim holds (existential).
Certificate make_cert(const CertifyContext& ctx, std::string pattern,
                      std::vector<std::uint32_t> rels, bool universal,
                      const std::function<DimFact(std::size_t)>& check) {
    Certificate cert;
    cert.pattern = std::move(pattern);
    for (std::uint32_t r : rels) cert.relations.push_back(ctx.name(r));
    bool all = true, any = false;
    for (std::size_t j = 0; j < ctx.model.dim; ++j) {
        DimFact fact = check(j);
        all = all && fact.holds;
        any = any || fact.holds;
        cert.per_dimension.push_back(fact);
    }
    cert.holds = ctx.model.dim > 0 && (universal ? all : any);
    return cert;
}

bool composable(const CertifyContext& ctx, std::uint32_t r1, std::uint32_t r2) {
    for (std::size_t j = 0; j < ctx.model.dim; ++j) {
        const Interval& t1 = ctx.intervals[r1 * ctx.model.dim + j].tail;
        const Interval& h2 = ctx.intervals[r2 * ctx.model.dim + j].head;
        if (!Interval::overlap(t1, h2, ctx.slack)) return false;
    }
    return ctx.model.dim > 0;
}

}  // namespace

std::vector<Certificate> certify_patterns(const ModelConfig& m, const CertifyOptions& opts) {
    CertifyContext ctx{m};
    ctx.slack = opts.slack > 0.0 ? opts.slack : kGeomSlack;
    ctx.domain_bound = opts.domain_bound;
    ctx.subset = opts.relations;
    if (ctx.subset.empty())
        for (std::uint32_t r = 0; r < m.n_relations(); ++r) ctx.subset.push_back(r);

    ctx.region.resize(m.n_relations() * m.dim);
    ctx.mirror_region.resize(m.n_relations() * m.dim);
    ctx.intervals.resize(m.n_relations() * m.dim);
    for (std::uint32_t r : ctx.subset) {
        for (std::size_t j = 0; j < m.dim; ++j) {
            Parallelogram p = parallelogram_of(ctx.rel(r), j);
            ConvexRegion2D reg = to_region(p);
            ConvexRegion2D mir = to_region(mirror(p));
            ctx.clip(reg);
            ctx.clip(mir);
            ctx.region[r * m.dim + j] = std::move(reg);
            ctx.mirror_region[r * m.dim + j] = std::move(mir);
            // Head/tail intervals gate composition applicability.
            ctx.intervals[r * m.dim + j] =
                IntervalPair{ctx.at(r, j).project_x(), ctx.at(r, j).project_y()};
        }
    }
    const double slack = ctx.slack;
    std::vector<Certificate> out;

    for (std::uint32_t r : ctx.subset) {
        Certificate sym = make_cert(ctx, "symmetry", {r}, true, [&](std::size_t j) {
            return DimFact{j, regions_equal(ctx.at(r, j), ctx.mirrored(r, j), slack), 0.0};
        });
        if (sym.holds) out.push_back(sym);

        Certificate anti_disjoint = make_cert(ctx, "anti-symmetry", {r}, false, [&](std::size_t j) {
            bool disjoint = !ctx.at(r, j).intersect(ctx.mirrored(r, j)).feasible(slack);
            return DimFact{j, disjoint, 0.0};
        });
        if (anti_disjoint.holds) {
            anti_disjoint.note = "mirror-disjoint";
            out.push_back(anti_disjoint);
        } else if (!sym.holds) {
            Certificate weak = make_cert(ctx, "anti-symmetry", {r}, false, [&](std::size_t j) {
                return DimFact{j, !regions_equal(ctx.at(r, j), ctx.mirrored(r, j), slack), 0.0};
            });
            if (weak.holds) {
                weak.note = "not-symmetric";
                out.push_back(weak);
            }
        }
    }

    for (std::uint32_t a : ctx.subset) {
        for (std::uint32_t b : ctx.subset) {
            if (a == b) continue;
            if (a < b) {
                Certificate inv = make_cert(ctx, "inversion", {a, b}, true, [&](std::size_t j) {
                    return DimFact{j, regions_equal(ctx.at(a, j), ctx.mirrored(b, j), slack), 0.0};
                });
                if (inv.holds) out.push_back(inv);

                Certificate excl =
                    make_cert(ctx, "mutual-exclusion", {a, b}, false, [&](std::size_t j) {
                        bool empty = !ctx.at(a, j).intersect(ctx.at(b, j)).feasible(slack);
                        return DimFact{j, empty, 0.0};
                    });
                if (excl.holds) {
                    out.push_back(excl);
                } else {
                    Certificate overlap = make_cert(ctx, "overlap", {a, b}, true, [&](std::size_t j) {
                        return DimFact{j, ctx.at(a, j).intersect(ctx.at(b, j)).feasible(slack), 0.0};
                    });
                    if (overlap.holds) out.push_back(overlap);
                }
            }
            Certificate hier = make_cert(ctx, "hierarchy", {a, b}, true, [&](std::size_t j) {
                auto check = region_subsumed_by(ctx.at(a, j), ctx.at(b, j), slack);
                return DimFact{j, check.holds, check.worst};
            });
            if (hier.holds) out.push_back(hier);
        }
    }

    if (opts.max_body_len >= 2) {
        for (std::uint32_t a : ctx.subset) {
            for (std::uint32_t b : ctx.subset) {
                // Intersection body r_a(X,Y) ∧ r_b(X,Y): needs a geometric overlap.
                if (a < b) {
                    bool body_overlaps = true;
                    for (std::size_t j = 0; j < m.dim && body_overlaps; ++j)
                        body_overlaps = ctx.at(a, j).intersect(ctx.at(b, j)).feasible(slack);
                    if (body_overlaps) {
                        for (std::uint32_t c : ctx.subset) {
                            if (c == a || c == b) continue;
                            Certificate cert = make_cert(
                                ctx, "intersection", {a, b, c}, true, [&](std::size_t j) {
                                    ConvexRegion2D both = ctx.at(a, j).intersect(ctx.at(b, j));
                                    auto check = region_subsumed_by(both, ctx.at(c, j), slack);
                                    return DimFact{j, check.holds, check.worst};
                                });
                            if (cert.holds) out.push_back(cert);
                        }
                    }
                }

                // Composition body r_a(X,Y) ∧ r_b(Y,Z): gated by interval overlap.
                if (!composable(ctx, a, b)) continue;
                std::vector<ConvexRegion2D> sd(m.dim);
                for (std::size_t j = 0; j < m.dim; ++j) {
                    sd[j] = comp_def_region(ctx.rel(a), ctx.rel(b), j, ctx.domain_bound);
                    ctx.clip(sd[j]);
                }
                for (std::uint32_t c : ctx.subset) {
                    Certificate gen =
                        make_cert(ctx, "general-composition", {a, b, c}, true, [&](std::size_t j) {
                            auto check = region_subsumed_by(sd[j], ctx.at(c, j), slack);
                            return DimFact{j, check.holds, check.worst};
                        });
                    if (gen.holds) {
                        Certificate def = make_cert(
                            ctx, "compositional-definition", {a, b, c}, true, [&](std::size_t j) {
                                return DimFact{j, regions_equal(sd[j], ctx.at(c, j), slack), 0.0};
                            });
                        out.push_back(gen);
                        if (def.holds) out.push_back(def);
                    }
                }
            }
        }
    }
    return out;
}

std::string certificates_to_json(const std::vector<Certificate>& certs) {
    json arr = json::array();
    for (const Certificate& c : certs) {
        json dims = json::array();
        for (const DimFact& f : c.per_dimension)
            dims.push_back(json{{"j", f.j}, {"holds", f.holds}, {"witness_or_margin", f.margin}});
        json entry{{"pattern", c.pattern},
                   {"relations", c.relations},
                   {"holds", c.holds},
                   {"per_dimension", dims}};
        if (!c.note.empty()) entry["note"] = c.note;
        arr.push_back(entry);
    }
    return arr.dump(2) + "\n";
}

}  // namespace paragram

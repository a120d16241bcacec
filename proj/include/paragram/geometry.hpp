#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paragram/model.hpp"
#include "paragram/region2d.hpp"

namespace paragram {

// |u - center - slope*v| <= width, where u is the band's own axis coordinate
// (x for a head band, y for a tail band) and v the other one.
struct Band {
    double center = 0.0;
    double width = 0.0;
    double slope = 0.0;
};

// Intersection of a head band and a tail band in one correlation subspace.
struct Parallelogram {
    Band head;  // |x - c - s*y| <= w
    Band tail;  // |y - c - s*x| <= w

    // delta = 1 - r_h*r_t; |delta| <= 1e-9 means the shape is unbounded.
    double delta() const { return 1.0 - head.slope * tail.slope; }
    bool bounded() const;
};

inline constexpr double kDegenerateDelta = 1e-9;

Parallelogram parallelogram_of(const RelationEmbedding& r, std::size_t j);

// Swaps head and tail roles; point (x,y) lies in p iff (y,x) lies in mirror(p).
Parallelogram mirror(const Parallelogram& p);

ConvexRegion2D to_region(const Parallelogram& p);

struct CenterCorners {
    Vec2 center;
    std::vector<Vec2> corners;  // 4 points, 2 when a width is zero
};

// Closed forms for the bounded case; throws DataError when |delta| <= 1e-9.
CenterCorners center_and_corners(const Parallelogram& p);

struct IntervalPair {
    Interval head;
    Interval tail;
};

// Tightest axis-aligned projections of the parallelogram's region.
IntervalPair head_tail_intervals(const Parallelogram& p);

// Exact image of composing r1 with r2 in dimension j: the (x,z) half-plane
// system obtained by eliminating the middle entity coordinate from the eight
// band inequalities (Fourier-Motzkin on one variable); for generic positive
// slopes the result is six two-sided absolute-value constraints. A
// positive domain_bound additionally restricts the eliminated witness
// coordinate to [-domain_bound, domain_bound] (bounded entity universes).
ConvexRegion2D comp_def_region(const RelationEmbedding& r1, const RelationEmbedding& r2,
                               std::size_t j, double domain_bound = 0.0);

// |a*x + b*y - mid| <= bound, recovered by pairing opposite half-planes.
struct AbsConstraint {
    double a = 0.0;
    double b = 0.0;
    double mid = 0.0;
    double bound = 0.0;
};

std::vector<AbsConstraint> abs_constraints(const ConvexRegion2D& region);

// ---- Per-dimension predicates -------------------------------------------

bool is_symmetric(const Parallelogram& p, double slack = kGeomSlack);
bool is_antisymmetric(const Parallelogram& p, double slack = kGeomSlack);  // mirror-disjoint
bool subsumes(const Parallelogram& outer, const Parallelogram& inner, double slack = kGeomSlack);
bool intersect_empty(const Parallelogram& p1, const Parallelogram& p2, double slack = kGeomSlack);
bool intersection_subsumed(const Parallelogram& p1, const Parallelogram& p2,
                           const Parallelogram& p3, double slack = kGeomSlack);
SubsumptionCheck region_subsumed_by(const ConvexRegion2D& region, const Parallelogram& p,
                                    double slack = kGeomSlack);

// ---- Whole-model predicates (quantified over correlation subspaces) ------

bool model_symmetric(const ModelConfig& m, std::uint32_t r, double slack = kGeomSlack);
bool model_mirror_disjoint(const ModelConfig& m, std::uint32_t r, double slack = kGeomSlack);
bool model_not_symmetric_somewhere(const ModelConfig& m, std::uint32_t r,
                                   double slack = kGeomSlack);
bool model_inversion(const ModelConfig& m, std::uint32_t r1, std::uint32_t r2,
                     double slack = kGeomSlack);
bool model_hierarchy(const ModelConfig& m, std::uint32_t sub, std::uint32_t super,
                     double slack = kGeomSlack);
bool model_mutual_exclusion(const ModelConfig& m, std::uint32_t r1, std::uint32_t r2,
                            double slack = kGeomSlack);
bool model_intersection_pattern(const ModelConfig& m, std::uint32_t r1, std::uint32_t r2,
                                std::uint32_t r3, double slack = kGeomSlack);

// ---- Certification --------------------------------------------------------

struct DimFact {
    std::size_t j = 0;
    bool holds = false;
    double margin = 0.0;  // worst slack of the decisive check, when available
};

struct Certificate {
    std::string pattern;
    std::vector<std::string> relations;
    bool holds = false;
    std::string note;
    std::vector<DimFact> per_dimension;
};

struct CertifyOptions {
    std::vector<std::uint32_t> relations;  // empty: all
    double slack = 0.0;
    int max_body_len = 2;  // 1 disables intersection and composition checks
    // Positive: quantify over the bounded entity universe [-b, b] per
    // coordinate (tanh-trained models); 0: quantify over the whole plane.
    double domain_bound = 0.0;
};

// Runs the predicate battery over all relations / ordered pairs / triples in
// the subset and returns the certified facts. Composition is attempted only
// for pairs whose tail/head intervals overlap in every dimension.
std::vector<Certificate> certify_patterns(const ModelConfig& m, const CertifyOptions& opts = {});

std::string certificates_to_json(const std::vector<Certificate>& certs);

}  // namespace paragram

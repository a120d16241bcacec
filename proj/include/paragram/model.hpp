#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "paragram/kg.hpp"

namespace paragram {

enum class Variant { Base, Functional, EqSlopes, NoCenter, OneBand };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Per-relation six-vector parameterization. Widths are elementwise >= 0.
struct RelationEmbedding {
    std::vector<double> c_h, c_t;  // band centers
    std::vector<double> d_h, d_t;  // band widths
    std::vector<double> r_h, r_t;  // band slopes

    std::size_t dim() const { return c_h.size(); }
    void resize(std::size_t d);
    void check(std::size_t d) const;
};

// Entity vectors plus relation records bound to a vocabulary.
struct ModelConfig {
    std::size_t dim = 0;
    Variant variant = Variant::Base;
    std::vector<std::string> entity_ids;
    std::vector<std::string> relation_ids;
    std::vector<double> entities;  // row-major |E| x dim
    std::vector<RelationEmbedding> relations;

    std::size_t n_entities() const { return entity_ids.size(); }
    std::size_t n_relations() const { return relation_ids.size(); }

    std::span<const double> entity(std::size_t e) const {
        return {entities.data() + e * dim, dim};
    }
    std::span<double> entity(std::size_t e) { return {entities.data() + e * dim, dim}; }

    void check() const;
    void check_bound_to(const KnowledgeGraph& kg) const;
};

struct TripleGeometryResult {
    std::vector<double> tau;       // 2*dim elementwise absolute residuals
    std::vector<bool> inside;      // tau <= (d_h ‖ d_t) per component
    std::vector<double> distance;  // 2*dim
    double score = 0.0;            // -||distance||_2
};

// First dim components: |e_h - c_h - r_t ⊙ e_t|; last dim: |e_t - c_t - r_h ⊙ e_h|.
std::vector<double> triple_residual(const ModelConfig& m, const Triple& t);

// Truth test; OneBand checks only the first dim components.
bool is_true(const ModelConfig& m, const Triple& t);

// Componentwise: w = 2*width + 1; inside -> tau/w, outside -> tau*w - k with
// k = 0.5*(w-1)*(w - 1/w). OneBand zeroes the tail-band components.
std::vector<double> distance(const ModelConfig& m, const Triple& t);

double score(const ModelConfig& m, const Triple& t);

TripleGeometryResult triple_geometry(const ModelConfig& m, const Triple& t);

// One distance component.
double band_distance(double tau, double width);

// Structurally enforces the variant's parameter constraints in place.
// Functional: widths zero; NoCenter: centers zero; EqSlopes: all relations
// take relation 0's slopes; OneBand/Base: unchanged.
void apply_variant_constraints(ModelConfig& m, Variant variant);

// Checkpoint JSON (format_version 1).
std::string checkpoint_to_json(const ModelConfig& m);
ModelConfig checkpoint_from_json(const std::string& text);
void save_checkpoint(const ModelConfig& m, const std::string& path);
ModelConfig load_checkpoint(const std::string& path);

}  // namespace paragram

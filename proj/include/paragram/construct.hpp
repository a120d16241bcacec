#pragma once

#include <cstdint>
#include <vector>

#include "paragram/kg.hpp"
#include "paragram/model.hpp"

namespace paragram {

// Constructive builder that produces a model whose truth table equals a given
// small graph exactly. Works on unbounded parameters (no tanh projection).
//
// Dimension layout: one block of |E| dimensions per relation, dim(i,k) =
// i*|E| + k, plus one appended dimension per excluded self-loop.
struct BuildOptions {
    double margin = 0.5;        // entity separation margin m (> 0, <= 1)
    std::size_t cap = 64;       // guard on |E|*|R|
    bool audit = true;          // re-check construction assumptions per step
};

// Model capturing the complete graph: every triple over E and R is true.
// Entities: e_k(i,k) = 2, e_{k'}(i,k) = 1 for k' != k. Relations, all dims:
// c_h = c_t = 0, r_h = 1, r_t = 2, d_h = d_t = 4.
ModelConfig base_case(const KnowledgeGraph& kg, double margin = 0.5);

// Makes r_i(e_j, e_k) with j != k false while preserving every other truth
// value: raises the head slope in dim (i,k), shifts e_j by a smaller amount
// than every other entity, and re-centers/widens every band in that dim.
void falsify_triple(ModelConfig& m, std::uint32_t relation, std::uint32_t head,
                    std::uint32_t tail, double margin = 0.5);

// Appends one dimension per (relation, entity) loop whose only effect is to
// exclude that self-loop; duplicates are ignored.
void add_self_loop_exclusions(ModelConfig& m,
                              const std::vector<std::pair<std::uint32_t, std::uint32_t>>& loops);

// base_case + falsify every absent non-self-loop + exclude absent self-loops.
// Truth table of the result equals membership in train ∪ valid ∪ test.
ModelConfig build_capturing_model(const KnowledgeGraph& kg, const BuildOptions& opts = {});

// Throws when the construction assumptions are violated (positive slopes,
// positive entities, per-dimension dominance by >= margin).
void audit_assumptions(const ModelConfig& m, std::size_t n_entities, std::size_t n_relations,
                       double margin);

}  // namespace paragram

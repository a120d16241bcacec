#include "paragram/construct.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace paragram {

namespace {

constexpr double kWideBand = 100.0;

std::size_t block_dim(std::size_t n_entities, std::uint32_t relation, std::uint32_t entity) {
    return static_cast<std::size_t>(relation) * n_entities + entity;
}

}  // namespace

ModelConfig base_case(const KnowledgeGraph& kg, double margin) {
    if (margin <= 0.0 || margin > 1.0)
        throw ConfigError("construction margin must lie in (0, 1]");
    const std::size_t nE = kg.n_entities();
    const std::size_t nR = kg.n_relations();
    ModelConfig m;
    m.entity_ids = kg.entities;
    m.relation_ids = kg.relations;
    m.dim = nE * nR;
    m.entities.assign(nE * m.dim, 1.0);
    for (std::size_t e = 0; e < nE; ++e) {
        auto row = m.entity(e);
        for (std::size_t i = 0; i < nR; ++i)
            row[block_dim(nE, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(e))] = 2.0;
    }
    m.relations.resize(nR);
    for (auto& r : m.relations) {
        r.resize(m.dim);
        std::fill(r.r_h.begin(), r.r_h.end(), 1.0);
        std::fill(r.r_t.begin(), r.r_t.end(), 2.0);
        std::fill(r.d_h.begin(), r.d_h.end(), 4.0);
        std::fill(r.d_t.begin(), r.d_t.end(), 4.0);
    }
    return m;
}

void falsify_triple(ModelConfig& m, std::uint32_t relation, std::uint32_t head,
                    std::uint32_t tail, double margin) {
    if (head == tail)
        throw ConfigError("falsify_triple does not handle self-loops; use add_self_loop_exclusions");
    const std::size_t nE = m.n_entities();
    const std::size_t dim = block_dim(nE, relation, tail);
    RelationEmbedding& rel = m.relations[relation];

    const double e_j = m.entity(head)[dim];
    const double e_k = m.entity(tail)[dim];
    const double r_t = rel.r_t[dim];

    // Smallest slope increase that pushes the residual past -d_h, with slack.
    double needed = (e_j - r_t * e_k - rel.c_h[dim] + rel.d_h[dim]) / margin;
    double delta = needed > 0.0 ? needed * 1.01 : 1e-2;
    const double delta_max = delta * e_k;
    const double delta_ub = delta * (e_k - margin);

    // Band adjustments use the pre-move values.
    for (std::size_t i = 0; i < m.n_relations(); ++i) {
        RelationEmbedding& r = m.relations[i];
        double s_head = (i == relation) ? (delta + r.r_t[dim]) * delta * margin + delta_max
                                        : r.r_t[dim] * delta * margin + delta_max;
        double head_shift = (i == relation)
                                ? -delta * delta_max - r.r_t[dim] * delta_max + s_head / 2.0
                                : -r.r_t[dim] * delta_max + s_head / 2.0;
        double s_tail = r.r_h[dim] * delta * margin + delta_max;
        r.d_h[dim] += s_head / 2.0;
        r.c_h[dim] += head_shift;
        r.d_t[dim] += s_tail / 2.0;
        r.c_t[dim] += -r.r_h[dim] * delta_max + s_tail / 2.0;
    }
    rel.r_t[dim] += delta;

    for (std::size_t e = 0; e < nE; ++e)
        m.entity(e)[dim] += (e == head) ? delta_ub : delta_max;
}

void add_self_loop_exclusions(
    ModelConfig& m, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& loops) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> unique(loops.begin(), loops.end());
    if (unique.empty()) return;

    const std::size_t nE = m.n_entities();
    const std::size_t old_dim = m.dim;
    const std::size_t new_dim = old_dim + unique.size();

    std::vector<double> entities(nE * new_dim, 1.0);
    for (std::size_t e = 0; e < nE; ++e)
        std::copy_n(m.entities.begin() + static_cast<std::ptrdiff_t>(e * old_dim), old_dim,
                    entities.begin() + static_cast<std::ptrdiff_t>(e * new_dim));
    for (auto& r : m.relations) {
        r.c_h.resize(new_dim, 0.0);
        r.c_t.resize(new_dim, 0.0);
        r.d_h.resize(new_dim, kWideBand);
        r.d_t.resize(new_dim, kWideBand);
        r.r_h.resize(new_dim, 0.0);
        r.r_t.resize(new_dim, 0.0);
    }

    std::size_t dim = old_dim;
    for (const auto& [relation, entity] : unique) {
        if (relation >= m.n_relations() || entity >= nE)
            throw DataError("self-loop exclusion indices out of bounds");
        entities[entity * new_dim + dim] = 2.0;
        RelationEmbedding& r = m.relations[relation];
        // x + y in [2, 3]: admits (1,1), (1,2), (2,1); excludes (2,2).
        r.c_h[dim] = 2.5;
        r.d_h[dim] = 0.5;
        r.r_t[dim] = -1.0;
        ++dim;
    }
    m.dim = new_dim;
    m.entities = std::move(entities);
}

void audit_assumptions(const ModelConfig& m, std::size_t n_entities, std::size_t n_relations,
                       double margin) {
    const std::size_t core = n_entities * n_relations;
    for (std::size_t i = 0; i < n_relations; ++i) {
        const RelationEmbedding& r = m.relations[i];
        for (std::size_t d = 0; d < core; ++d)
            if (r.r_h[d] <= 0.0 || r.r_t[d] <= 0.0)
                throw Error("construction audit: non-positive slope");
    }
    for (std::size_t e = 0; e < n_entities; ++e) {
        auto row = m.entity(e);
        for (std::size_t d = 0; d < core; ++d)
            if (row[d] <= 0.0) throw Error("construction audit: non-positive entity value");
    }
    const double bound = margin * (1.0 - 1e-12);
    for (std::size_t i = 0; i < n_relations; ++i) {
        for (std::size_t k = 0; k < n_entities; ++k) {
            std::size_t d = block_dim(n_entities, static_cast<std::uint32_t>(i),
                                      static_cast<std::uint32_t>(k));
            double dominant = m.entity(k)[d];
            for (std::size_t e = 0; e < n_entities; ++e) {
                if (e == k) continue;
                if (dominant < m.entity(e)[d] + bound)
                    throw Error("construction audit: dominance margin violated");
            }
        }
    }
}

ModelConfig build_capturing_model(const KnowledgeGraph& kg, const BuildOptions& opts) {
    const std::size_t nE = kg.n_entities();
    const std::size_t nR = kg.n_relations();
    if (nE * nR > opts.cap)
        throw CapError("|E|*|R| = " + std::to_string(nE * nR) + " exceeds cap " +
                       std::to_string(opts.cap));
    ModelConfig m;
    if (nE == 0 || nR == 0) {
        m.entity_ids = kg.entities;
        m.relation_ids = kg.relations;
        m.relations.resize(nR);
        return m;
    }

    m = base_case(kg, opts.margin);
    if (opts.audit) audit_assumptions(m, nE, nR, opts.margin);

    for (std::uint32_t i = 0; i < nR; ++i) {
        for (std::uint32_t j = 0; j < nE; ++j) {
            for (std::uint32_t k = 0; k < nE; ++k) {
                if (j == k) continue;
                if (kg.known(Triple{j, i, k})) continue;
                falsify_triple(m, i, j, k, opts.margin);
                if (opts.audit) audit_assumptions(m, nE, nR, opts.margin);
            }
        }
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> loops;
    for (std::uint32_t i = 0; i < nR; ++i)
        for (std::uint32_t j = 0; j < nE; ++j)
            if (!kg.known(Triple{j, i, j})) loops.emplace_back(i, j);
    add_self_loop_exclusions(m, loops);
    return m;
}

}  // namespace paragram

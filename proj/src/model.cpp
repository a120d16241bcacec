#include "paragram/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace paragram {

using nlohmann::json;

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::Base: return "base";
        case Variant::Functional: return "functional";
        case Variant::EqSlopes: return "eqslopes";
        case Variant::NoCenter: return "nocenter";
        case Variant::OneBand: return "oneband";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    for (Variant v : {Variant::Base, Variant::Functional, Variant::EqSlopes, Variant::NoCenter,
                      Variant::OneBand})
        if (name == variant_name(v)) return v;
    throw ConfigError("unknown variant `" + name + "`");
}

void RelationEmbedding::resize(std::size_t d) {
    c_h.assign(d, 0.0);
    c_t.assign(d, 0.0);
    d_h.assign(d, 0.0);
    d_t.assign(d, 0.0);
    r_h.assign(d, 0.0);
    r_t.assign(d, 0.0);
}

void RelationEmbedding::check(std::size_t d) const {
    for (const auto* v : {&c_h, &c_t, &d_h, &d_t, &r_h, &r_t})
        if (v->size() != d) throw DataError("relation embedding vector length mismatch");
    for (const auto* v : {&d_h, &d_t})
        for (double w : *v)
            if (!(w >= 0.0)) throw DataError("negative width in relation embedding");
}

void ModelConfig::check() const {
    if (entities.size() != entity_ids.size() * dim)
        throw DataError("entity matrix shape mismatch");
    if (relations.size() != relation_ids.size())
        throw DataError("relation record count mismatch");
    for (const auto& r : relations) r.check(dim);
}

void ModelConfig::check_bound_to(const KnowledgeGraph& kg) const {
    check();
    if (entity_ids.size() != kg.n_entities() || relation_ids.size() != kg.n_relations())
        throw DataError("model vocabulary size does not match dataset");
    for (std::size_t i = 0; i < entity_ids.size(); ++i)
        if (entity_ids[i] != kg.entities[i]) throw DataError("entity vocabulary mismatch");
    for (std::size_t i = 0; i < relation_ids.size(); ++i)
        if (relation_ids[i] != kg.relations[i]) throw DataError("relation vocabulary mismatch");
}

std::vector<double> triple_residual(const ModelConfig& m, const Triple& t) {
    if (t.head >= m.n_entities() || t.tail >= m.n_entities() || t.relation >= m.n_relations())
        throw DataError("triple index out of model bounds");
    const RelationEmbedding& r = m.relations[t.relation];
    auto eh = m.entity(t.head);
    auto et = m.entity(t.tail);
    std::vector<double> tau(2 * m.dim);
    for (std::size_t j = 0; j < m.dim; ++j) {
        tau[j] = std::fabs(eh[j] - r.c_h[j] - r.r_t[j] * et[j]);
        tau[m.dim + j] = std::fabs(et[j] - r.c_t[j] - r.r_h[j] * eh[j]);
    }
    return tau;
}

bool is_true(const ModelConfig& m, const Triple& t) {
    const RelationEmbedding& r = m.relations[t.relation];
    std::vector<double> tau = triple_residual(m, t);
    for (std::size_t j = 0; j < m.dim; ++j)
        if (tau[j] > r.d_h[j]) return false;
    if (m.variant == Variant::OneBand) return true;
    for (std::size_t j = 0; j < m.dim; ++j)
        if (tau[m.dim + j] > r.d_t[j]) return false;
    return true;
}

double band_distance(double tau, double width) {
    double w = 2.0 * width + 1.0;
    if (tau <= width) return tau / w;
    double k = 0.5 * (w - 1.0) * (w - 1.0 / w);
    return tau * w - k;
}

std::vector<double> distance(const ModelConfig& m, const Triple& t) {
    const RelationEmbedding& r = m.relations[t.relation];
    std::vector<double> tau = triple_residual(m, t);
    std::vector<double> d(2 * m.dim, 0.0);
    for (std::size_t j = 0; j < m.dim; ++j) {
        d[j] = band_distance(tau[j], r.d_h[j]);
        if (m.variant != Variant::OneBand)
            d[m.dim + j] = band_distance(tau[m.dim + j], r.d_t[j]);
    }
    return d;
}

double score(const ModelConfig& m, const Triple& t) {
    std::vector<double> d = distance(m, t);
    double sum = 0.0;
    for (double v : d) sum += v * v;
    return -std::sqrt(sum);
}

TripleGeometryResult triple_geometry(const ModelConfig& m, const Triple& t) {
    const RelationEmbedding& r = m.relations[t.relation];
    TripleGeometryResult g;
    g.tau = triple_residual(m, t);
    g.inside.resize(2 * m.dim);
    g.distance.assign(2 * m.dim, 0.0);
    double sum = 0.0;
    for (std::size_t j = 0; j < 2 * m.dim; ++j) {
        double width = j < m.dim ? r.d_h[j] : r.d_t[j - m.dim];
        g.inside[j] = g.tau[j] <= width;
        if (m.variant == Variant::OneBand && j >= m.dim) continue;
        g.distance[j] = band_distance(g.tau[j], width);
        sum += g.distance[j] * g.distance[j];
    }
    g.score = -std::sqrt(sum);
    return g;
}

void apply_variant_constraints(ModelConfig& m, Variant variant) {
    switch (variant) {
        case Variant::Base:
        case Variant::OneBand:
            break;
        case Variant::Functional:
            for (auto& r : m.relations) {
                std::fill(r.d_h.begin(), r.d_h.end(), 0.0);
                std::fill(r.d_t.begin(), r.d_t.end(), 0.0);
            }
            break;
        case Variant::NoCenter:
            for (auto& r : m.relations) {
                std::fill(r.c_h.begin(), r.c_h.end(), 0.0);
                std::fill(r.c_t.begin(), r.c_t.end(), 0.0);
            }
            break;
        case Variant::EqSlopes:
            if (!m.relations.empty()) {
                const std::vector<double> rh = m.relations[0].r_h;
                const std::vector<double> rt = m.relations[0].r_t;
                for (auto& r : m.relations) {
                    r.r_h = rh;
                    r.r_t = rt;
                }
            }
            break;
    }
    m.variant = variant;
}

std::string checkpoint_to_json(const ModelConfig& m) {
    json j;
    j["format_version"] = 1;
    j["dim"] = m.dim;
    j["variant"] = variant_name(m.variant);
    j["entity_ids"] = m.entity_ids;
    j["relation_ids"] = m.relation_ids;
    json ents = json::array();
    for (std::size_t e = 0; e < m.n_entities(); ++e) {
        auto row = m.entity(e);
        ents.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["entities"] = std::move(ents);
    json rels = json::array();
    for (const auto& r : m.relations) {
        rels.push_back(json{{"c_h", r.c_h},
                            {"c_t", r.c_t},
                            {"d_h", r.d_h},
                            {"d_t", r.d_t},
                            {"r_h", r.r_h},
                            {"r_t", r.r_t}});
    }
    j["relations"] = std::move(rels);
    return j.dump(2) + "\n";
}

ModelConfig checkpoint_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != 1)
            throw DataError("unsupported checkpoint format_version");
        ModelConfig m;
        m.dim = j.at("dim").get<std::size_t>();
        m.variant = variant_from_name(j.at("variant").get<std::string>());
        m.entity_ids = j.at("entity_ids").get<std::vector<std::string>>();
        m.relation_ids = j.at("relation_ids").get<std::vector<std::string>>();
        m.entities.reserve(m.entity_ids.size() * m.dim);
        for (const auto& row : j.at("entities")) {
            auto vec = row.get<std::vector<double>>();
            if (vec.size() != m.dim) throw DataError("entity row length mismatch");
            m.entities.insert(m.entities.end(), vec.begin(), vec.end());
        }
        for (const auto& rj : j.at("relations")) {
            RelationEmbedding r;
            r.c_h = rj.at("c_h").get<std::vector<double>>();
            r.c_t = rj.at("c_t").get<std::vector<double>>();
            r.d_h = rj.at("d_h").get<std::vector<double>>();
            r.d_t = rj.at("d_t").get<std::vector<double>>();
            r.r_h = rj.at("r_h").get<std::vector<double>>();
            r.r_t = rj.at("r_t").get<std::vector<double>>();
            m.relations.push_back(std::move(r));
        }
        m.check();
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const ModelConfig& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << checkpoint_to_json(m);
}

ModelConfig load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return checkpoint_from_json(buf.str());
}

}  // namespace paragram

#include "paragram/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace paragram {

using nlohmann::json;

const char* side_name(QuerySide s) { return s == QuerySide::Head ? "head" : "tail"; }

namespace {

// Scores of all candidate replacements on one side of the triple.
std::vector<double> candidate_scores(const ModelConfig& m, const Triple& t, QuerySide side) {
    const std::size_t nE = m.n_entities();
    const RelationEmbedding& r = m.relations[t.relation];
    std::vector<double> scores(nE);
    const bool one_band = m.variant == Variant::OneBand;
    auto fixed = m.entity(side == QuerySide::Head ? t.tail : t.head);
    for (std::size_t cand = 0; cand < nE; ++cand) {
        auto moved = m.entity(cand);
        double sum = 0.0;
        for (std::size_t j = 0; j < m.dim; ++j) {
            double eh = side == QuerySide::Head ? moved[j] : fixed[j];
            double et = side == QuerySide::Head ? fixed[j] : moved[j];
            double head_res = std::fabs(eh - r.c_h[j] - r.r_t[j] * et);
            double d = band_distance(head_res, r.d_h[j]);
            sum += d * d;
            if (!one_band) {
                double tail_res = std::fabs(et - r.c_t[j] - r.r_h[j] * eh);
                d = band_distance(tail_res, r.d_t[j]);
                sum += d * d;
            }
        }
        scores[cand] = -std::sqrt(sum);
    }
    return scores;
}

long mean_rank(long optimistic, long pessimistic) {
    return (optimistic + pessimistic + 1) / 2;  // round half-up
}

struct Accumulator {
    double inv_rank_sum = 0.0;
    std::size_t n = 0;
    std::size_t hits1 = 0, hits3 = 0, hits10 = 0;

    void add(long rank) {
        inv_rank_sum += 1.0 / static_cast<double>(rank);
        ++n;
        hits1 += rank <= 1;
        hits3 += rank <= 3;
        hits10 += rank <= 10;
    }
};

}  // namespace

long rank_triple(const ModelConfig& m, const KnowledgeGraph& /*kg*/, const FilterIndex& filter,
                 const Triple& t, QuerySide side) {
    std::vector<double> scores = candidate_scores(m, t, side);
    const std::uint32_t gold = side == QuerySide::Head ? t.head : t.tail;
    const double gold_score = scores[gold];
    long greater = 0, ties = 0;
    for (std::uint32_t cand = 0; cand < scores.size(); ++cand) {
        if (cand == gold) continue;
        bool known = side == QuerySide::Head ? filter.head_known(t.relation, t.tail, cand)
                                             : filter.tail_known(t.relation, t.head, cand);
        if (known) continue;
        if (scores[cand] > gold_score)
            ++greater;
        else if (scores[cand] == gold_score)
            ++ties;
    }
    return mean_rank(1 + greater, 1 + greater + ties);
}

RankingReport evaluate(const ModelConfig& m, const KnowledgeGraph& kg, const FilterIndex& filter,
                       Split split) {
    return evaluate_triples(m, kg, filter, kg.split(split));
}

RankingReport evaluate_triples(const ModelConfig& m, const KnowledgeGraph& kg,
                               const FilterIndex& filter, const std::vector<Triple>& triples) {
    m.check_bound_to(kg);
    RankingReport report;
    Accumulator global;
    std::map<std::string, Accumulator> by_relation;
    std::map<std::string, Accumulator> by_cardinality;

    std::vector<std::string> card_of_relation(kg.n_relations());
    for (std::uint32_t r = 0; r < kg.n_relations(); ++r) {
        try {
            card_of_relation[r] = cardinality_name(classify_relation_cardinality(kg, r).tag);
        } catch (const DataError&) {
            card_of_relation[r] = "unclassified";  // no train triples
        }
    }

    for (const Triple& t : triples) {
        for (QuerySide side : {QuerySide::Head, QuerySide::Tail}) {
            long rank = rank_triple(m, kg, filter, t, side);
            global.add(rank);
            by_relation[kg.relations[t.relation]].add(rank);
            by_cardinality[card_of_relation[t.relation] + "/" + side_name(side)].add(rank);
        }
    }

    report.n_queries = global.n;
    if (global.n > 0) {
        report.mrr = global.inv_rank_sum / static_cast<double>(global.n);
        report.hits_at[1] = static_cast<double>(global.hits1) / static_cast<double>(global.n);
        report.hits_at[3] = static_cast<double>(global.hits3) / static_cast<double>(global.n);
        report.hits_at[10] = static_cast<double>(global.hits10) / static_cast<double>(global.n);
    }
    for (const auto& [key, acc] : by_relation)
        report.per_relation[key] = {acc.inv_rank_sum / static_cast<double>(acc.n), acc.n};
    for (const auto& [key, acc] : by_cardinality)
        report.per_cardinality[key] = {acc.inv_rank_sum / static_cast<double>(acc.n), acc.n};
    return report;
}

double uniform_baseline_mrr(const KnowledgeGraph& kg, const FilterIndex& filter, Split split) {
    const std::size_t nE = kg.n_entities();
    double sum = 0.0;
    std::size_t n = 0;
    for (const Triple& t : kg.split(split)) {
        for (QuerySide side : {QuerySide::Head, QuerySide::Tail}) {
            std::size_t kept = 1;  // the gold candidate
            for (std::uint32_t cand = 0; cand < nE; ++cand) {
                const std::uint32_t gold = side == QuerySide::Head ? t.head : t.tail;
                if (cand == gold) continue;
                bool known = side == QuerySide::Head
                                 ? filter.head_known(t.relation, t.tail, cand)
                                 : filter.tail_known(t.relation, t.head, cand);
                if (!known) ++kept;
            }
            // E[1/rank] for a uniformly random position among `kept` candidates.
            double harmonic = 0.0;
            for (std::size_t i = 1; i <= kept; ++i) harmonic += 1.0 / static_cast<double>(i);
            sum += harmonic / static_cast<double>(kept);
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

std::string report_to_json(const RankingReport& report) {
    json j;
    j["mrr"] = report.mrr;
    j["n_queries"] = report.n_queries;
    json hits;
    for (const auto& [k, v] : report.hits_at) hits["hits@" + std::to_string(k)] = v;
    j["hits_at"] = hits;
    json rel;
    for (const auto& [key, s] : report.per_relation)
        rel[key] = json{{"mrr", s.mrr}, {"n_queries", s.n_queries}};
    j["per_relation"] = rel;
    json card;
    for (const auto& [key, s] : report.per_cardinality)
        card[key] = json{{"mrr", s.mrr}, {"n_queries", s.n_queries}};
    j["per_cardinality"] = card;
    return j.dump(2) + "\n";
}

std::string report_to_table(const RankingReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %10s %10s\n", "metric", "value", "queries");
    out << line;
    std::snprintf(line, sizeof line, "%-28s %10.4f %10zu\n", "mrr", report.mrr, report.n_queries);
    out << line;
    for (const auto& [k, v] : report.hits_at) {
        std::snprintf(line, sizeof line, "%-28s %10.4f %10zu\n",
                      ("hits@" + std::to_string(k)).c_str(), v, report.n_queries);
        out << line;
    }
    for (const auto& [key, s] : report.per_relation) {
        std::snprintf(line, sizeof line, "%-28s %10.4f %10zu\n", ("mrr[" + key + "]").c_str(),
                      s.mrr, s.n_queries);
        out << line;
    }
    for (const auto& [key, s] : report.per_cardinality) {
        std::snprintf(line, sizeof line, "%-28s %10.4f %10zu\n", ("mrr[" + key + "]").c_str(),
                      s.mrr, s.n_queries);
        out << line;
    }
    return out.str();
}

}  // namespace paragram

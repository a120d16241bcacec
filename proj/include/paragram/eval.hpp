#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "paragram/kg.hpp"
#include "paragram/model.hpp"

namespace paragram {

enum class QuerySide { Head, Tail };

const char* side_name(QuerySide s);

// Filtered rank of the gold candidate on one side of a test triple.
// Candidates forming known triples are removed (never the gold one); ties at
// the gold score resolve to the mean of optimistic and pessimistic rank,
// rounded half-up. Scores are compared with exact floating-point equality.
long rank_triple(const ModelConfig& m, const KnowledgeGraph& kg, const FilterIndex& filter,
                 const Triple& t, QuerySide side);

struct StratumMetrics {
    double mrr = 0.0;
    std::size_t n_queries = 0;
};

struct RankingReport {
    double mrr = 0.0;
    std::map<int, double> hits_at;  // k in {1, 3, 10}
    std::map<std::string, StratumMetrics> per_relation;
    std::map<std::string, StratumMetrics> per_cardinality;  // "1-N/head" style keys
    std::size_t n_queries = 0;
};

// Head-side and tail-side queries for every triple of the split (2*|split|).
RankingReport evaluate(const ModelConfig& m, const KnowledgeGraph& kg, const FilterIndex& filter,
                       Split split = Split::Test);

// Same protocol restricted to an explicit triple list (pattern test sets).
RankingReport evaluate_triples(const ModelConfig& m, const KnowledgeGraph& kg,
                               const FilterIndex& filter, const std::vector<Triple>& triples);

// E[1/rank] under uniform ranking of the filtered candidate lists.
double uniform_baseline_mrr(const KnowledgeGraph& kg, const FilterIndex& filter,
                            Split split = Split::Test);

std::string report_to_json(const RankingReport& report);
std::string report_to_table(const RankingReport& report);

}  // namespace paragram

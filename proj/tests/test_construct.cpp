#include <doctest.h>

#include <algorithm>
#include <random>

#include "paragram/construct.hpp"

using namespace paragram;

namespace {

KnowledgeGraph vocab_graph(std::size_t n_entities, std::size_t n_relations) {
    KnowledgeGraph kg;
    for (std::size_t e = 0; e < n_entities; ++e) kg.intern_entity("e" + std::to_string(e));
    for (std::size_t r = 0; r < n_relations; ++r) kg.intern_relation("r" + std::to_string(r));
    return kg;
}

// Truth table over all |E|^2 * |R| triples.
std::vector<bool> truth_table(const ModelConfig& m) {
    std::vector<bool> out;
    for (std::uint32_t r = 0; r < m.n_relations(); ++r)
        for (std::uint32_t h = 0; h < m.n_entities(); ++h)
            for (std::uint32_t t = 0; t < m.n_entities(); ++t)
                out.push_back(is_true(m, Triple{h, r, t}));
    return out;
}

std::vector<bool> membership_table(const KnowledgeGraph& kg) {
    std::vector<bool> out;
    for (std::uint32_t r = 0; r < kg.n_relations(); ++r)
        for (std::uint32_t h = 0; h < kg.n_entities(); ++h)
            for (std::uint32_t t = 0; t < kg.n_entities(); ++t)
                out.push_back(kg.known(Triple{h, r, t}));
    return out;
}

KnowledgeGraph random_graph(std::mt19937_64& rng, std::size_t n_entities, std::size_t n_relations,
                            double density) {
    KnowledgeGraph kg = vocab_graph(n_entities, n_relations);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (std::uint32_t r = 0; r < n_relations; ++r)
        for (std::uint32_t h = 0; h < n_entities; ++h)
            for (std::uint32_t t = 0; t < n_entities; ++t)
                if (coin(rng) < density) kg.add_triple(Triple{h, r, t}, Split::Train);
    return kg;
}

}  // namespace

TEST_CASE("base case captures the complete graph") {
    KnowledgeGraph kg = vocab_graph(2, 1);
    ModelConfig m = base_case(kg, 0.5);
    CHECK(m.dim == 2);
    for (std::uint32_t h = 0; h < 2; ++h)
        for (std::uint32_t t = 0; t < 2; ++t) CHECK(is_true(m, Triple{h, 0, t}));
}

TEST_CASE("base case separation is exactly 1 in every dimension") {
    KnowledgeGraph kg = vocab_graph(3, 2);
    ModelConfig m = base_case(kg, 1.0);
    audit_assumptions(m, 3, 2, 1.0);
    double min_gap = 1e9;
    for (std::uint32_t i = 0; i < 2; ++i)
        for (std::uint32_t k = 0; k < 3; ++k) {
            std::size_t d = i * 3 + k;
            for (std::uint32_t e = 0; e < 3; ++e)
                if (e != k) min_gap = std::min(min_gap, m.entity(k)[d] - m.entity(e)[d]);
        }
    CHECK(min_gap == doctest::Approx(1.0));
}

TEST_CASE("single entity base case has all self-loops true") {
    KnowledgeGraph kg = vocab_graph(1, 2);
    ModelConfig m = base_case(kg, 0.5);
    CHECK(is_true(m, Triple{0, 0, 0}));
    CHECK(is_true(m, Triple{0, 1, 0}));
}

TEST_CASE("falsify_triple flips exactly one truth value") {
    KnowledgeGraph kg = vocab_graph(3, 2);
    ModelConfig m = base_case(kg, 0.5);
    auto before = truth_table(m);
    falsify_triple(m, 1, 0, 2, 0.5);
    audit_assumptions(m, 3, 2, 0.5);
    auto after = truth_table(m);
    std::size_t flips = 0;
    for (std::size_t i = 0; i < before.size(); ++i)
        if (before[i] != after[i]) ++flips;
    CHECK(flips == 1);
    CHECK_FALSE(is_true(m, Triple{0, 1, 2}));
}

TEST_CASE("falsified triples stay false through later steps") {
    KnowledgeGraph kg = vocab_graph(4, 1);
    ModelConfig m = base_case(kg, 0.5);
    falsify_triple(m, 0, 0, 1, 0.5);
    falsify_triple(m, 0, 2, 1, 0.5);  // same dimension (0, tail=1)
    falsify_triple(m, 0, 3, 2, 0.5);
    audit_assumptions(m, 4, 1, 0.5);
    CHECK_FALSE(is_true(m, Triple{0, 0, 1}));
    CHECK_FALSE(is_true(m, Triple{2, 0, 1}));
    CHECK_FALSE(is_true(m, Triple{3, 0, 2}));
    CHECK(is_true(m, Triple{1, 0, 0}));
    CHECK(is_true(m, Triple{0, 0, 0}));  // self-loops still true
}

TEST_CASE("self-loops on the diagonal are rejected by falsify_triple") {
    KnowledgeGraph kg = vocab_graph(2, 1);
    ModelConfig m = base_case(kg, 0.5);
    CHECK_THROWS_AS(falsify_triple(m, 0, 1, 1, 0.5), ConfigError);
}

TEST_CASE("self-loop exclusion removes exactly the requested loop") {
    KnowledgeGraph kg = vocab_graph(2, 1);
    ModelConfig m = base_case(kg, 0.5);
    add_self_loop_exclusions(m, {{0, 0}});
    CHECK(m.dim == 3);
    CHECK_FALSE(is_true(m, Triple{0, 0, 0}));
    CHECK(is_true(m, Triple{0, 0, 1}));
    CHECK(is_true(m, Triple{1, 0, 0}));
    CHECK(is_true(m, Triple{1, 0, 1}));
}

TEST_CASE("empty loop list leaves the model unchanged") {
    KnowledgeGraph kg = vocab_graph(2, 1);
    ModelConfig m = base_case(kg, 0.5);
    std::size_t dim = m.dim;
    add_self_loop_exclusions(m, {});
    CHECK(m.dim == dim);
}

TEST_CASE("duplicate loop entries are deduplicated") {
    KnowledgeGraph kg = vocab_graph(2, 1);
    ModelConfig m = base_case(kg, 0.5);
    add_self_loop_exclusions(m, {{0, 0}, {0, 0}, {0, 1}});
    CHECK(m.dim == 2 + 2);
    CHECK_FALSE(is_true(m, Triple{0, 0, 0}));
    CHECK_FALSE(is_true(m, Triple{1, 0, 1}));
    CHECK(is_true(m, Triple{0, 0, 1}));
}

TEST_CASE("excluding all loops of a relation keeps off-diagonal truth") {
    KnowledgeGraph kg = vocab_graph(3, 1);
    ModelConfig m = base_case(kg, 0.5);
    add_self_loop_exclusions(m, {{0, 0}, {0, 1}, {0, 2}});
    for (std::uint32_t h = 0; h < 3; ++h)
        for (std::uint32_t t = 0; t < 3; ++t)
            CHECK(is_true(m, Triple{h, 0, t}) == (h != t));
}

TEST_CASE("build captures a random 4x2 graph exactly") {
    std::mt19937_64 rng(55);
    KnowledgeGraph kg = random_graph(rng, 4, 2, 0.5);
    ModelConfig m = build_capturing_model(kg);
    CHECK(truth_table(m) == membership_table(kg));
    CHECK(m.dim <= 2 * 4 * 2);
}

TEST_CASE("empty graph: everything false after construction") {
    KnowledgeGraph kg = vocab_graph(3, 2);
    ModelConfig m = build_capturing_model(kg);
    auto table = truth_table(m);
    CHECK(std::none_of(table.begin(), table.end(), [](bool b) { return b; }));
}

TEST_CASE("complete graph needs no falsification and keeps the core dims") {
    KnowledgeGraph kg = vocab_graph(3, 1);
    for (std::uint32_t h = 0; h < 3; ++h)
        for (std::uint32_t t = 0; t < 3; ++t) kg.add_triple(Triple{h, 0, t}, Split::Train);
    ModelConfig m = build_capturing_model(kg);
    CHECK(m.dim == 3);  // no self-loop dimensions appended
    auto table = truth_table(m);
    CHECK(std::all_of(table.begin(), table.end(), [](bool b) { return b; }));
}

TEST_CASE("cap guard rejects oversized vocabularies") {
    KnowledgeGraph kg = vocab_graph(9, 8);
    CHECK_THROWS_AS(build_capturing_model(kg), CapError);
}

TEST_CASE("order independence: permuted falsification orders agree on truth") {
    std::mt19937_64 rng(77);
    KnowledgeGraph kg = random_graph(rng, 3, 2, 0.4);

    ModelConfig forward = base_case(kg, 0.5);
    std::vector<Triple> absent;
    for (std::uint32_t i = 0; i < 2; ++i)
        for (std::uint32_t j = 0; j < 3; ++j)
            for (std::uint32_t k = 0; k < 3; ++k)
                if (j != k && !kg.known(Triple{j, i, k})) absent.push_back(Triple{j, i, k});
    for (const Triple& t : absent) falsify_triple(forward, t.relation, t.head, t.tail, 0.5);

    ModelConfig backward = base_case(kg, 0.5);
    for (auto it = absent.rbegin(); it != absent.rend(); ++it)
        falsify_triple(backward, it->relation, it->head, it->tail, 0.5);

    CHECK(truth_table(forward) == truth_table(backward));
}

TEST_CASE("fifty random graphs are captured exactly within the dimension bound") {
    std::mt19937_64 rng(123);
    std::uniform_int_distribution<std::size_t> n_ent(1, 5), n_rel(1, 3);
    std::uniform_real_distribution<double> dens(0.0, 1.0);
    for (int iter = 0; iter < 50; ++iter) {
        KnowledgeGraph kg = random_graph(rng, n_ent(rng), n_rel(rng), dens(rng));
        ModelConfig m = build_capturing_model(kg);
        CHECK(truth_table(m) == membership_table(kg));
        CHECK(m.dim <= 2 * kg.n_entities() * kg.n_relations());
    }
}

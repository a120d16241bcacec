#include <doctest.h>

#include <cmath>
#include <random>

#include "paragram/model.hpp"
#include "support/paths.hpp"

using namespace paragram;

namespace {

// Model with explicit parameter rows; entities are 1-dim unless given.
ModelConfig tiny_model(std::vector<std::vector<double>> entity_rows,
                       std::vector<RelationEmbedding> rels) {
    ModelConfig m;
    m.dim = entity_rows.empty() ? 0 : entity_rows[0].size();
    for (std::size_t e = 0; e < entity_rows.size(); ++e) {
        m.entity_ids.push_back("e" + std::to_string(e));
        m.entities.insert(m.entities.end(), entity_rows[e].begin(), entity_rows[e].end());
    }
    for (std::size_t r = 0; r < rels.size(); ++r) m.relation_ids.push_back("r" + std::to_string(r));
    m.relations = std::move(rels);
    return m;
}

RelationEmbedding rel1d(double c_h, double d_h, double r_t, double c_t, double d_t, double r_h) {
    RelationEmbedding r;
    r.c_h = {c_h};
    r.d_h = {d_h};
    r.r_t = {r_t};
    r.c_t = {c_t};
    r.d_t = {d_t};
    r.r_h = {r_h};
    return r;
}

// Composition-table row for r1: c_h=-6, d_h=0, r_t=2, c_t=8, d_t=5, r_h=3.
RelationEmbedding comp_r1() { return rel1d(-6, 0, 2, 8, 5, 3); }

// Scalar-loop reference for the residual, independent of the library path.
std::vector<double> residual_reference(const ModelConfig& m, const Triple& t) {
    std::vector<double> tau;
    for (std::size_t j = 0; j < m.dim; ++j) {
        double eh = m.entities[t.head * m.dim + j];
        double et = m.entities[t.tail * m.dim + j];
        const RelationEmbedding& r = m.relations[t.relation];
        tau.push_back(std::abs(eh - r.c_h[j] - r.r_t[j] * et));
    }
    for (std::size_t j = 0; j < m.dim; ++j) {
        double eh = m.entities[t.head * m.dim + j];
        double et = m.entities[t.tail * m.dim + j];
        const RelationEmbedding& r = m.relations[t.relation];
        tau.push_back(std::abs(et - r.c_t[j] - r.r_h[j] * eh));
    }
    return tau;
}

ModelConfig random_model(std::mt19937_64& rng, std::size_t n_entities, std::size_t n_relations,
                         std::size_t dim) {
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::uniform_real_distribution<double> width(0.0, 1.5);
    std::vector<std::vector<double>> rows(n_entities, std::vector<double>(dim));
    for (auto& row : rows)
        for (double& x : row) x = val(rng);
    std::vector<RelationEmbedding> rels(n_relations);
    for (auto& r : rels) {
        r.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            r.c_h[j] = val(rng);
            r.c_t[j] = val(rng);
            r.r_h[j] = val(rng);
            r.r_t[j] = val(rng);
            r.d_h[j] = width(rng);
            r.d_t[j] = width(rng);
        }
    }
    return tiny_model(rows, rels);
}

}  // namespace

TEST_CASE("residual of the composition-table r1 row at (-4, 1)") {
    ModelConfig m = tiny_model({{-4.0}, {1.0}}, {comp_r1()});
    auto tau = triple_residual(m, Triple{0, 0, 1});
    REQUIRE(tau.size() == 2);
    CHECK(tau[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(tau[1] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(is_true(m, Triple{0, 0, 1}));  // tau = (0,5) <= (0,5), boundary inclusive
}

TEST_CASE("residual head component vanishes at the center line") {
    ModelConfig m = tiny_model({{0.7}, {0.0}}, {rel1d(0.7, 0.3, -1.2, 0.1, 0.2, 0.5)});
    auto tau = triple_residual(m, Triple{0, 0, 1});
    CHECK(tau[0] == doctest::Approx(0.0));
}

TEST_CASE("residual matches a scalar reference on random 3-dim instances") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 20; ++iter) {
        ModelConfig m = random_model(rng, 4, 2, 3);
        Triple t{1, 0, 3};
        auto got = triple_residual(m, t);
        auto want = residual_reference(m, t);
        for (std::size_t i = 0; i < want.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]));
    }
}

TEST_CASE("truth test rejects a pair outside the band") {
    ModelConfig m = tiny_model({{0.0}, {2.0}}, {comp_r1()});
    // first residual |0 + 6 - 2*2| = 2 > 0
    CHECK_FALSE(is_true(m, Triple{0, 0, 1}));
}

TEST_CASE("zero-width boundary pair is captured") {
    // e_h on the head line, e_t on the tail line, both widths zero.
    RelationEmbedding r = rel1d(0.5, 0.0, 2.0, -0.25, 0.0, 0.0);
    // e_t = c_t + r_h*e_h = -0.25; e_h = c_h + r_t*e_t = 0.5 - 0.5 = 0.
    ModelConfig m = tiny_model({{0.0}, {-0.25}}, {r});
    CHECK(is_true(m, Triple{0, 0, 1}));
}

TEST_CASE("distance is zero at zero residual") {
    CHECK(band_distance(0.0, 3.0) == doctest::Approx(0.0));
}

TEST_CASE("distance branches agree at the boundary tau = width") {
    // width 5: inside 5/11, outside 55 - 0.5*10*(11 - 1/11).
    double inside = 5.0 / 11.0;
    double outside = 5.0 * 11.0 - 0.5 * 10.0 * (11.0 - 1.0 / 11.0);
    CHECK(inside == doctest::Approx(outside).epsilon(1e-12));
    CHECK(band_distance(5.0, 5.0) == doctest::Approx(inside));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> width(0.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        double d = width(rng);
        double w = 2.0 * d + 1.0;
        double k = 0.5 * (w - 1.0) * (w - 1.0 / w);
        CHECK(std::abs(d / w - (d * w - k)) < 1e-9);
    }
}

TEST_CASE("zero width collapses the distance to the residual") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> tau(0.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        double t = tau(rng);
        CHECK(band_distance(t, 0.0) == doctest::Approx(t).epsilon(1e-15));
    }
}

TEST_CASE("distance is monotone in tau") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> width(0.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        double d = width(rng);
        double prev = -1.0;
        for (double t = 0.0; t <= 8.0; t += 0.01) {
            double v = band_distance(t, d);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("inside implies distance at most width/(2*width+1)") {
    std::mt19937_64 rng(13);
    for (int iter = 0; iter < 50; ++iter) {
        ModelConfig m = random_model(rng, 3, 1, 2);
        Triple t{0, 0, 1};
        if (!is_true(m, t)) continue;
        auto dist = distance(m, t);
        const RelationEmbedding& r = m.relations[0];
        for (std::size_t j = 0; j < m.dim; ++j) {
            double wh = 2.0 * r.d_h[j] + 1.0;
            CHECK(dist[j] <= r.d_h[j] / wh + 1e-12);
            double wt = 2.0 * r.d_t[j] + 1.0;
            CHECK(dist[m.dim + j] <= r.d_t[j] / wt + 1e-12);
        }
    }
}

TEST_CASE("score is the negative distance norm") {
    ModelConfig m = tiny_model({{0.0}, {0.0}}, {rel1d(0, 0, 0, 0, 0, 0)});
    CHECK(score(m, Triple{0, 0, 1}) == doctest::Approx(0.0));

    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 20; ++iter) {
        ModelConfig rm = random_model(rng, 3, 2, 4);
        Triple t{2, 1, 0};
        auto dist = distance(rm, t);
        double sum = 0.0;
        for (double v : dist) sum += v * v;
        CHECK(score(rm, t) == doctest::Approx(-std::sqrt(sum)));
    }
}

TEST_CASE("score -5 from a 3-4 distance vector") {
    // Two virtual dims with distances 3 and 4: engineer via zero widths.
    // tau = |e_h - c_h| = 3 and |e_t - c_t| = 4 with slopes 0 and width 0.
    ModelConfig m = tiny_model({{3.0}, {4.0}}, {rel1d(0, 0, 0, 0, 0, 0)});
    CHECK(score(m, Triple{0, 0, 1}) == doctest::Approx(-5.0));
}

TEST_CASE("score is invariant under appending an exactly-centered dimension") {
    std::mt19937_64 rng(23);
    ModelConfig m = random_model(rng, 2, 1, 2);
    Triple t{0, 0, 1};
    double before = score(m, t);

    ModelConfig wide = m;
    wide.dim = 3;
    wide.entities.clear();
    for (std::size_t e = 0; e < 2; ++e) {
        wide.entities.push_back(m.entities[e * 2]);
        wide.entities.push_back(m.entities[e * 2 + 1]);
        wide.entities.push_back(0.0);
    }
    RelationEmbedding& r = wide.relations[0];
    // e_h = c_h + r_t*e_t and e_t = c_t + r_h*e_h hold with everything zero.
    r.c_h.push_back(0.0);
    r.c_t.push_back(0.0);
    r.r_h.push_back(0.4);
    r.r_t.push_back(-0.7);
    r.d_h.push_back(0.9);
    r.d_t.push_back(0.0);
    CHECK(score(wide, t) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("variant constraints: functional zeroes widths") {
    std::mt19937_64 rng(29);
    ModelConfig m = random_model(rng, 3, 2, 3);
    apply_variant_constraints(m, Variant::Functional);
    for (const auto& r : m.relations) {
        for (double w : r.d_h) CHECK(w == 0.0);
        for (double w : r.d_t) CHECK(w == 0.0);
    }
}

TEST_CASE("variant constraints: nocenter zeroes centers, eqslopes shares slopes") {
    std::mt19937_64 rng(31);
    ModelConfig m = random_model(rng, 3, 3, 2);
    apply_variant_constraints(m, Variant::NoCenter);
    for (const auto& r : m.relations) {
        for (double c : r.c_h) CHECK(c == 0.0);
        for (double c : r.c_t) CHECK(c == 0.0);
    }
    apply_variant_constraints(m, Variant::EqSlopes);
    for (const auto& r : m.relations) {
        CHECK(r.r_h == m.relations[0].r_h);
        CHECK(r.r_t == m.relations[0].r_t);
    }
}

TEST_CASE("oneband scores ignore tail-band parameters") {
    std::mt19937_64 rng(37);
    ModelConfig m = random_model(rng, 3, 1, 3);
    m.variant = Variant::OneBand;
    Triple t{0, 0, 2};
    double before = score(m, t);
    for (std::size_t j = 0; j < m.dim; ++j) {
        m.relations[0].c_t[j] += 3.21;
        m.relations[0].d_t[j] += 1.0;
        m.relations[0].r_h[j] -= 2.0;
    }
    CHECK(score(m, t) == doctest::Approx(before));
    // Truth checks only the head band.
    auto tau = triple_residual(m, t);
    bool head_ok = true;
    for (std::size_t j = 0; j < m.dim; ++j) head_ok = head_ok && tau[j] <= m.relations[0].d_h[j];
    CHECK(is_true(m, t) == head_ok);
}

TEST_CASE("checkpoint round-trips byte-identically") {
    std::mt19937_64 rng(41);
    ModelConfig m = random_model(rng, 4, 2, 3);
    m.variant = Variant::NoCenter;
    apply_variant_constraints(m, Variant::NoCenter);
    std::string text = checkpoint_to_json(m);
    ModelConfig back = checkpoint_from_json(text);
    CHECK(checkpoint_to_json(back) == text);
    CHECK(back.dim == m.dim);
    CHECK(back.variant == m.variant);
    CHECK(back.entities == m.entities);
}

TEST_CASE("fixture checkpoints load") {
    ModelConfig m = load_checkpoint(fixture_path("general_composition.json"));
    CHECK(m.dim == 1);
    CHECK(m.relation_ids == std::vector<std::string>{"r1", "r2", "rd", "r3"});
    CHECK(m.relations[0].c_h[0] == -6.0);
}

TEST_CASE("negative width is rejected") {
    ModelConfig m = tiny_model({{0.0}}, {rel1d(0, -0.5, 0, 0, 0, 0)});
    CHECK_THROWS_AS(m.check(), DataError);
}

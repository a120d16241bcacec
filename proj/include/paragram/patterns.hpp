#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "paragram/kg.hpp"

namespace paragram {

// A relation applied to two variable slots. `inverse` swaps the slots when
// the atom is matched against a triple set, so r^-1(X,Y) reads as r(Y,X).
struct PatternAtom {
    static constexpr std::uint32_t kUnknownRelation = UINT32_MAX;

    std::string relation_name;
    std::uint32_t relation = kUnknownRelation;  // kUnknownRelation: not in vocabulary
    bool inverse = false;
    std::uint32_t subject = 0;  // variable slots
    std::uint32_t object = 0;
};

struct GroundPattern {
    std::vector<PatternAtom> body;
    PatternAtom head;
    std::vector<std::string> variables;

    std::string text() const;
};

// Grammar: `r1(X,Y) & r2(Y,Z) => r3(X,Z)`, optional `^-1` relation suffix.
// Relations missing from the vocabulary parse fine and match nothing.
GroundPattern parse_pattern(std::string_view line, const KnowledgeGraph& kg);

// One pattern per non-empty line; '#' starts a comment line.
std::vector<GroundPattern> parse_pattern_file(std::istream& in, const KnowledgeGraph& kg);

// h(ρ): fraction of the head relation's train triples whose body chain is
// satisfiable in the train split. Raises DataError when the head relation has
// no train triples (denominator zero).
double head_coverage(const KnowledgeGraph& kg, const GroundPattern& pattern);

// Applies the pattern `steps` times (simultaneous rounds) starting from the
// train split, stopping early at the fixpoint; returns derived triples that
// appear in the test split, sorted.
std::vector<Triple> derive_pattern_testset(const KnowledgeGraph& kg, const GroundPattern& pattern,
                                           int steps);

}  // namespace paragram

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "paragram/errors.hpp"

namespace paragram {

struct Triple {
    std::uint32_t head = 0;
    std::uint32_t relation = 0;
    std::uint32_t tail = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Packed key; vocabularies are bounded to 2^20 entities and 2^20 relations.
inline std::uint64_t triple_key(const Triple& t) {
    return (static_cast<std::uint64_t>(t.relation) << 40) |
           (static_cast<std::uint64_t>(t.head) << 20) | t.tail;
}

enum class Split { Train, Valid, Test };

const char* split_name(Split s);

// Entity/relation vocabularies plus the three disjoint triple splits.
// Read-only after construction; safe to share across threads.
class KnowledgeGraph {
   public:
    std::vector<std::string> entities;
    std::vector<std::string> relations;
    std::vector<Triple> train;
    std::vector<Triple> valid;
    std::vector<Triple> test;

    const std::vector<Triple>& split(Split s) const;

    std::optional<std::uint32_t> entity_index(const std::string& id) const;
    std::optional<std::uint32_t> relation_index(const std::string& id) const;

    bool contains(const Triple& t, Split s) const;
    bool known(const Triple& t) const;  // any split

    std::size_t n_entities() const { return entities.size(); }
    std::size_t n_relations() const { return relations.size(); }

    // Registers an identifier, assigning the next index on first appearance.
    std::uint32_t intern_entity(const std::string& id);
    std::uint32_t intern_relation(const std::string& id);

    // Appends a triple; rejects split overlaps, deduplicates within a split.
    // Returns false when the triple was a duplicate.
    bool add_triple(const Triple& t, Split s);

    void check_invariants() const;

   private:
    std::unordered_map<std::string, std::uint32_t> entity_index_;
    std::unordered_map<std::string, std::uint32_t> relation_index_;
    std::unordered_set<std::uint64_t> members_[3];
};

// Parses one split of head<TAB>relation<TAB>tail lines (LF or CRLF) into kg.
// Vocabulary grows in first-appearance order. Malformed lines raise DataError
// with the line number; in-split duplicates are dropped with a warning.
void parse_triples(std::istream& in, const std::string& source_name, Split s,
                   KnowledgeGraph& kg, std::vector<std::string>* warnings = nullptr);

// Loads dir/train.txt, dir/valid.txt, dir/test.txt (valid/test optional).
KnowledgeGraph load_dataset(const std::string& dir,
                            std::vector<std::string>* warnings = nullptr);

// Per-relation adjacency over an arbitrary triple set.
class TripleStore {
   public:
    TripleStore() = default;
    explicit TripleStore(const std::vector<Triple>& triples);

    void add(const Triple& t);
    bool contains(const Triple& t) const;
    std::size_t size() const { return members_.size(); }

    const std::vector<std::uint32_t>& tails(std::uint32_t relation, std::uint32_t head) const;
    const std::vector<std::uint32_t>& heads(std::uint32_t relation, std::uint32_t tail) const;
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs(std::uint32_t relation) const;

   private:
    std::unordered_set<std::uint64_t> members_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> tails_;  // (r,h) -> t*
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> heads_;  // (r,t) -> h*
    std::unordered_map<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>> pairs_;
};

// Known-heads / known-tails maps over train ∪ valid ∪ test, used to drop
// known-true candidates from rankings.
class FilterIndex {
   public:
    static FilterIndex build(const KnowledgeGraph& kg);

    bool head_known(std::uint32_t relation, std::uint32_t tail, std::uint32_t head) const;
    bool tail_known(std::uint32_t relation, std::uint32_t head, std::uint32_t tail) const;

    const std::vector<std::uint32_t>& known_heads(std::uint32_t relation, std::uint32_t tail) const;
    const std::vector<std::uint32_t>& known_tails(std::uint32_t relation, std::uint32_t head) const;

   private:
    TripleStore store_;
};

enum class CardinalityTag { OneOne, OneN, NOne, NN };

const char* cardinality_name(CardinalityTag tag);

struct CardinalityClass {
    CardinalityTag tag = CardinalityTag::OneOne;
    double mu_rt = 0.0;  // average heads per tail
    double mu_rh = 0.0;  // average tails per head
};

// Computed on the train split; the 1.5 boundary resolves toward the N side.
CardinalityClass classify_relation_cardinality(const KnowledgeGraph& kg, std::uint32_t relation);

}  // namespace paragram

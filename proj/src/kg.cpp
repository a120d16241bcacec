#include "paragram/kg.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace paragram {

namespace {

constexpr std::uint32_t kMaxVocab = 1u << 20;

std::uint64_t pair_key(std::uint32_t relation, std::uint32_t other) {
    return (static_cast<std::uint64_t>(relation) << 20) | other;
}

const std::vector<std::uint32_t> kNoIndices;
const std::vector<std::pair<std::uint32_t, std::uint32_t>> kNoPairs;

}  // namespace

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "?";
}

const std::vector<Triple>& KnowledgeGraph::split(Split s) const {
    switch (s) {
        case Split::Train: return train;
        case Split::Valid: return valid;
        case Split::Test: return test;
    }
    return train;
}

std::optional<std::uint32_t> KnowledgeGraph::entity_index(const std::string& id) const {
    auto it = entity_index_.find(id);
    if (it == entity_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> KnowledgeGraph::relation_index(const std::string& id) const {
    auto it = relation_index_.find(id);
    if (it == relation_index_.end()) return std::nullopt;
    return it->second;
}

bool KnowledgeGraph::contains(const Triple& t, Split s) const {
    return members_[static_cast<int>(s)].count(triple_key(t)) > 0;
}

bool KnowledgeGraph::known(const Triple& t) const {
    return contains(t, Split::Train) || contains(t, Split::Valid) || contains(t, Split::Test);
}

std::uint32_t KnowledgeGraph::intern_entity(const std::string& id) {
    auto it = entity_index_.find(id);
    if (it != entity_index_.end()) return it->second;
    if (entities.size() >= kMaxVocab) throw DataError("entity vocabulary exceeds 2^20");
    auto idx = static_cast<std::uint32_t>(entities.size());
    entities.push_back(id);
    entity_index_.emplace(id, idx);
    return idx;
}

std::uint32_t KnowledgeGraph::intern_relation(const std::string& id) {
    auto it = relation_index_.find(id);
    if (it != relation_index_.end()) return it->second;
    if (relations.size() >= kMaxVocab) throw DataError("relation vocabulary exceeds 2^20");
    auto idx = static_cast<std::uint32_t>(relations.size());
    relations.push_back(id);
    relation_index_.emplace(id, idx);
    return idx;
}

bool KnowledgeGraph::add_triple(const Triple& t, Split s) {
    if (t.head >= entities.size() || t.tail >= entities.size() || t.relation >= relations.size())
        throw DataError("triple index out of vocabulary bounds");
    for (int i = 0; i < 3; ++i) {
        if (i == static_cast<int>(s)) continue;
        if (members_[i].count(triple_key(t)))
            throw DataError("triple " + entities[t.head] + "\t" + relations[t.relation] + "\t" +
                            entities[t.tail] + " occurs in both " + split_name(static_cast<Split>(i)) +
                            " and " + split_name(s));
    }
    if (!members_[static_cast<int>(s)].insert(triple_key(t)).second) return false;
    switch (s) {
        case Split::Train: train.push_back(t); break;
        case Split::Valid: valid.push_back(t); break;
        case Split::Test: test.push_back(t); break;
    }
    return true;
}

void KnowledgeGraph::check_invariants() const {
    for (Split s : {Split::Train, Split::Valid, Split::Test}) {
        for (const Triple& t : split(s)) {
            if (t.head >= entities.size() || t.tail >= entities.size() ||
                t.relation >= relations.size())
                throw DataError("triple index out of vocabulary bounds");
        }
    }
}

void parse_triples(std::istream& in, const std::string& source_name, Split s, KnowledgeGraph& kg,
                   std::vector<std::string>* warnings) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::size_t tab1 = line.find('\t');
        std::size_t tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        std::size_t tab3 = tab2 == std::string::npos ? std::string::npos : line.find('\t', tab2 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos || tab3 != std::string::npos)
            throw DataError(source_name + ":" + std::to_string(line_no) +
                            ": expected head<TAB>relation<TAB>tail");
        std::string head = line.substr(0, tab1);
        std::string rel = line.substr(tab1 + 1, tab2 - tab1 - 1);
        std::string tail = line.substr(tab2 + 1);
        if (head.empty() || rel.empty() || tail.empty())
            throw DataError(source_name + ":" + std::to_string(line_no) + ": empty field");

        Triple t{kg.intern_entity(head), kg.intern_relation(rel), kg.intern_entity(tail)};
        if (!kg.add_triple(t, s) && warnings)
            warnings->push_back(source_name + ":" + std::to_string(line_no) +
                                ": duplicate triple dropped");
    }
}

KnowledgeGraph load_dataset(const std::string& dir, std::vector<std::string>* warnings) {
    KnowledgeGraph kg;
    bool any = false;
    const std::pair<const char*, Split> files[] = {
        {"train.txt", Split::Train}, {"valid.txt", Split::Valid}, {"test.txt", Split::Test}};
    for (const auto& [name, split] : files) {
        std::string path = dir + "/" + name;
        std::ifstream in(path);
        if (!in) {
            if (split == Split::Train) throw DataError("cannot open " + path);
            continue;
        }
        any = true;
        parse_triples(in, path, split, kg, warnings);
    }
    if (!any) throw DataError("no triple files under " + dir);
    return kg;
}

TripleStore::TripleStore(const std::vector<Triple>& triples) {
    for (const Triple& t : triples) add(t);
}

void TripleStore::add(const Triple& t) {
    if (!members_.insert(triple_key(t)).second) return;
    tails_[pair_key(t.relation, t.head)].push_back(t.tail);
    heads_[pair_key(t.relation, t.tail)].push_back(t.head);
    pairs_[t.relation].emplace_back(t.head, t.tail);
}

bool TripleStore::contains(const Triple& t) const { return members_.count(triple_key(t)) > 0; }

const std::vector<std::uint32_t>& TripleStore::tails(std::uint32_t relation,
                                                     std::uint32_t head) const {
    auto it = tails_.find(pair_key(relation, head));
    return it == tails_.end() ? kNoIndices : it->second;
}

const std::vector<std::uint32_t>& TripleStore::heads(std::uint32_t relation,
                                                     std::uint32_t tail) const {
    auto it = heads_.find(pair_key(relation, tail));
    return it == heads_.end() ? kNoIndices : it->second;
}

const std::vector<std::pair<std::uint32_t, std::uint32_t>>& TripleStore::pairs(
    std::uint32_t relation) const {
    auto it = pairs_.find(relation);
    return it == pairs_.end() ? kNoPairs : it->second;
}

FilterIndex FilterIndex::build(const KnowledgeGraph& kg) {
    FilterIndex index;
    for (Split s : {Split::Train, Split::Valid, Split::Test})
        for (const Triple& t : kg.split(s)) index.store_.add(t);
    return index;
}

bool FilterIndex::head_known(std::uint32_t relation, std::uint32_t tail,
                             std::uint32_t head) const {
    return store_.contains(Triple{head, relation, tail});
}

bool FilterIndex::tail_known(std::uint32_t relation, std::uint32_t head,
                             std::uint32_t tail) const {
    return store_.contains(Triple{head, relation, tail});
}

const std::vector<std::uint32_t>& FilterIndex::known_heads(std::uint32_t relation,
                                                           std::uint32_t tail) const {
    return store_.heads(relation, tail);
}

const std::vector<std::uint32_t>& FilterIndex::known_tails(std::uint32_t relation,
                                                           std::uint32_t head) const {
    return store_.tails(relation, head);
}

const char* cardinality_name(CardinalityTag tag) {
    switch (tag) {
        case CardinalityTag::OneOne: return "1-1";
        case CardinalityTag::OneN: return "1-N";
        case CardinalityTag::NOne: return "N-1";
        case CardinalityTag::NN: return "N-N";
    }
    return "?";
}

CardinalityClass classify_relation_cardinality(const KnowledgeGraph& kg, std::uint32_t relation) {
    std::unordered_set<std::uint32_t> heads, tails;
    std::size_t count = 0;
    for (const Triple& t : kg.train) {
        if (t.relation != relation) continue;
        heads.insert(t.head);
        tails.insert(t.tail);
        ++count;
    }
    if (count == 0)
        throw DataError("relation " +
                        (relation < kg.relations.size() ? kg.relations[relation] : "?") +
                        " has no train triples; cardinality undefined");
    CardinalityClass c;
    c.mu_rt = static_cast<double>(count) / static_cast<double>(tails.size());
    c.mu_rh = static_cast<double>(count) / static_cast<double>(heads.size());
    bool many_heads = c.mu_rt >= 1.5;  // boundary ties resolve toward N
    bool many_tails = c.mu_rh >= 1.5;
    c.tag = many_heads ? (many_tails ? CardinalityTag::NN : CardinalityTag::NOne)
                       : (many_tails ? CardinalityTag::OneN : CardinalityTag::OneOne);
    return c;
}

}  // namespace paragram

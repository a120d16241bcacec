#include "paragram/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <istream>
#include <unordered_map>

namespace paragram {

namespace {

constexpr std::uint32_t kUnbound = UINT32_MAX;

struct PatternParser {
    std::string_view text;
    std::size_t pos = 0;
    const KnowledgeGraph& kg;
    std::vector<std::string> variables;

    explicit PatternParser(std::string_view t, const KnowledgeGraph& g) : text(t), kg(g) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(std::string_view token) {
        skip_ws();
        if (text.substr(pos, token.size()) == token) {
            pos += token.size();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw DataError("pattern parse error at column " + std::to_string(pos + 1) + ": " + what +
                        " in `" + std::string(text) + "`");
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size()) {
            char c = text[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' ||
                c == '/')
                ++pos;
            else
                break;
        }
        if (pos == start) fail("expected identifier");
        return std::string(text.substr(start, pos - start));
    }

    std::uint32_t variable(const std::string& name) {
        for (std::uint32_t i = 0; i < variables.size(); ++i)
            if (variables[i] == name) return i;
        variables.push_back(name);
        return static_cast<std::uint32_t>(variables.size() - 1);
    }

    PatternAtom atom() {
        PatternAtom a;
        a.relation_name = ident();
        if (eat("^-1")) a.inverse = true;
        if (auto idx = kg.relation_index(a.relation_name)) a.relation = *idx;
        if (!eat("(")) fail("expected (");
        a.subject = variable(ident());
        if (!eat(",")) fail("expected ,");
        a.object = variable(ident());
        if (!eat(")")) fail("expected )");
        return a;
    }
};

// (subject, object) of the atom as triple (head, tail) roles.
inline std::pair<std::uint32_t, std::uint32_t> atom_args_to_triple(const PatternAtom& a,
                                                                   std::uint32_t subj,
                                                                   std::uint32_t obj) {
    return a.inverse ? std::pair{obj, subj} : std::pair{subj, obj};
}

// Backtracking join over the body atoms against a TripleStore.
bool body_satisfiable(const std::vector<PatternAtom>& body, std::size_t next,
                      const TripleStore& store, std::vector<std::uint32_t>& binding) {
    if (next == body.size()) return true;
    const PatternAtom& a = body[next];
    if (a.relation == PatternAtom::kUnknownRelation) return false;

    // Variable roles after applying the inverse flag.
    std::uint32_t head_var = a.inverse ? a.object : a.subject;
    std::uint32_t tail_var = a.inverse ? a.subject : a.object;
    std::uint32_t h = binding[head_var];
    std::uint32_t t = binding[tail_var];

    if (h != kUnbound && t != kUnbound)
        return store.contains(Triple{h, a.relation, t}) &&
               body_satisfiable(body, next + 1, store, binding);

    if (h != kUnbound) {
        for (std::uint32_t cand : store.tails(a.relation, h)) {
            binding[tail_var] = cand;
            if (body_satisfiable(body, next + 1, store, binding)) {
                binding[tail_var] = kUnbound;
                return true;
            }
        }
        binding[tail_var] = kUnbound;
        return false;
    }
    if (t != kUnbound) {
        for (std::uint32_t cand : store.heads(a.relation, t)) {
            binding[head_var] = cand;
            if (body_satisfiable(body, next + 1, store, binding)) {
                binding[head_var] = kUnbound;
                return true;
            }
        }
        binding[head_var] = kUnbound;
        return false;
    }
    for (const auto& [ph, pt] : store.pairs(a.relation)) {
        binding[head_var] = ph;
        if (head_var == tail_var && ph != pt) {
            binding[head_var] = kUnbound;
            continue;
        }
        binding[tail_var] = pt;
        if (body_satisfiable(body, next + 1, store, binding)) {
            binding[head_var] = kUnbound;
            binding[tail_var] = kUnbound;
            return true;
        }
        binding[head_var] = kUnbound;
        binding[tail_var] = kUnbound;
    }
    return false;
}

// Enumerates all bindings of the body, invoking fn(binding) for each.
void enumerate_bindings(const std::vector<PatternAtom>& body, std::size_t next,
                        const TripleStore& store, std::vector<std::uint32_t>& binding,
                        const std::function<void(const std::vector<std::uint32_t>&)>& fn) {
    if (next == body.size()) {
        fn(binding);
        return;
    }
    const PatternAtom& a = body[next];
    if (a.relation == PatternAtom::kUnknownRelation) return;
    std::uint32_t head_var = a.inverse ? a.object : a.subject;
    std::uint32_t tail_var = a.inverse ? a.subject : a.object;
    std::uint32_t h = binding[head_var];
    std::uint32_t t = binding[tail_var];

    if (h != kUnbound && t != kUnbound) {
        if (store.contains(Triple{h, a.relation, t}))
            enumerate_bindings(body, next + 1, store, binding, fn);
        return;
    }
    if (h != kUnbound) {
        for (std::uint32_t cand : store.tails(a.relation, h)) {
            binding[tail_var] = cand;
            enumerate_bindings(body, next + 1, store, binding, fn);
        }
        binding[tail_var] = kUnbound;
        return;
    }
    if (t != kUnbound) {
        for (std::uint32_t cand : store.heads(a.relation, t)) {
            binding[head_var] = cand;
            enumerate_bindings(body, next + 1, store, binding, fn);
        }
        binding[head_var] = kUnbound;
        return;
    }
    for (const auto& [ph, pt] : store.pairs(a.relation)) {
        if (head_var == tail_var && ph != pt) continue;
        binding[head_var] = ph;
        binding[tail_var] = pt;
        enumerate_bindings(body, next + 1, store, binding, fn);
        binding[head_var] = kUnbound;
        binding[tail_var] = kUnbound;
    }
}

}  // namespace

std::string GroundPattern::text() const {
    std::string out;
    auto atom_text = [&](const PatternAtom& a) {
        std::string s = a.relation_name;
        if (a.inverse) s += "^-1";
        s += "(" + variables[a.subject] + "," + variables[a.object] + ")";
        return s;
    };
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i) out += " & ";
        out += atom_text(body[i]);
    }
    out += " => " + atom_text(head);
    return out;
}

GroundPattern parse_pattern(std::string_view line, const KnowledgeGraph& kg) {
    PatternParser p(line, kg);
    GroundPattern pattern;
    pattern.body.push_back(p.atom());
    while (p.eat("&")) pattern.body.push_back(p.atom());
    if (!p.eat("=>")) p.fail("expected =>");
    pattern.head = p.atom();
    p.skip_ws();
    if (p.pos != p.text.size()) p.fail("trailing input");
    if (pattern.body.empty()) p.fail("pattern needs at least one body atom");
    pattern.variables = std::move(p.variables);
    return pattern;
}

std::vector<GroundPattern> parse_pattern_file(std::istream& in, const KnowledgeGraph& kg) {
    std::vector<GroundPattern> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        out.push_back(parse_pattern(line, kg));
    }
    return out;
}

double head_coverage(const KnowledgeGraph& kg, const GroundPattern& pattern) {
    if (pattern.head.relation == PatternAtom::kUnknownRelation)
        throw DataError("head relation `" + pattern.head.relation_name +
                        "` has no triples; head coverage undefined");
    TripleStore store(kg.train);
    const auto& head_pairs = store.pairs(pattern.head.relation);
    if (head_pairs.empty())
        throw DataError("head relation `" + pattern.head.relation_name +
                        "` has no triples; head coverage undefined");

    std::size_t covered = 0;
    std::vector<std::uint32_t> binding(pattern.variables.size(), kUnbound);
    for (const auto& [h, t] : head_pairs) {
        auto [subj, obj] = pattern.head.inverse ? std::pair{t, h} : std::pair{h, t};
        if (pattern.head.subject == pattern.head.object && subj != obj) continue;
        std::fill(binding.begin(), binding.end(), kUnbound);
        binding[pattern.head.subject] = subj;
        binding[pattern.head.object] = obj;
        if (body_satisfiable(pattern.body, 0, store, binding)) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(head_pairs.size());
}

std::vector<Triple> derive_pattern_testset(const KnowledgeGraph& kg, const GroundPattern& pattern,
                                           int steps) {
    if (steps < 1) throw ConfigError("derive_pattern_testset requires steps >= 1");
    if (pattern.head.relation == PatternAtom::kUnknownRelation)
        throw DataError("head relation `" + pattern.head.relation_name + "` not in vocabulary");

    TripleStore kb(kg.train);
    std::vector<std::uint32_t> binding(pattern.variables.size(), kUnbound);
    std::vector<Triple> in_test;

    for (int step = 0; step < steps; ++step) {
        std::vector<Triple> fresh;
        std::fill(binding.begin(), binding.end(), kUnbound);
        enumerate_bindings(pattern.body, 0, kb, binding,
                           [&](const std::vector<std::uint32_t>& b) {
                               std::uint32_t subj = b[pattern.head.subject];
                               std::uint32_t obj = b[pattern.head.object];
                               if (subj == kUnbound || obj == kUnbound) return;  // open head
                               auto [h, t] = atom_args_to_triple(pattern.head, subj, obj);
                               Triple derived{h, pattern.head.relation, t};
                               if (!kb.contains(derived)) fresh.push_back(derived);
                           });
        if (fresh.empty()) break;  // fixpoint
        for (const Triple& t : fresh) kb.add(t);
    }

    for (const Triple& t : kg.test)
        if (t.relation == pattern.head.relation && kb.contains(t)) in_test.push_back(t);
    std::sort(in_test.begin(), in_test.end());
    in_test.erase(std::unique(in_test.begin(), in_test.end()), in_test.end());
    return in_test;
}

}  // namespace paragram

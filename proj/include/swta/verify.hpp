#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "swta/automaton.hpp"
#include "swta/errors.hpp"
#include "swta/field.hpp"
#include "swta/scalar.hpp"

namespace swta {

enum class RelateMode { equal, included };

struct VerifyStats {
    size_t diff_states = 0;
    size_t lts_states = 0;
    size_t lts_edges = 0;
    size_t basis_insertions = 0;
    size_t max_basis_rows = 0;
    size_t domain_pairs = 0;
    size_t max_coefficient_bits = 0;

    void merge(const VerifyStats& other) {
        diff_states = std::max(diff_states, other.diff_states);
        lts_states += other.lts_states;
        lts_edges += other.lts_edges;
        basis_insertions += other.basis_insertions;
        max_basis_rows = std::max(max_basis_rows, other.max_basis_rows);
        domain_pairs += other.domain_pairs;
        max_coefficient_bits = std::max(max_coefficient_bits, other.max_coefficient_bits);
    }
};

struct Verdict {
    bool holds = false;
    std::string reason;                     // which stage decided
    std::optional<Word> witness;            // symbol-color word
    std::optional<std::string> branches;    // left/right choices along the witness, when applicable
    VerifyStats stats;
};

/// The difference automaton: disjoint union of A and B plus a fresh root with
/// the single transition root -(alpha, c1)-> (rootA - rootB | rootA - rootB),
/// where alpha is A's first symbol and c1 the first common color. Colors are
/// matched by name across the two automata.
inline Swta diff_swta(const Swta& a, const Swta& b) {
    if (a.modulus != b.modulus) throw Error(ErrorKind::InvalidModel, "difference of mixed-modulus automata");
    if (a.symbols.empty() || a.colors.empty())
        throw Error(ErrorKind::InvalidModel, "difference automaton needs at least one symbol and color");
    Swta d;
    d.modulus = a.modulus;

    StateId root = d.add_state("-");
    std::vector<StateId> map_a(a.state_count()), map_b(b.state_count());
    for (StateId s = 0; s < a.state_count(); s++) map_a[s] = d.add_state("A." + a.states[s]);
    for (StateId s = 0; s < b.state_count(); s++) map_b[s] = d.add_state("B." + b.states[s]);
    for (StateId s = 0; s < a.state_count(); s++) d.leaf[map_a[s]] = a.leaf[s];
    for (StateId s = 0; s < b.state_count(); s++) d.leaf[map_b[s]] = b.leaf[s];

    std::vector<SymbolId> sym_a(a.symbols.size()), sym_b(b.symbols.size());
    for (SymbolId i = 0; i < a.symbols.size(); i++) sym_a[i] = d.add_symbol(a.symbols[i]);
    for (SymbolId i = 0; i < b.symbols.size(); i++) sym_b[i] = d.add_symbol(b.symbols[i]);
    std::vector<ColorId> col_a(a.colors.size()), col_b(b.colors.size());
    for (ColorId i = 0; i < a.colors.size(); i++) col_a[i] = d.add_color(a.colors[i]);
    for (ColorId i = 0; i < b.colors.size(); i++) col_b[i] = d.add_color(b.colors[i]);

    auto remap = [](const LinearForm& form, const std::vector<StateId>& map) {
        LinearForm out;
        for (const auto& [s, c] : form.terms()) out.add_term(map[s], c);
        return out;
    };
    for (const auto& [key, tr] : a.transitions()) {
        auto [s, sym, col] = key;
        d.add_transition(map_a[s], sym_a[sym], col_a[col], {remap(tr.left, map_a), remap(tr.right, map_a)});
    }
    for (const auto& [key, tr] : b.transitions()) {
        auto [s, sym, col] = key;
        d.add_transition(map_b[s], sym_b[sym], col_b[col], {remap(tr.left, map_b), remap(tr.right, map_b)});
    }

    LinearForm seed;
    seed.add_term(map_a[a.root], AlgebraicComplex::one(a.modulus));
    seed.add_term(map_b[b.root], -AlgebraicComplex::one(a.modulus));
    d.add_transition(root, sym_a[0], col_a[0], {seed, seed});
    d.root = root;
    return d;
}

/// Linear transition system over the difference automaton: states pair the
/// branch-local support set with the domain-DFA subset; edges carry the
/// per-(symbol, color, side) coefficient rows. Built lazily.
class Lts {
  public:
    struct NodeKey {
        std::vector<StateId> supports;  // sorted
        DomainDfa::NodeId domain;

        bool operator<(const NodeKey& other) const {
            if (domain != other.domain) return domain < other.domain;
            return supports < other.supports;
        }
    };

    struct Edge {
        uint32_t target;
        SymbolId symbol;
        ColorId color;
        Side side;
    };

    explicit Lts(const Swta& d) : d_(d), dfa_(d) {
        // Row cache: per (state, symbol, color, side) the embedded coefficient row.
        rows_.resize(d.state_count());
        initial_ = intern({{d.root}, dfa_.initial()});
    }

    const Swta& automaton() const { return d_; }
    uint32_t initial() const { return initial_; }
    size_t node_count() const { return nodes_.size(); }
    const NodeKey& node(uint32_t id) const { return nodes_[id]; }

    bool is_target(uint32_t id) { return dfa_.accepting(nodes_[id].domain); }

    /// Lazily computed successors of an LTS node.
    const std::vector<Edge>& successors(uint32_t id) {
        if (id < edges_.size() && edges_computed_[id]) return edges_[id];
        if (edges_.size() < nodes_.size()) {
            edges_.resize(nodes_.size());
            edges_computed_.resize(nodes_.size(), false);
        }
        std::vector<Edge> out;
        const NodeKey key = nodes_[id];
        for (SymbolId sym = 0; sym < d_.symbols.size(); sym++) {
            for (ColorId col = 0; col < d_.colors.size(); col++) {
                DomainDfa::NodeId next_domain = dfa_.step(key.domain, sym, col);
                if (next_domain == DomainDfa::dead) continue;
                for (Side side : {Side::left, Side::right}) {
                    std::set<StateId> next_supports;
                    bool alive = true;
                    for (StateId s : key.supports) {
                        const SwtaTransition* tr = d_.transition(s, sym, col);
                        if (tr == nullptr) {
                            alive = false;
                            break;
                        }
                        const LinearForm& form = (side == Side::left) ? tr->left : tr->right;
                        for (StateId p : form.support()) next_supports.insert(p);
                    }
                    if (!alive) continue;
                    uint32_t target =
                        intern({std::vector<StateId>(next_supports.begin(), next_supports.end()), next_domain});
                    out.push_back({target, sym, col, side});
                }
            }
        }
        if (edges_.size() < nodes_.size()) {
            edges_.resize(nodes_.size());
            edges_computed_.resize(nodes_.size(), false);
        }
        edges_[id] = std::move(out);
        edges_computed_[id] = true;
        return edges_[id];
    }

    /// Applies the (symbol, color, side) transition matrix to a sparse vector:
    /// v'[p] = sum_q v[q] * form_q[p], rows materialized on demand.
    SparseVec apply_matrix(const SparseVec& v, SymbolId sym, ColorId col, Side side) {
        std::map<StateId, FieldScalar> acc;
        for (const auto& [q, coef] : v) {
            const SparseVec* row = row_of(q, sym, col, side);
            if (row == nullptr) continue;  // all-zero row for missing transitions
            for (const auto& [p, rc] : *row) {
                auto [it, inserted] = acc.try_emplace(p, rc * coef);
                if (!inserted) it->second = it->second + rc * coef;
            }
        }
        SparseVec out;
        out.reserve(acc.size());
        for (auto& [p, val] : acc)
            if (!val.is_zero()) out.emplace_back(p, std::move(val));
        return out;
    }

  private:
    uint32_t intern(NodeKey key) {
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
        uint32_t id = static_cast<uint32_t>(nodes_.size());
        ids_.emplace(key, id);
        nodes_.push_back(std::move(key));
        return id;
    }

    const SparseVec* row_of(StateId q, SymbolId sym, ColorId col, Side side) {
        auto key = std::make_tuple(sym, col, side == Side::left);
        auto& per_state = rows_[q];
        auto hit = per_state.find(key);
        if (hit != per_state.end()) return hit->second.has_value() ? &*hit->second : nullptr;
        const SwtaTransition* tr = d_.transition(q, sym, col);
        std::optional<SparseVec> row;
        if (tr != nullptr) {
            const LinearForm& form = (side == Side::left) ? tr->left : tr->right;
            SparseVec vec;
            for (const auto& [p, coef] : form.terms()) {
                FieldScalar embedded = FieldScalar::embed(coef);
                if (!embedded.is_zero()) vec.emplace_back(p, std::move(embedded));
            }
            std::sort(vec.begin(), vec.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            row = std::move(vec);
        }
        auto [it, inserted] = per_state.emplace(key, std::move(row));
        return it->second.has_value() ? &*it->second : nullptr;
    }

    const Swta& d_;
    DomainDfa dfa_;
    uint32_t initial_;
    std::map<NodeKey, uint32_t> ids_;
    std::vector<NodeKey> nodes_;
    std::vector<std::vector<Edge>> edges_;
    std::vector<bool> edges_computed_;
    std::vector<std::map<std::tuple<SymbolId, ColorId, bool>, std::optional<SparseVec>>> rows_;
};

/// Zero-invariant check in the Karr style: propagate the initial unit vector
/// along the LTS edges, keep a per-node basis of the linearly independent
/// reachable vectors, and demand that at every target node the leaf-value
/// functional (the sum over leaf-state coordinates) vanishes. A nonzero leaf
/// functional yields an early-exit witness path.
inline Verdict zero_invariant(Lts& lts) {
    Verdict verdict;
    const Swta& d = lts.automaton();

    auto leaf_functional = [&](const SparseVec& v) {
        FieldScalar acc = FieldScalar::zero(d.modulus);
        for (const auto& [q, coef] : v)
            if (d.leaf[q]) acc = acc + coef;
        return acc;
    };

    struct Entry {
        uint32_t node;
        SparseVec vector;
        int parent;  // index into the entry log
        SymbolId symbol = 0;
        ColorId color = 0;
        Side side = Side::left;
    };
    std::vector<Entry> log;
    std::map<uint32_t, Basis> bases;
    std::vector<size_t> worklist;

    auto coefficient_bits = [&](const SparseVec& v) {
        size_t bits = 0;
        for (const auto& [q, val] : v) {
            for (const Rat& r : val.coeffs()) {
                Int numer = boost::multiprecision::abs(boost::multiprecision::numerator(r)) + 1;
                Int denom = boost::multiprecision::denominator(r);
                bits = std::max(bits, static_cast<size_t>(boost::multiprecision::msb(numer)) + 1);
                bits = std::max(bits, static_cast<size_t>(boost::multiprecision::msb(denom)) + 1);
            }
        }
        return bits;
    };

    auto build_witness = [&](int entry_idx) {
        Word word;
        std::string branches;
        int cur = entry_idx;
        while (log[static_cast<size_t>(cur)].parent >= 0) {
            const Entry& e = log[static_cast<size_t>(cur)];
            word.push_back({e.symbol, e.color});
            branches.push_back(e.side == Side::left ? 'L' : 'R');
            cur = e.parent;
        }
        std::reverse(word.begin(), word.end());
        std::reverse(branches.begin(), branches.end());
        verdict.witness = word;
        verdict.branches = branches;
    };

    auto offer = [&](uint32_t node, SparseVec vec, int parent, SymbolId sym, ColorId col, Side side) -> bool {
        verdict.stats.max_coefficient_bits = std::max(verdict.stats.max_coefficient_bits, coefficient_bits(vec));
        auto [it, inserted] = bases.try_emplace(node, Basis(d.state_count()));
        if (!it->second.insert(vec)) return false;
        verdict.stats.basis_insertions++;
        verdict.stats.max_basis_rows = std::max(verdict.stats.max_basis_rows, it->second.size());
        log.push_back({node, std::move(vec), parent, sym, col, side});
        if (lts.is_target(node) && !leaf_functional(log.back().vector).is_zero()) {
            build_witness(static_cast<int>(log.size()) - 1);
            return true;
        }
        worklist.push_back(log.size() - 1);
        return false;
    };

    SparseVec v0 = {{d.root, FieldScalar::one(d.modulus)}};
    bool failed = offer(lts.initial(), std::move(v0), -1, 0, 0, Side::left);

    // FIFO propagation keeps witnesses short and runs deterministic.
    for (size_t head = 0; !failed && head < worklist.size(); head++) {
        size_t entry_idx = worklist[head];
        uint32_t node = log[entry_idx].node;
        for (const Lts::Edge& edge : lts.successors(node)) {
            SparseVec next = lts.apply_matrix(log[entry_idx].vector, edge.symbol, edge.color, edge.side);
            if (offer(edge.target, std::move(next), static_cast<int>(entry_idx), edge.symbol, edge.color,
                      edge.side)) {
                failed = true;
                break;
            }
        }
    }

    verdict.stats.lts_states = lts.node_count();
    verdict.holds = !failed;
    verdict.reason = failed ? "a nonzero leaf value is reachable" : "all reachable leaf values are zero";
    return verdict;
}

/// Compares the domains of the two tree functions by an on-the-fly product
/// of the domain DFAs, reporting a separating word when the relation fails.
inline Verdict domain_relate(const Swta& a, const Swta& b, RelateMode mode) {
    Verdict verdict;
    DomainDfa dfa_a(a), dfa_b(b);

    // The product ranges over the union alphabet, matched by name.
    std::vector<std::pair<std::string, std::string>> letters;
    for (const std::string& sym : a.symbols)
        for (const std::string& col : a.colors) letters.emplace_back(sym, col);
    for (const std::string& sym : b.symbols)
        for (const std::string& col : b.colors)
            if (std::find(letters.begin(), letters.end(), std::make_pair(sym, col)) == letters.end())
                letters.emplace_back(sym, col);

    using Pair = std::pair<DomainDfa::NodeId, DomainDfa::NodeId>;
    std::map<Pair, std::pair<Pair, size_t>> parent;  // child -> (parent, letter index)
    std::vector<Pair> queue = {{dfa_a.initial(), dfa_b.initial()}};
    std::set<Pair> seen = {queue.front()};

    auto report = [&](Pair state) {
        Word word;
        Pair cur = state;
        std::vector<size_t> letter_indices;
        while (parent.count(cur)) {
            letter_indices.push_back(parent.at(cur).second);
            cur = parent.at(cur).first;
        }
        std::reverse(letter_indices.begin(), letter_indices.end());
        for (size_t idx : letter_indices) {
            auto [sym_name, col_name] = letters[idx];
            auto sym = a.find_symbol(sym_name);
            auto col = a.find_color(col_name);
            // Report over A's ids when possible; fall back to B's.
            if (sym && col) {
                word.push_back({*sym, *col});
            } else {
                word.push_back({b.find_symbol(sym_name).value_or(0), b.find_color(col_name).value_or(0)});
            }
        }
        verdict.witness = word;
    };

    for (size_t head = 0; head < queue.size(); head++) {
        Pair state = queue[head];
        verdict.stats.domain_pairs++;
        bool acc_a = dfa_a.accepting(state.first);
        bool acc_b = dfa_b.accepting(state.second);
        bool mismatch = (mode == RelateMode::equal) ? (acc_a != acc_b) : (acc_a && !acc_b);
        if (mismatch) {
            report(state);
            verdict.holds = false;
            verdict.reason = (mode == RelateMode::equal) ? "domains differ" : "domain not included";
            return verdict;
        }
        for (size_t idx = 0; idx < letters.size(); idx++) {
            const auto& [sym_name, col_name] = letters[idx];
            auto sa = a.find_symbol(sym_name);
            auto ca = a.find_color(col_name);
            auto sb = b.find_symbol(sym_name);
            auto cb = b.find_color(col_name);
            Pair next;
            next.first = (sa && ca) ? dfa_a.step(state.first, *sa, *ca) : DomainDfa::dead;
            next.second = (sb && cb) ? dfa_b.step(state.second, *sb, *cb) : DomainDfa::dead;
            if (next.first == DomainDfa::dead && next.second == DomainDfa::dead) continue;
            if (seen.insert(next).second) {
                parent.emplace(next, std::make_pair(state, idx));
                queue.push_back(next);
            }
        }
    }
    verdict.holds = true;
    verdict.reason = (mode == RelateMode::equal) ? "domains equal" : "domain included";
    return verdict;
}

/// Functional equivalence/inclusion: the domain comparison plus the
/// zero-invariant of the difference automaton's LTS.
inline Verdict functional_relate(const Swta& a, const Swta& b, RelateMode mode) {
    Verdict domain = domain_relate(a, b, mode);
    if (!domain.holds) return domain;

    Swta d = diff_swta(a, b);
    Lts lts(d);
    Verdict values = zero_invariant(lts);
    values.stats.merge(domain.stats);
    values.stats.diff_states = d.state_count();
    if (!values.holds) {
        // Strip the fresh-root step from the witness so it speaks about A and B.
        if (values.witness.has_value() && !values.witness->empty()) {
            Word trimmed(values.witness->begin() + 1, values.witness->end());
            // The difference automaton shares A's symbol/color numbering by
            // construction (A's tables are inserted first).
            values.witness = trimmed;
            if (values.branches && !values.branches->empty()) values.branches = values.branches->substr(1);
        }
        values.reason = "tree values differ";
    } else {
        values.reason = (mode == RelateMode::equal) ? "functionally equivalent" : "functionally included";
    }
    return values;
}

/// Brute-force bounded comparison: enumerates all symbol-color words up to
/// the length bound and compares definedness and exact tree values. A fails
/// verdict is sound; a holds verdict is only evidence up to the bound.
inline Verdict bounded_oracle(const Swta& a, const Swta& b, size_t max_length, RelateMode mode) {
    Verdict verdict;
    std::vector<std::pair<std::string, std::string>> letters;
    for (const std::string& sym : a.symbols)
        for (const std::string& col : a.colors) letters.emplace_back(sym, col);
    for (const std::string& sym : b.symbols)
        for (const std::string& col : b.colors)
            if (std::find(letters.begin(), letters.end(), std::make_pair(sym, col)) == letters.end())
                letters.emplace_back(sym, col);

    std::vector<std::vector<size_t>> frontier = {{}};
    for (size_t len = 0; len <= max_length; len++) {
        std::vector<std::vector<size_t>> next;
        for (const auto& letter_word : frontier) {
            Word wa, wb;
            bool a_ok = true, b_ok = true;
            for (size_t idx : letter_word) {
                const auto& [sym_name, col_name] = letters[idx];
                auto sa = a.find_symbol(sym_name);
                auto ca = a.find_color(col_name);
                auto sb = b.find_symbol(sym_name);
                auto cb = b.find_color(col_name);
                if (sa && ca)
                    wa.push_back({*sa, *ca});
                else
                    a_ok = false;
                if (sb && cb)
                    wb.push_back({*sb, *cb});
                else
                    b_ok = false;
            }
            auto va = a_ok ? evaluate(a, wa) : std::nullopt;
            auto vb = b_ok ? evaluate(b, wb) : std::nullopt;
            bool bad;
            if (mode == RelateMode::equal)
                bad = (va.has_value() != vb.has_value()) || (va.has_value() && !(*va == *vb));
            else
                bad = va.has_value() && (!vb.has_value() || !(*va == *vb));
            if (bad) {
                verdict.holds = false;
                verdict.reason = "bounded enumeration found a separating word";
                verdict.witness = a_ok ? wa : wb;
                return verdict;
            }
            if (len < max_length) {
                for (size_t idx = 0; idx < letters.size(); idx++) {
                    auto extended = letter_word;
                    extended.push_back(idx);
                    next.push_back(std::move(extended));
                }
            }
        }
        frontier = std::move(next);
    }
    verdict.holds = true;
    verdict.reason = "no separating word up to length " + std::to_string(max_length);
    return verdict;
}

}  // namespace swta

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "swta/errors.hpp"
#include "swta/scalar.hpp"
#include "swta/tree.hpp"

namespace swta {

using StateId = uint32_t;
using SymbolId = uint32_t;
using ColorId = uint32_t;

/// Finite partial map from states to scalars. A key that is absent means the
/// state does not participate at all; a key with coefficient zero still counts
/// towards the support, which is what drives reachability and tree heights.
class LinearForm {
  public:
    LinearForm() = default;

    void add_term(StateId state, const AlgebraicComplex& coef) {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), state,
                                   [](const auto& entry, StateId s) { return entry.first < s; });
        if (it != terms_.end() && it->first == state) {
            it->second = it->second + coef;
        } else {
            terms_.insert(it, {state, coef});
        }
    }

    bool empty() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }
    const std::vector<std::pair<StateId, AlgebraicComplex>>& terms() const { return terms_; }

    const AlgebraicComplex* coefficient(StateId state) const {
        for (const auto& [s, c] : terms_)
            if (s == state) return &c;
        return nullptr;
    }

    std::vector<StateId> support() const {
        std::vector<StateId> out;
        out.reserve(terms_.size());
        for (const auto& [s, c] : terms_) out.push_back(s);
        return out;
    }

    bool operator==(const LinearForm& other) const { return terms_ == other.terms_; }

  private:
    std::vector<std::pair<StateId, AlgebraicComplex>> terms_;  // sorted by state
};

struct SwtaTransition {
    LinearForm left;
    LinearForm right;
};

/// Synchronized weighted tree automaton: a top-down partial transition
/// function (state, symbol, color) -> pair of linear forms, a root state and
/// a set of leaf states. Immutable by convention once built.
class Swta {
  public:
    unsigned modulus = 4;
    std::vector<std::string> states;   // index = StateId
    std::vector<std::string> symbols;  // file order; index = SymbolId
    std::vector<std::string> colors;   // file order; index = ColorId
    StateId root = 0;
    std::vector<bool> leaf;

    StateId add_state(const std::string& name) {
        states.push_back(name);
        leaf.push_back(false);
        return static_cast<StateId>(states.size() - 1);
    }

    SymbolId add_symbol(const std::string& name) {
        for (SymbolId i = 0; i < symbols.size(); i++)
            if (symbols[i] == name) return i;
        symbols.push_back(name);
        return static_cast<SymbolId>(symbols.size() - 1);
    }

    ColorId add_color(const std::string& name) {
        for (ColorId i = 0; i < colors.size(); i++)
            if (colors[i] == name) return i;
        colors.push_back(name);
        return static_cast<ColorId>(colors.size() - 1);
    }

    std::optional<SymbolId> find_symbol(const std::string& name) const {
        for (SymbolId i = 0; i < symbols.size(); i++)
            if (symbols[i] == name) return i;
        return std::nullopt;
    }

    std::optional<ColorId> find_color(const std::string& name) const {
        for (ColorId i = 0; i < colors.size(); i++)
            if (colors[i] == name) return i;
        return std::nullopt;
    }

    void add_transition(StateId state, SymbolId symbol, ColorId color, SwtaTransition transition) {
        auto key = std::make_tuple(state, symbol, color);
        if (delta_.count(key))
            throw Error(ErrorKind::InvalidModel, "duplicate transition from state " + states.at(state));
        delta_.emplace(key, std::move(transition));
    }

    const SwtaTransition* transition(StateId state, SymbolId symbol, ColorId color) const {
        auto it = delta_.find(std::make_tuple(state, symbol, color));
        return it == delta_.end() ? nullptr : &it->second;
    }

    const std::map<std::tuple<StateId, SymbolId, ColorId>, SwtaTransition>& transitions() const { return delta_; }

    size_t state_count() const { return states.size(); }
    size_t transition_count() const { return delta_.size(); }

    /// Drops support entries whose coefficient is zero. This can change the
    /// automaton's domain when the dropped state was the only witness forcing
    /// the height of a subtree, so it is opt-in and never used by the
    /// verification pipeline.
    Swta prune_zero_terms() const {
        Swta out = *this;
        out.delta_.clear();
        for (const auto& [key, tr] : delta_) {
            SwtaTransition pruned;
            for (const auto& [s, c] : tr.left.terms())
                if (!c.is_zero()) pruned.left.add_term(s, c);
            for (const auto& [s, c] : tr.right.terms())
                if (!c.is_zero()) pruned.right.add_term(s, c);
            out.delta_.emplace(key, std::move(pruned));
        }
        return out;
    }

  private:
    std::map<std::tuple<StateId, SymbolId, ColorId>, SwtaTransition> delta_;
};

using Word = std::vector<std::pair<SymbolId, ColorId>>;

namespace detail {

struct EvalMemo {
    // memo[state][position]: unset = not computed, nullopt inner = bottom
    std::vector<std::vector<std::optional<std::optional<PerfectTree>>>> slots;
};

inline std::optional<PerfectTree> evaluate_memo(const Swta& a, StateId q, const Word& w, size_t pos,
                                                EvalMemo& memo) {
    auto& slot = memo.slots[q][pos];
    if (slot.has_value()) return *slot;
    std::optional<PerfectTree> result;
    if (pos == w.size()) {
        if (a.leaf[q]) result = PerfectTree::leaf(AlgebraicComplex::one(a.modulus));
    } else {
        auto [symbol, color] = w[pos];
        const SwtaTransition* tr = a.transition(q, symbol, color);
        if (tr != nullptr) {
            auto sum_form = [&](const LinearForm& form) -> std::optional<PerfectTree> {
                std::vector<std::pair<AlgebraicComplex, PerfectTree>> terms;
                for (const auto& [state, coef] : form.terms()) {
                    auto sub = evaluate_memo(a, state, w, pos + 1, memo);
                    if (!sub.has_value()) return std::nullopt;
                    terms.emplace_back(coef, std::move(*sub));
                }
                if (terms.empty()) return std::nullopt;  // the empty form has no height witness
                return combine(terms);
            };
            auto left = sum_form(tr->left);
            auto right = sum_form(tr->right);
            if (left.has_value() && right.has_value())
                result = PerfectTree::cons(a.symbols[symbol], *left, *right);
        }
    }
    slot = result;
    return result;
}

}  // namespace detail

/// The tree function [[A,q]](w); nullopt is the paper's bottom.
inline std::optional<PerfectTree> evaluate(const Swta& a, StateId q, const Word& w) {
    detail::EvalMemo memo;
    memo.slots.assign(a.state_count(), std::vector<std::optional<std::optional<PerfectTree>>>(w.size() + 1));
    return detail::evaluate_memo(a, q, w, 0, memo);
}

inline std::optional<PerfectTree> evaluate(const Swta& a, const Word& w) { return evaluate(a, a.root, w); }

/// On-the-fly determinization of the domain word automaton. Subset states are
/// materialized on demand and cached; the handle is single-writer, distinct
/// handles over the same automaton may run concurrently.
class DomainDfa {
  public:
    using NodeId = uint32_t;
    static constexpr NodeId dead = 0;

    explicit DomainDfa(const Swta& a) : a_(a) {
        intern({});           // node 0: the empty (dead) subset
        intern({a_.root});    // node 1: initial
    }

    NodeId initial() const { return 1; }

    bool accepting(NodeId node) const {
        const auto& members = sets_[node];
        if (members.empty()) return false;
        for (StateId s : members)
            if (!a_.leaf[s]) return false;
        return true;
    }

    const std::vector<StateId>& members(NodeId node) const { return sets_[node]; }

    /// One determinized step. A member without the requested transition kills
    /// the whole word (its branch can never reach a leaf), hence the dead sink.
    NodeId step(NodeId node, SymbolId symbol, ColorId color) {
        auto key = std::make_pair(node, std::make_pair(symbol, color));
        auto cached = step_cache_.find(key);
        if (cached != step_cache_.end()) return cached->second;

        NodeId result = dead;
        if (node != dead) {
            std::set<StateId> next;
            bool alive = true;
            for (StateId s : sets_[node]) {
                const SwtaTransition* tr = a_.transition(s, symbol, color);
                // A missing transition, or an empty ("0") form with no height
                // witness, makes every word through this subset undefined.
                if (tr == nullptr || tr->left.empty() || tr->right.empty()) {
                    alive = false;
                    break;
                }
                for (StateId p : tr->left.support()) next.insert(p);
                for (StateId p : tr->right.support()) next.insert(p);
            }
            if (alive) result = intern(std::vector<StateId>(next.begin(), next.end()));
        }
        step_cache_.emplace(key, result);
        return result;
    }

    size_t explored_count() const { return sets_.size(); }

  private:
    NodeId intern(std::vector<StateId> members) {
        std::sort(members.begin(), members.end());
        auto it = ids_.find(members);
        if (it != ids_.end()) return it->second;
        NodeId id = static_cast<NodeId>(sets_.size());
        ids_.emplace(members, id);
        sets_.push_back(std::move(members));
        return id;
    }

    const Swta& a_;
    std::map<std::vector<StateId>, NodeId> ids_;
    std::vector<std::vector<StateId>> sets_;
    std::map<std::pair<NodeId, std::pair<SymbolId, ColorId>>, NodeId> step_cache_;
};

/// Searches the domain DFA for an accepting subset. Returns a witness word
/// when the language is nonempty.
inline std::optional<Word> emptiness_witness(const Swta& a) {
    DomainDfa dfa(a);
    std::map<DomainDfa::NodeId, std::pair<DomainDfa::NodeId, std::pair<SymbolId, ColorId>>> parent;
    std::vector<DomainDfa::NodeId> queue = {dfa.initial()};
    std::set<DomainDfa::NodeId> seen = {dfa.initial()};
    for (size_t head = 0; head < queue.size(); head++) {
        DomainDfa::NodeId node = queue[head];
        if (dfa.accepting(node)) {
            Word word;
            DomainDfa::NodeId cur = node;
            while (parent.count(cur)) {
                word.push_back(parent.at(cur).second);
                cur = parent.at(cur).first;
            }
            std::reverse(word.begin(), word.end());
            return word;
        }
        // Lexicographic successor order keeps witnesses deterministic.
        for (SymbolId sym = 0; sym < a.symbols.size(); sym++) {
            for (ColorId col = 0; col < a.colors.size(); col++) {
                DomainDfa::NodeId next = dfa.step(node, sym, col);
                if (next == DomainDfa::dead) continue;
                if (seen.insert(next).second) {
                    parent.emplace(next, std::make_pair(node, std::make_pair(sym, col)));
                    queue.push_back(next);
                }
            }
        }
    }
    return std::nullopt;
}

inline bool is_empty(const Swta& a) { return !emptiness_witness(a).has_value(); }

/// Membership check: enumerates candidate words of length h(t). The symbol at
/// each level is forced by the tree's labels; only colors branch, pruned by
/// the domain DFA. Exponential in the worst case; desk scale only.
inline bool accepts(const Swta& a, const PerfectTree& t) {
    std::vector<SymbolId> level_symbols;
    for (const std::string& label : t.labels()) {
        auto sym = a.find_symbol(label);
        if (!sym.has_value()) return false;
        level_symbols.push_back(*sym);
    }
    DomainDfa dfa(a);
    Word word(t.height(), {0, 0});
    std::function<bool(size_t, DomainDfa::NodeId)> search = [&](size_t depth, DomainDfa::NodeId node) {
        if (depth == t.height()) {
            if (!dfa.accepting(node)) return false;
            auto value = evaluate(a, word);
            return value.has_value() && *value == t;
        }
        for (ColorId col = 0; col < a.colors.size(); col++) {
            DomainDfa::NodeId next = dfa.step(node, level_symbols[depth], col);
            if (next == DomainDfa::dead) continue;
            word[depth] = {level_symbols[depth], col};
            if (search(depth + 1, next)) return true;
        }
        return false;
    };
    return search(0, dfa.initial());
}

/// Language union. Inputs are renamed apart and their color sets made
/// disjoint; the fresh root duplicates both roots' transitions.
inline Swta language_union(const Swta& a, const Swta& b) {
    if (a.modulus != b.modulus) throw Error(ErrorKind::InvalidModel, "union of mixed-modulus automata");
    Swta c;
    c.modulus = a.modulus;

    StateId root_c = c.add_state("u");
    std::vector<StateId> map_a(a.state_count()), map_b(b.state_count());
    for (StateId s = 0; s < a.state_count(); s++) map_a[s] = c.add_state("a." + a.states[s]);
    for (StateId s = 0; s < b.state_count(); s++) map_b[s] = c.add_state("b." + b.states[s]);
    for (StateId s = 0; s < a.state_count(); s++) c.leaf[map_a[s]] = a.leaf[s];
    for (StateId s = 0; s < b.state_count(); s++) c.leaf[map_b[s]] = b.leaf[s];

    std::vector<SymbolId> sym_a(a.symbols.size()), sym_b(b.symbols.size());
    for (SymbolId i = 0; i < a.symbols.size(); i++) sym_a[i] = c.add_symbol(a.symbols[i]);
    for (SymbolId i = 0; i < b.symbols.size(); i++) sym_b[i] = c.add_symbol(b.symbols[i]);
    std::vector<ColorId> col_a(a.colors.size()), col_b(b.colors.size());
    for (ColorId i = 0; i < a.colors.size(); i++) col_a[i] = c.add_color("a." + a.colors[i]);
    for (ColorId i = 0; i < b.colors.size(); i++) col_b[i] = c.add_color("b." + b.colors[i]);

    auto remap_form = [](const LinearForm& form, const std::vector<StateId>& map) {
        LinearForm out;
        for (const auto& [s, coef] : form.terms()) out.add_term(map[s], coef);
        return out;
    };
    for (const auto& [key, tr] : a.transitions()) {
        auto [s, sym, col] = key;
        c.add_transition(map_a[s], sym_a[sym], col_a[col],
                         {remap_form(tr.left, map_a), remap_form(tr.right, map_a)});
    }
    for (const auto& [key, tr] : b.transitions()) {
        auto [s, sym, col] = key;
        c.add_transition(map_b[s], sym_b[sym], col_b[col],
                         {remap_form(tr.left, map_b), remap_form(tr.right, map_b)});
    }
    for (const auto& [key, tr] : a.transitions()) {
        auto [s, sym, col] = key;
        if (s != a.root) continue;
        c.add_transition(root_c, sym_a[sym], col_a[col],
                         {remap_form(tr.left, map_a), remap_form(tr.right, map_a)});
    }
    for (const auto& [key, tr] : b.transitions()) {
        auto [s, sym, col] = key;
        if (s != b.root) continue;
        c.add_transition(root_c, sym_b[sym], col_b[col],
                         {remap_form(tr.left, map_b), remap_form(tr.right, map_b)});
    }

    c.root = root_c;
    c.leaf[root_c] = a.leaf[a.root] || b.leaf[b.root];
    return c;
}

}  // namespace swta

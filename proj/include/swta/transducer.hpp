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
#include "swta/scalar.hpp"
#include "swta/tree.hpp"

namespace swta {

enum class Side : uint8_t { left = 0, right = 1 };

struct GroundTerm {
    StateId state;
    Side side;

    bool operator<(const GroundTerm& other) const {
        if (state != other.state) return state < other.state;
        return side < other.side;
    }
    bool operator==(const GroundTerm& other) const { return state == other.state && side == other.side; }
};

/// Finite partial map from ground terms q(L)/q(R) to scalars, with the same
/// absent-vs-zero discipline as LinearForm.
class TermForm {
  public:
    TermForm() = default;

    void add_term(GroundTerm term, const AlgebraicComplex& coef) {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                                   [](const auto& entry, const GroundTerm& t) { return entry.first < t; });
        if (it != terms_.end() && it->first == term) {
            it->second = it->second + coef;
        } else {
            terms_.insert(it, {term, coef});
        }
    }

    bool empty() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }
    const std::vector<std::pair<GroundTerm, AlgebraicComplex>>& terms() const { return terms_; }

    std::vector<StateId> support() const {
        std::vector<StateId> out;
        for (const auto& [t, c] : terms_)
            if (std::find(out.begin(), out.end(), t.state) == out.end()) out.push_back(t.state);
        return out;
    }

    bool operator==(const TermForm& other) const { return terms_ == other.terms_; }

  private:
    std::vector<std::pair<GroundTerm, AlgebraicComplex>> terms_;  // sorted by (state, side)
};

struct WttTransition {
    TermForm left;   // builds the left subtree of the output
    TermForm right;  // builds the right subtree of the output
};

/// Weighted tree transducer: deterministic top-down, outputs are linear
/// combinations of recursive images of the input's left/right subtrees.
class Wtt {
  public:
    unsigned modulus = 4;
    std::vector<std::string> states;
    std::vector<std::string> symbols;
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

    std::optional<SymbolId> find_symbol(const std::string& name) const {
        for (SymbolId i = 0; i < symbols.size(); i++)
            if (symbols[i] == name) return i;
        return std::nullopt;
    }

    void add_transition(StateId state, SymbolId symbol, WttTransition transition) {
        auto key = std::make_pair(state, symbol);
        if (delta_.count(key))
            throw Error(ErrorKind::InvalidModel, "duplicate transition from state " + states.at(state));
        delta_.emplace(key, std::move(transition));
    }

    const WttTransition* transition(StateId state, SymbolId symbol) const {
        auto it = delta_.find(std::make_pair(state, symbol));
        return it == delta_.end() ? nullptr : &it->second;
    }

    const std::map<std::pair<StateId, SymbolId>, WttTransition>& transitions() const { return delta_; }

    size_t state_count() const { return states.size(); }
    size_t transition_count() const { return delta_.size(); }

  private:
    std::map<std::pair<StateId, SymbolId>, WttTransition> delta_;
};

namespace detail {

inline std::optional<PerfectTree> apply_memo(const Wtt& t, StateId q, const PerfectTree& input, size_t level,
                                             size_t offset,
                                             std::map<std::tuple<StateId, size_t, size_t>, std::optional<PerfectTree>>& memo) {
    auto key = std::make_tuple(q, level, offset);
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;

    std::optional<PerfectTree> result;
    if (level == input.height()) {
        if (t.leaf[q]) result = PerfectTree::leaf(input.leaves()[offset]);
    } else {
        auto symbol = t.find_symbol(input.labels()[level]);
        const WttTransition* tr = symbol ? t.transition(q, *symbol) : nullptr;
        if (tr != nullptr) {
            auto sum_form = [&](const TermForm& form) -> std::optional<PerfectTree> {
                std::vector<std::pair<AlgebraicComplex, PerfectTree>> terms;
                for (const auto& [ground, coef] : form.terms()) {
                    size_t child = offset * 2 + (ground.side == Side::left ? 0 : 1);
                    auto sub = apply_memo(t, ground.state, input, level + 1, child, memo);
                    if (!sub.has_value()) return std::nullopt;
                    terms.emplace_back(coef, std::move(*sub));
                }
                if (terms.empty()) return std::nullopt;
                return combine(terms);
            };
            auto left = sum_form(tr->left);
            auto right = sum_form(tr->right);
            if (left.has_value() && right.has_value())
                result = PerfectTree::cons(input.labels()[level], *left, *right);
        }
    }
    memo.emplace(key, result);
    return result;
}

}  // namespace detail

/// T_q(t) per the top-down semantics; nullopt is bottom. Any missing
/// transition or undefined child makes the node undefined.
inline std::optional<PerfectTree> apply(const Wtt& t, StateId q, const PerfectTree& input) {
    std::map<std::tuple<StateId, size_t, size_t>, std::optional<PerfectTree>> memo;
    return detail::apply_memo(t, q, input, 0, 0, memo);
}

inline std::optional<PerfectTree> apply(const Wtt& t, const PerfectTree& input) {
    return apply(t, t.root, input);
}

namespace detail {

/// Product-state interner shared by the image and composition constructions.
/// Besides plain pairs it hands out "ghost" states: zero-weighted copies of an
/// inner state that keep the inner automaton's domain constraints alive when
/// the outer transducer ignores one of the input subtrees.
struct PairInterner {
    struct Entry {
        bool ghost;
        StateId first;   // inner state (or the ghosted state)
        StateId second;  // outer state (unused for ghosts)
    };

    std::map<std::pair<StateId, StateId>, StateId> ids;
    std::map<StateId, StateId> ghost_ids;
    std::vector<Entry> entries;
    std::vector<StateId> worklist;

    StateId intern(StateId first, StateId second) {
        auto key = std::make_pair(first, second);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        StateId id = static_cast<StateId>(entries.size());
        ids.emplace(key, id);
        entries.push_back({false, first, second});
        worklist.push_back(id);
        return id;
    }

    StateId intern_ghost(StateId inner) {
        auto it = ghost_ids.find(inner);
        if (it != ghost_ids.end()) return it->second;
        StateId id = static_cast<StateId>(entries.size());
        ghost_ids.emplace(inner, id);
        entries.push_back({true, inner, 0});
        worklist.push_back(id);
        return id;
    }
};

}  // namespace detail

/// Substitutes the inner transition's linear forms into a transducer form:
/// q(L) becomes the inner left form and q(R) the inner right form, each entry
/// paired with q. Duplicate product keys merge by coefficient sum and keys
/// with a zero merged coefficient are kept (support semantics).
inline LinearForm substitute_term_form(const TermForm& outer, const LinearForm& inner_left,
                                       const LinearForm& inner_right, detail::PairInterner& interner) {
    LinearForm result;
    for (const auto& [ground, coef] : outer.terms()) {
        const LinearForm& chosen = (ground.side == Side::left) ? inner_left : inner_right;
        for (const auto& [state, inner_coef] : chosen.terms())
            result.add_term(interner.intern(state, ground.state), coef * inner_coef);
    }
    return result;
}

/// Same substitution for transducer composition: the inner forms are ground
/// term forms, and the surviving direction comes from the inner term.
inline TermForm substitute_term_form(const TermForm& outer, const TermForm& inner_left,
                                     const TermForm& inner_right, detail::PairInterner& interner) {
    TermForm result;
    for (const auto& [ground, coef] : outer.terms()) {
        const TermForm& chosen = (ground.side == Side::left) ? inner_left : inner_right;
        for (const auto& [inner_ground, inner_coef] : chosen.terms())
            result.add_term({interner.intern(inner_ground.state, ground.state), inner_ground.side},
                            coef * inner_coef);
    }
    return result;
}

/// Image of an SWTA under a WTT: the product SWTA over pairs (SWTA state,
/// WTT state) with the ground-term substitution applied transition-wise.
/// When the transducer's transition consumes no (L) (resp. (R)) ground term,
/// zero-coefficient ghost copies of the source form's support are attached so
/// the image's domain stays inside the source's domain. Unreachable product
/// states are pruned unless `prune` is false.
inline Swta image(const Wtt& t, const Swta& a, bool prune = true) {
    if (t.modulus != a.modulus) throw Error(ErrorKind::InvalidModel, "image of mixed-modulus models");
    Swta out;
    out.modulus = a.modulus;
    out.colors = a.colors;

    std::vector<SymbolId> sym_map(a.symbols.size());
    for (SymbolId i = 0; i < a.symbols.size(); i++) sym_map[i] = out.add_symbol(a.symbols[i]);

    detail::PairInterner interner;
    StateId root = interner.intern(a.root, t.root);
    if (!prune) {
        for (StateId sa = 0; sa < a.state_count(); sa++)
            for (StateId st = 0; st < t.state_count(); st++) interner.intern(sa, st);
    }

    AlgebraicComplex zero = AlgebraicComplex::zero(a.modulus);
    std::vector<std::tuple<StateId, SymbolId, ColorId, SwtaTransition>> built;
    size_t head = 0;
    while (head < interner.worklist.size()) {
        StateId id = interner.worklist[head++];
        auto entry = interner.entries[id];
        if (entry.ghost) {
            // Ghosts replicate the source state's transitions over ghosts; the
            // coefficients are irrelevant because every path into a ghost
            // carries weight zero.
            for (SymbolId sym = 0; sym < a.symbols.size(); sym++) {
                for (ColorId col = 0; col < a.colors.size(); col++) {
                    const SwtaTransition* at = a.transition(entry.first, sym, col);
                    if (at == nullptr) continue;
                    SwtaTransition ghost_tr;
                    for (const auto& [s, c] : at->left.terms()) ghost_tr.left.add_term(interner.intern_ghost(s), c);
                    for (const auto& [s, c] : at->right.terms())
                        ghost_tr.right.add_term(interner.intern_ghost(s), c);
                    built.emplace_back(id, sym_map[sym], col, std::move(ghost_tr));
                }
            }
            continue;
        }
        StateId sa = entry.first, st = entry.second;
        for (SymbolId sym = 0; sym < a.symbols.size(); sym++) {
            auto t_sym = t.find_symbol(a.symbols[sym]);
            if (!t_sym.has_value()) continue;
            const WttTransition* wt = t.transition(st, *t_sym);
            if (wt == nullptr) continue;
            bool uses_left = false, uses_right = false;
            for (const TermForm* form : {&wt->left, &wt->right}) {
                for (const auto& [ground, coef] : form->terms()) {
                    if (ground.side == Side::left) uses_left = true;
                    if (ground.side == Side::right) uses_right = true;
                }
            }
            for (ColorId col = 0; col < a.colors.size(); col++) {
                const SwtaTransition* at = a.transition(sa, sym, col);
                if (at == nullptr) continue;
                // An empty source form means no word through this transition
                // is ever defined, so it contributes nothing to the image.
                if (at->left.empty() || at->right.empty()) continue;
                SwtaTransition product;
                product.left = substitute_term_form(wt->left, at->left, at->right, interner);
                product.right = substitute_term_form(wt->right, at->left, at->right, interner);
                if (!uses_left && !product.left.empty())
                    for (StateId s : at->left.support()) product.left.add_term(interner.intern_ghost(s), zero);
                if (!uses_right && !product.right.empty())
                    for (StateId s : at->right.support()) product.right.add_term(interner.intern_ghost(s), zero);
                built.emplace_back(id, sym_map[sym], col, std::move(product));
            }
        }
    }

    for (const auto& entry : interner.entries) {
        if (entry.ghost)
            out.add_state("~" + a.states[entry.first]);
        else
            out.add_state("<" + a.states[entry.first] + "," + t.states[entry.second] + ">");
    }
    for (StateId id = 0; id < interner.entries.size(); id++) {
        auto entry = interner.entries[id];
        out.leaf[id] = entry.ghost ? a.leaf[entry.first] : (a.leaf[entry.first] && t.leaf[entry.second]);
    }
    for (auto& [id, sym, col, tr] : built) out.add_transition(id, sym, col, std::move(tr));
    out.root = root;
    return out;
}

/// Composition second after first: apply(compose(t2, t1), t) = t2(t1(t)).
/// Uses the same ghost mechanism as image() so that an outer transducer that
/// ignores one of the inner outputs cannot widen the composed domain.
inline Wtt compose(const Wtt& second, const Wtt& first, bool prune = true) {
    if (second.modulus != first.modulus) throw Error(ErrorKind::InvalidModel, "compose of mixed-modulus models");
    Wtt out;
    out.modulus = first.modulus;

    std::vector<SymbolId> sym_map(first.symbols.size());
    for (SymbolId i = 0; i < first.symbols.size(); i++) sym_map[i] = out.add_symbol(first.symbols[i]);

    detail::PairInterner interner;
    StateId root = interner.intern(first.root, second.root);
    if (!prune) {
        for (StateId s1 = 0; s1 < first.state_count(); s1++)
            for (StateId s2 = 0; s2 < second.state_count(); s2++) interner.intern(s1, s2);
    }

    AlgebraicComplex zero = AlgebraicComplex::zero(first.modulus);
    std::vector<std::tuple<StateId, SymbolId, WttTransition>> built;
    size_t head = 0;
    while (head < interner.worklist.size()) {
        StateId id = interner.worklist[head++];
        auto entry = interner.entries[id];
        if (entry.ghost) {
            for (SymbolId sym = 0; sym < first.symbols.size(); sym++) {
                const WttTransition* t1 = first.transition(entry.first, sym);
                if (t1 == nullptr) continue;
                WttTransition ghost_tr;
                for (const auto& [g, c] : t1->left.terms())
                    ghost_tr.left.add_term({interner.intern_ghost(g.state), g.side}, c);
                for (const auto& [g, c] : t1->right.terms())
                    ghost_tr.right.add_term({interner.intern_ghost(g.state), g.side}, c);
                built.emplace_back(id, sym_map[sym], std::move(ghost_tr));
            }
            continue;
        }
        StateId s1 = entry.first, s2 = entry.second;
        for (SymbolId sym = 0; sym < first.symbols.size(); sym++) {
            const WttTransition* t1 = first.transition(s1, sym);
            auto sym2 = second.find_symbol(first.symbols[sym]);
            const WttTransition* t2 = sym2 ? second.transition(s2, *sym2) : nullptr;
            if (t1 == nullptr || t2 == nullptr) continue;
            // The inner transducer's output is undefined outright when one of
            // its output forms is empty; nothing to compose then.
            if (t1->left.empty() || t1->right.empty()) continue;
            bool uses_left = false, uses_right = false;
            for (const TermForm* form : {&t2->left, &t2->right}) {
                for (const auto& [ground, coef] : form->terms()) {
                    if (ground.side == Side::left) uses_left = true;
                    if (ground.side == Side::right) uses_right = true;
                }
            }
            WttTransition product;
            product.left = substitute_term_form(t2->left, t1->left, t1->right, interner);
            product.right = substitute_term_form(t2->right, t1->left, t1->right, interner);
            if (!uses_left && !product.left.empty())
                for (const auto& [g, c] : t1->left.terms())
                    product.left.add_term({interner.intern_ghost(g.state), g.side}, zero);
            if (!uses_right && !product.right.empty())
                for (const auto& [g, c] : t1->right.terms())
                    product.right.add_term({interner.intern_ghost(g.state), g.side}, zero);
            built.emplace_back(id, sym_map[sym], std::move(product));
        }
    }

    for (const auto& entry : interner.entries) {
        if (entry.ghost)
            out.add_state("~" + first.states[entry.first]);
        else
            out.add_state("<" + first.states[entry.first] + "," + second.states[entry.second] + ">");
    }
    for (StateId id = 0; id < interner.entries.size(); id++) {
        auto entry = interner.entries[id];
        out.leaf[id] = entry.ghost ? first.leaf[entry.first]
                                   : (first.leaf[entry.first] && second.leaf[entry.second]);
    }
    for (auto& [id, sym, tr] : built) out.add_transition(id, sym, std::move(tr));
    out.root = root;
    return out;
}

/// Transducer addition: (Ta + Tb)(t) = Ta(t) + Tb(t). Both roots must fire on
/// the same symbols; a fresh root merges the two root transitions by summing
/// their forms. Roots may not be referenced by other transitions.
inline Wtt add(const Wtt& ta, const Wtt& tb) {
    if (ta.modulus != tb.modulus) throw Error(ErrorKind::InvalidModel, "add of mixed-modulus models");
    for (const Wtt* t : {&ta, &tb}) {
        for (const auto& [key, tr] : t->transitions()) {
            for (const auto& [ground, coef] : tr.left.terms())
                if (ground.state == t->root)
                    throw Error(ErrorKind::AddRootMismatch, "root state re-entered by a transition");
            for (const auto& [ground, coef] : tr.right.terms())
                if (ground.state == t->root)
                    throw Error(ErrorKind::AddRootMismatch, "root state re-entered by a transition");
        }
        if (t->leaf[t->root])
            throw Error(ErrorKind::AddRootMismatch, "root may not be a leaf state in transducer addition");
    }

    Wtt out;
    out.modulus = ta.modulus;
    StateId root = out.add_state("+");

    std::vector<StateId> map_a(ta.state_count()), map_b(tb.state_count());
    for (StateId s = 0; s < ta.state_count(); s++)
        map_a[s] = (s == ta.root) ? root : out.add_state("a." + ta.states[s]);
    for (StateId s = 0; s < tb.state_count(); s++)
        map_b[s] = (s == tb.root) ? root : out.add_state("b." + tb.states[s]);
    for (StateId s = 0; s < ta.state_count(); s++)
        if (s != ta.root) out.leaf[map_a[s]] = ta.leaf[s];
    for (StateId s = 0; s < tb.state_count(); s++)
        if (s != tb.root) out.leaf[map_b[s]] = tb.leaf[s];

    std::set<std::string> root_symbols;
    for (const auto& [key, tr] : ta.transitions())
        if (key.first == ta.root) root_symbols.insert(ta.symbols[key.second]);
    for (const auto& [key, tr] : tb.transitions())
        if (key.first == tb.root) root_symbols.insert(tb.symbols[key.second]);

    auto remap_form = [](const TermForm& form, const std::vector<StateId>& map) {
        TermForm outf;
        for (const auto& [ground, coef] : form.terms()) outf.add_term({map[ground.state], ground.side}, coef);
        return outf;
    };

    for (const auto& [key, tr] : ta.transitions()) {
        if (key.first == ta.root) continue;
        out.add_transition(map_a[key.first], out.add_symbol(ta.symbols[key.second]),
                           {remap_form(tr.left, map_a), remap_form(tr.right, map_a)});
    }
    for (const auto& [key, tr] : tb.transitions()) {
        if (key.first == tb.root) continue;
        out.add_transition(map_b[key.first], out.add_symbol(tb.symbols[key.second]),
                           {remap_form(tr.left, map_b), remap_form(tr.right, map_b)});
    }

    for (const std::string& symbol : root_symbols) {
        auto sym_a = ta.find_symbol(symbol);
        auto sym_b = tb.find_symbol(symbol);
        const WttTransition* tra = sym_a ? ta.transition(ta.root, *sym_a) : nullptr;
        const WttTransition* trb = sym_b ? tb.transition(tb.root, *sym_b) : nullptr;
        if (tra == nullptr || trb == nullptr)
            throw Error(ErrorKind::AddRootMismatch,
                        "both roots must fire on symbol '" + symbol + "' for transducer addition");
        WttTransition merged;
        merged.left = remap_form(tra->left, map_a);
        merged.right = remap_form(tra->right, map_a);
        TermForm b_left = remap_form(trb->left, map_b);
        TermForm b_right = remap_form(trb->right, map_b);
        for (const auto& [ground, coef] : b_left.terms()) merged.left.add_term(ground, coef);
        for (const auto& [ground, coef] : b_right.terms()) merged.right.add_term(ground, coef);
        out.add_transition(root, out.add_symbol(symbol), std::move(merged));
    }

    out.root = root;
    return out;
}

}  // namespace swta

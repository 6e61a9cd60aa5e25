#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "swta/errors.hpp"
#include "swta/scalar.hpp"
#include "swta/transducer.hpp"

namespace swta {

/// A validated staircase box: a leveled transducer with the distinguished id
/// state (sole leaf state, looping on every plain and primed symbol) and a
/// total depth function on the remaining states.
struct BoxTransducer {
    Wtt wtt;
    StateId id_state = 0;
    std::vector<int> depth;               // -1 for id and unreachable states
    unsigned depth_span = 0;              // depth at which id first appears
    std::vector<SymbolId> plain_symbols;  // Gamma, file order
    std::vector<SymbolId> primed_of;      // plain symbol -> its primed partner
};

inline std::string primed_name(const std::string& symbol) { return symbol + "'"; }

inline bool is_primed_name(const std::string& symbol) {
    return !symbol.empty() && symbol.back() == '\'';
}

/// Checks the three structural requirements for the size-parameterized
/// construction and computes the depth annotation.
inline BoxTransducer validate_box(const Wtt& input) {
    BoxTransducer box;
    box.wtt = input;
    const Wtt& t = box.wtt;

    // Requirement 1: a single leaf state, the id.
    std::vector<StateId> leaves;
    for (StateId s = 0; s < t.state_count(); s++)
        if (t.leaf[s]) leaves.push_back(s);
    if (leaves.size() != 1)
        throw Error(ErrorKind::MissingId, "a box needs exactly one leaf state (the id), found " +
                                              std::to_string(leaves.size()));
    box.id_state = leaves[0];
    if (t.root == box.id_state)
        throw Error(ErrorKind::MissingId, "the box root must be a proper state, not the id wire");

    // Split the alphabet into plain symbols and their primed partners.
    box.primed_of.assign(t.symbols.size(), 0);
    for (SymbolId s = 0; s < t.symbols.size(); s++) {
        if (is_primed_name(t.symbols[s])) continue;
        box.plain_symbols.push_back(s);
        auto primed = t.find_symbol(primed_name(t.symbols[s]));
        if (!primed.has_value())
            throw Error(ErrorKind::MissingIdLoop,
                        "missing primed symbol " + primed_name(t.symbols[s]) + " for the id loop");
        box.primed_of[s] = *primed;
    }
    if (box.plain_symbols.empty()) throw Error(ErrorKind::MissingId, "box alphabet has no plain symbols");

    // Requirement 2: id self-loops on every plain and primed symbol.
    auto check_id_loop = [&](SymbolId sym) {
        const WttTransition* tr = t.transition(box.id_state, sym);
        bool ok = tr != nullptr && tr->left.size() == 1 && tr->right.size() == 1 &&
                  tr->left.terms()[0].first == GroundTerm{box.id_state, Side::left} &&
                  tr->right.terms()[0].first == GroundTerm{box.id_state, Side::right} &&
                  tr->left.terms()[0].second.is_one() && tr->right.terms()[0].second.is_one();
        if (!ok)
            throw Error(ErrorKind::MissingIdLoop, "id state lacks the identity loop on symbol " + t.symbols[sym]);
    };
    for (SymbolId plain : box.plain_symbols) {
        check_id_loop(plain);
        check_id_loop(box.primed_of[plain]);
    }

    // Requirement 3: every non-id state occurs at exactly one depth, and id
    // first appears at the same depth on all branches.
    box.depth.assign(t.state_count(), -1);
    box.depth[t.root] = 0;
    std::vector<StateId> queue = {t.root};
    std::set<int> id_depths;
    for (size_t head = 0; head < queue.size(); head++) {
        StateId s = queue[head];
        for (SymbolId plain : box.plain_symbols) {
            const WttTransition* tr = t.transition(s, plain);
            if (tr == nullptr) continue;
            for (const TermForm* form : {&tr->left, &tr->right}) {
                for (const auto& [ground, coef] : form->terms()) {
                    if (ground.state == box.id_state) {
                        id_depths.insert(box.depth[s] + 1);
                        continue;
                    }
                    if (box.depth[ground.state] == -1) {
                        box.depth[ground.state] = box.depth[s] + 1;
                        queue.push_back(ground.state);
                    } else if (box.depth[ground.state] != box.depth[s] + 1) {
                        throw Error(ErrorKind::DepthConflict,
                                    "state " + t.states[ground.state] + " occurs at depths " +
                                        std::to_string(box.depth[ground.state]) + " and " +
                                        std::to_string(box.depth[s] + 1));
                    }
                }
            }
        }
    }
    if (id_depths.empty())
        throw Error(ErrorKind::MissingId, "no transition ever reaches the id state");
    if (id_depths.size() > 1)
        throw Error(ErrorKind::DepthConflict, "the id state first appears at multiple depths");
    box.depth_span = static_cast<unsigned>(*id_depths.begin());
    return box;
}

/// Turns a gate-built transducer into a staircase box: merges all leaf states
/// into a single id state, collapses the per-level alphabet x1..xk onto the
/// subscript-free `symbol`, and adds the plain/primed identity loops. Leaf
/// states must be transition-free, and each state may fire on one level only
/// (which leveled gate transducers satisfy).
inline Wtt as_box(const Wtt& input, const std::string& symbol = "x") {
    std::vector<StateId> leaves;
    for (StateId s = 0; s < input.state_count(); s++)
        if (input.leaf[s]) leaves.push_back(s);
    if (leaves.empty()) throw Error(ErrorKind::MissingId, "transducer has no leaf state to turn into id");
    for (StateId s : leaves)
        for (const auto& [key, tr] : input.transitions())
            if (key.first == s)
                throw Error(ErrorKind::MissingId,
                            "leaf state " + input.states[s] + " has transitions; cannot merge into id");

    Wtt out;
    out.modulus = input.modulus;
    std::vector<StateId> map(input.state_count());
    StateId id = 0;
    bool id_added = false;
    for (StateId s = 0; s < input.state_count(); s++) {
        if (input.leaf[s]) {
            if (!id_added) {
                id = out.add_state("id");
                out.leaf[id] = true;
                id_added = true;
            }
            map[s] = id;
        } else {
            map[s] = out.add_state(input.states[s]);
        }
    }
    SymbolId plain = out.add_symbol(symbol);
    SymbolId primed = out.add_symbol(primed_name(symbol));
    for (const auto& [key, tr] : input.transitions()) {
        WttTransition mapped;
        for (const auto& [g, c] : tr.left.terms()) mapped.left.add_term({map[g.state], g.side}, c);
        for (const auto& [g, c] : tr.right.terms()) mapped.right.add_term({map[g.state], g.side}, c);
        out.add_transition(map[key.first], plain, std::move(mapped));
    }
    for (SymbolId sym : {plain, primed}) {
        WttTransition loop;
        loop.left.add_term({id, Side::left}, AlgebraicComplex::one(out.modulus));
        loop.right.add_term({id, Side::right}, AlgebraicComplex::one(out.modulus));
        out.add_transition(id, sym, std::move(loop));
    }
    out.root = map[input.root];
    return out;
}

enum class Dir { left, right };

namespace detail {

/// Key of a constructed parameterized state: the id-free tuple of box states
/// plus the begin/end tag.
struct ParamState {
    std::vector<StateId> tuple;
    bool ending;

    bool operator<(const ParamState& other) const {
        if (ending != other.ending) return ending < other.ending;
        return tuple < other.tuple;
    }
};

using TupleForm = std::vector<std::pair<std::pair<std::vector<StateId>, Side>, AlgebraicComplex>>;

inline void tuple_form_add(TupleForm& form, std::pair<std::vector<StateId>, Side> key,
                           const AlgebraicComplex& coef) {
    for (auto& [k, c] : form) {
        if (k == key) {
            c = c + coef;
            return;
        }
    }
    form.emplace_back(std::move(key), coef);
}

}  // namespace detail

/// Algorithm: worklist construction of the size-parameterized transducer from
/// a validated box. Boxes repeat every `offset` levels; `dir` picks whether a
/// new box is applied before (left) or after (right) the running ones. Primed
/// symbols mark the levels after the last box spawn.
inline Wtt parameterize(const BoxTransducer& box, unsigned offset, Dir dir, unsigned tuple_cap = 0) {
    if (offset < 1) throw Error(ErrorKind::InvalidGate, "box offset must be at least 1");
    if (tuple_cap == 0) tuple_cap = box.depth_span / offset + 2;
    const Wtt& b = box.wtt;

    Wtt out;
    out.modulus = b.modulus;
    for (SymbolId plain : box.plain_symbols) out.add_symbol(b.symbols[plain]);
    for (SymbolId plain : box.plain_symbols) out.add_symbol(b.symbols[box.primed_of[plain]]);

    auto tuple_name = [&](const detail::ParamState& ps) {
        std::string name = "<";
        for (size_t i = 0; i < ps.tuple.size(); i++) {
            if (i) name += ",";
            name += b.states[ps.tuple[i]];
        }
        name += ">";
        name += ps.ending ? "e" : "b";
        return name;
    };

    std::map<detail::ParamState, StateId> ids;
    std::vector<std::pair<detail::ParamState, unsigned>> worklist;  // with offsets
    auto discover = [&](const detail::ParamState& ps, unsigned pos) {
        auto it = ids.find(ps);
        if (it != ids.end()) return it->second;
        if (ps.tuple.size() > tuple_cap)
            throw Error(ErrorKind::DepthConflict,
                        "tuple length exceeded the cap of " + std::to_string(tuple_cap) +
                            " (offset too small for the box depth span?)");
        StateId id = out.add_state(tuple_name(ps));
        out.leaf[id] = ps.tuple.empty();  // all components in E = {id} after deletion
        ids.emplace(ps, id);
        worklist.emplace_back(ps, pos);
        return id;
    };

    detail::ParamState root_state{{b.root}, false};
    out.root = discover(root_state, offset);

    // Composes the tuple's component transitions on symbol w, innermost first.
    auto compose_tuple = [&](const std::vector<StateId>& tuple,
                             SymbolId w) -> std::optional<std::pair<detail::TupleForm, detail::TupleForm>> {
        detail::TupleForm left = {{{{}, Side::left}, AlgebraicComplex::one(b.modulus)}};
        detail::TupleForm right = {{{{}, Side::right}, AlgebraicComplex::one(b.modulus)}};
        for (StateId component : tuple) {
            const WttTransition* tr = b.transition(component, w);
            if (tr == nullptr) return std::nullopt;
            auto substitute = [&](const TermForm& outer) {
                detail::TupleForm result;
                for (const auto& [ground, coef] : outer.terms()) {
                    const detail::TupleForm& chosen = (ground.side == Side::left) ? left : right;
                    for (const auto& [key, inner_coef] : chosen) {
                        auto extended = key;
                        extended.first.push_back(ground.state);
                        detail::tuple_form_add(result, std::move(extended), coef * inner_coef);
                    }
                }
                return result;
            };
            detail::TupleForm new_left = substitute(tr->left);
            detail::TupleForm new_right = substitute(tr->right);
            left = std::move(new_left);
            right = std::move(new_right);
        }
        return std::make_pair(std::move(left), std::move(right));
    };

    // Prepends or appends the fresh box root to every tuple in the form, per
    // the growth direction.
    auto spawn = [&](const detail::TupleForm& form) {
        detail::TupleForm result;
        for (const auto& [key, coef] : form) {
            auto extended = key;
            if (dir == Dir::right)
                extended.first.push_back(b.root);
            else
                extended.first.insert(extended.first.begin(), b.root);
            detail::tuple_form_add(result, std::move(extended), coef);
        }
        return result;
    };

    auto strip_ids = [&](const std::vector<StateId>& tuple) {
        std::vector<StateId> out_tuple;
        for (StateId s : tuple)
            if (s != box.id_state) out_tuple.push_back(s);
        return out_tuple;
    };

    auto emit = [&](StateId from, SymbolId symbol, const detail::TupleForm& left, const detail::TupleForm& right,
                    bool ending, unsigned pos) {
        WttTransition tr;
        for (const auto& [key, coef] : left) {
            StateId target = discover({strip_ids(key.first), ending}, pos);
            tr.left.add_term({target, key.second}, coef);
        }
        for (const auto& [key, coef] : right) {
            StateId target = discover({strip_ids(key.first), ending}, pos);
            tr.right.add_term({target, key.second}, coef);
        }
        out.add_transition(from, symbol, std::move(tr));
    };

    for (size_t head = 0; head < worklist.size(); head++) {
        auto [ps, pos] = worklist[head];
        StateId from = ids.at(ps);
        for (size_t wi = 0; wi < box.plain_symbols.size(); wi++) {
            SymbolId plain = box.plain_symbols[wi];
            SymbolId out_plain = static_cast<SymbolId>(wi);
            SymbolId out_primed = static_cast<SymbolId>(box.plain_symbols.size() + wi);

            auto composed = compose_tuple(ps.tuple, plain);
            if (!composed.has_value()) continue;
            auto& [left, right] = *composed;

            if (pos != 1 || ps.ending) {
                if (!ps.ending)
                    emit(from, out_plain, left, right, false, pos - 1);
                else
                    emit(from, out_primed, left, right, true, pos - 1);
            } else {
                // Box boundary: either stop spawning (primed symbol) or start
                // the next box and reset the offset countdown.
                emit(from, out_primed, left, right, true, pos - 1);
                emit(from, out_plain, spawn(left), spawn(right), false, offset);
            }
        }
    }

    return out;
}

inline Wtt parameterize(const Wtt& box_input, unsigned offset, Dir dir, unsigned tuple_cap = 0) {
    return parameterize(validate_box(box_input), offset, dir, tuple_cap);
}

}  // namespace swta

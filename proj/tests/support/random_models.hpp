#pragma once

// Deterministic random model generators for the property suites.

#include <random>
#include <vector>

#include "swta/automaton.hpp"
#include "swta/transducer.hpp"
#include "swta/tree.hpp"

namespace fixtures {

inline swta::AlgebraicComplex random_coef(std::mt19937& rng) {
    std::uniform_int_distribution<int> coef(-2, 2);
    std::uniform_int_distribution<int> shape(0, 5);
    int kind = shape(rng);
    if (kind == 0) return swta::AlgebraicComplex::zero();
    if (kind == 1) return swta::AlgebraicComplex({swta::Int(coef(rng)), 0, 0, 0}, 1);
    if (kind == 2) return swta::AlgebraicComplex({0, swta::Int(coef(rng)), 0, 0}, 0);
    return swta::AlgebraicComplex::integer(coef(rng));
}

/// Small random SWTA over one symbol and up to two colors. Transition density
/// and leaf choices vary; the result is arbitrary enough to exercise partial
/// definedness, zero supports and multi-state linear forms.
inline swta::Swta random_swta(std::mt19937& rng, unsigned max_states = 4) {
    std::uniform_int_distribution<unsigned> nstates(1, max_states);
    std::uniform_int_distribution<unsigned> ncolors(1, 2);
    std::uniform_int_distribution<int> pct(0, 99);

    swta::Swta a;
    unsigned n = nstates(rng);
    for (unsigned i = 0; i < n; i++) a.add_state("q" + std::to_string(i));
    a.add_symbol("a");
    unsigned colors = ncolors(rng);
    for (unsigned c = 0; c < colors; c++) a.add_color(std::to_string(c + 1));
    a.root = 0;
    bool any_leaf = false;
    for (unsigned i = 0; i < n; i++) {
        if (pct(rng) < 40) {
            a.leaf[i] = true;
            any_leaf = true;
        }
    }
    if (!any_leaf) a.leaf[n - 1] = true;

    std::uniform_int_distribution<unsigned> pick(0, n - 1);
    for (unsigned s = 0; s < n; s++) {
        for (unsigned c = 0; c < colors; c++) {
            if (pct(rng) < 30) continue;  // leave some transitions undefined
            swta::SwtaTransition tr;
            unsigned lsize = 1 + pick(rng) % 2, rsize = 1 + pick(rng) % 2;
            for (unsigned i = 0; i < lsize; i++) tr.left.add_term(pick(rng), random_coef(rng));
            for (unsigned i = 0; i < rsize; i++) tr.right.add_term(pick(rng), random_coef(rng));
            a.add_transition(s, 0, c, std::move(tr));
        }
    }
    return a;
}

/// Small random WTT over one symbol; mirrors random_swta's shape choices.
inline swta::Wtt random_wtt(std::mt19937& rng, unsigned max_states = 3) {
    std::uniform_int_distribution<unsigned> nstates(1, max_states);
    std::uniform_int_distribution<int> pct(0, 99);

    swta::Wtt t;
    unsigned n = nstates(rng);
    for (unsigned i = 0; i < n; i++) t.add_state("p" + std::to_string(i));
    t.add_symbol("a");
    t.root = 0;
    bool any_leaf = false;
    for (unsigned i = 0; i < n; i++) {
        if (pct(rng) < 50) {
            t.leaf[i] = true;
            any_leaf = true;
        }
    }
    if (!any_leaf) t.leaf[n - 1] = true;

    std::uniform_int_distribution<unsigned> pick(0, n - 1);
    std::uniform_int_distribution<int> side(0, 1);
    for (unsigned s = 0; s < n; s++) {
        if (pct(rng) < 25) continue;
        swta::WttTransition tr;
        unsigned lsize = 1 + pick(rng) % 2, rsize = 1 + pick(rng) % 2;
        for (unsigned i = 0; i < lsize; i++)
            tr.left.add_term({pick(rng), side(rng) ? swta::Side::left : swta::Side::right}, random_coef(rng));
        for (unsigned i = 0; i < rsize; i++)
            tr.right.add_term({pick(rng), side(rng) ? swta::Side::left : swta::Side::right}, random_coef(rng));
        t.add_transition(s, 0, std::move(tr));
    }
    return t;
}

inline swta::PerfectTree random_tree(std::mt19937& rng, size_t height, const std::string& label = "a",
                                     unsigned modulus = 4) {
    std::uniform_int_distribution<int> coef(-3, 3);
    std::vector<swta::AlgebraicComplex> leaves;
    for (size_t i = 0; i < (size_t(1) << height); i++) {
        if (modulus == 4) {
            leaves.push_back(random_coef(rng));
        } else {
            leaves.push_back(swta::AlgebraicComplex::integer(coef(rng), modulus));
        }
    }
    return swta::PerfectTree(std::vector<std::string>(height, label), std::move(leaves));
}

/// Every word over the automaton's symbol-color pairs with length <= bound,
/// in lexicographic order.
inline std::vector<swta::Word> words_up_to(const swta::Swta& a, size_t bound) {
    std::vector<swta::Word> out = {{}};
    size_t level_start = 0;
    for (size_t len = 1; len <= bound; len++) {
        size_t level_end = out.size();
        for (size_t i = level_start; i < level_end; i++) {
            for (swta::SymbolId s = 0; s < a.symbols.size(); s++)
                for (swta::ColorId c = 0; c < a.colors.size(); c++) {
                    swta::Word w = out[i];
                    w.push_back({s, c});
                    out.push_back(std::move(w));
                }
        }
        level_start = level_end;
    }
    return out;
}

}  // namespace fixtures

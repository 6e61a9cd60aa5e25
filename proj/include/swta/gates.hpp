#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "swta/errors.hpp"
#include "swta/scalar.hpp"
#include "swta/transducer.hpp"

namespace swta {

/// 2x2 unitary with exact entries, row major: ((a b) (c d)).
struct Unitary2 {
    AlgebraicComplex a, b, c, d;

    unsigned modulus() const { return a.modulus(); }

    /// Exact unitarity: U * conj(U)^T = I.
    bool is_unitary() const {
        AlgebraicComplex one = AlgebraicComplex::one(modulus());
        AlgebraicComplex zero = AlgebraicComplex::zero(modulus());
        return a * a.conjugate() + b * b.conjugate() == one &&
               c * c.conjugate() + d * d.conjugate() == one &&
               a * c.conjugate() + b * d.conjugate() == zero;
    }
};

namespace gate {

inline Unitary2 id(unsigned m = 4) {
    return {AlgebraicComplex::one(m), AlgebraicComplex::zero(m), AlgebraicComplex::zero(m),
            AlgebraicComplex::one(m)};
}

inline Unitary2 x(unsigned m = 4) {
    return {AlgebraicComplex::zero(m), AlgebraicComplex::one(m), AlgebraicComplex::one(m),
            AlgebraicComplex::zero(m)};
}

inline Unitary2 y(unsigned m = 4) {
    // ((0, -i), (i, 0)); i = w^{m/2}
    AlgebraicComplex i = AlgebraicComplex::omega(m, m / 2);
    return {AlgebraicComplex::zero(m), -i, i, AlgebraicComplex::zero(m)};
}

inline Unitary2 z(unsigned m = 4) {
    return {AlgebraicComplex::one(m), AlgebraicComplex::zero(m), AlgebraicComplex::zero(m),
            -AlgebraicComplex::one(m)};
}

inline Unitary2 h(unsigned m = 4) {
    AlgebraicComplex s = AlgebraicComplex::one_over_sqrt2_pow(1, m);
    return {s, s, s, -s};
}

inline Unitary2 s(unsigned m = 4) {
    return {AlgebraicComplex::one(m), AlgebraicComplex::zero(m), AlgebraicComplex::zero(m),
            AlgebraicComplex::omega(m, m / 2)};
}

inline Unitary2 sdg(unsigned m = 4) {
    return {AlgebraicComplex::one(m), AlgebraicComplex::zero(m), AlgebraicComplex::zero(m),
            AlgebraicComplex::omega(m, m / 2).conjugate()};
}

inline Unitary2 t(unsigned m = 4) {
    if (m < 4) throw Error(ErrorKind::UnsupportedModulus, "T gate needs modulus >= 4");
    return {AlgebraicComplex::one(m), AlgebraicComplex::zero(m), AlgebraicComplex::zero(m),
            AlgebraicComplex::omega(m, m / 4)};
}

inline Unitary2 tdg(unsigned m = 4) {
    if (m < 4) throw Error(ErrorKind::UnsupportedModulus, "Tdg gate needs modulus >= 4");
    return {AlgebraicComplex::one(m), AlgebraicComplex::zero(m), AlgebraicComplex::zero(m),
            AlgebraicComplex::omega(m, m / 4).conjugate()};
}

/// sqrt(X) = ((1+i, 1-i), (1-i, 1+i)) / 2.
inline Unitary2 sx(unsigned m = 4) {
    if (m < 4) throw Error(ErrorKind::UnsupportedModulus, "sqrt(X) needs modulus >= 4");
    AlgebraicComplex i = AlgebraicComplex::omega(m, m / 2);
    AlgebraicComplex half = AlgebraicComplex::one_over_sqrt2_pow(2, m);
    return {(AlgebraicComplex::one(m) + i) * half, (AlgebraicComplex::one(m) - i) * half,
            (AlgebraicComplex::one(m) - i) * half, (AlgebraicComplex::one(m) + i) * half};
}

/// diag(conj(phase), phase): the z-rotation with e^{i*delta} = phase.
inline Unitary2 rz(const AlgebraicComplex& phase) {
    unsigned m = phase.modulus();
    return {phase.conjugate(), AlgebraicComplex::zero(m), AlgebraicComplex::zero(m), phase};
}

inline Unitary2 by_name(const std::string& name, unsigned m = 4) {
    if (name == "I") return id(m);
    if (name == "X") return x(m);
    if (name == "Y") return y(m);
    if (name == "Z") return z(m);
    if (name == "H") return h(m);
    if (name == "S") return s(m);
    if (name == "SDG") return sdg(m);
    if (name == "T") return t(m);
    if (name == "TDG") return tdg(m);
    if (name == "SX") return sx(m);
    throw Error(ErrorKind::InvalidGate, "unknown gate name '" + name + "'");
}

}  // namespace gate

namespace detail {

/// Appends `coef * state(side)` unless the coefficient is zero. Gate
/// constructors keep supports tight, matching the published transducer
/// figures; zero_side() is the one place where zero coefficients are
/// introduced deliberately.
inline void add_nonzero(TermForm& form, StateId state, Side side, const AlgebraicComplex& coef) {
    if (coef.is_zero()) return;
    form.add_term({state, side}, coef);
}

}  // namespace detail

inline std::vector<std::string> qubit_symbols(unsigned count) {
    std::vector<std::string> symbols;
    for (unsigned i = 1; i <= count; i++) symbols.push_back("x" + std::to_string(i));
    return symbols;
}

/// The wire transducer: one state, both root and leaf, passing every symbol
/// through unchanged.
inline Wtt identity_wtt(const std::vector<std::string>& symbols, unsigned modulus = 4) {
    if (symbols.empty()) throw Error(ErrorKind::InvalidGate, "identity transducer needs an alphabet");
    Wtt t;
    t.modulus = modulus;
    StateId id = t.add_state("id");
    t.leaf[id] = true;
    t.root = id;
    for (const std::string& name : symbols) {
        WttTransition tr;
        tr.left.add_term({id, Side::left}, AlgebraicComplex::one(modulus));
        tr.right.add_term({id, Side::right}, AlgebraicComplex::one(modulus));
        t.add_transition(id, t.add_symbol(name), std::move(tr));
    }
    return t;
}

/// U on qubit i of m: counting states q0..qm with the gate applied at level i.
inline Wtt single_qubit_wtt(const Unitary2& u, unsigned target, unsigned qubits) {
    if (target < 1 || target > qubits)
        throw Error(ErrorKind::InvalidGate,
                    "qubit index " + std::to_string(target) + " out of range 1.." + std::to_string(qubits));
    unsigned m = u.modulus();
    Wtt t;
    t.modulus = m;
    std::vector<StateId> q(qubits + 1);
    for (unsigned j = 0; j <= qubits; j++) q[j] = t.add_state("q" + std::to_string(j));
    t.leaf[q[qubits]] = true;
    t.root = q[0];
    for (unsigned j = 0; j < qubits; j++) {
        SymbolId sym = t.add_symbol("x" + std::to_string(j + 1));
        WttTransition tr;
        if (j == target - 1) {
            detail::add_nonzero(tr.left, q[j + 1], Side::left, u.a);
            detail::add_nonzero(tr.left, q[j + 1], Side::right, u.b);
            detail::add_nonzero(tr.right, q[j + 1], Side::left, u.c);
            detail::add_nonzero(tr.right, q[j + 1], Side::right, u.d);
        } else {
            tr.left.add_term({q[j + 1], Side::left}, AlgebraicComplex::one(m));
            tr.right.add_term({q[j + 1], Side::right}, AlgebraicComplex::one(m));
        }
        t.add_transition(q[j], sym, std::move(tr));
    }
    return t;
}

/// The m-qubit wire transducer over x1..xm (identity with counting states).
inline Wtt wire_wtt(unsigned qubits, unsigned modulus = 4) {
    return single_qubit_wtt(gate::id(modulus), 1, qubits);
}

namespace detail {

/// Per-state depths of a leveled transducer; gates and boxes are DAGs whose
/// states sit at one depth each.
inline std::vector<int> state_depths(const Wtt& t) {
    std::vector<int> depth(t.state_count(), -1);
    depth[t.root] = 0;
    std::vector<StateId> queue = {t.root};
    for (size_t head = 0; head < queue.size(); head++) {
        StateId s = queue[head];
        for (const auto& [key, tr] : t.transitions()) {
            if (key.first != s) continue;
            for (const TermForm* form : {&tr.left, &tr.right}) {
                for (const auto& [ground, coef] : form->terms()) {
                    if (ground.state == s) continue;  // self loops carry no level
                    if (depth[ground.state] == -1) {
                        depth[ground.state] = depth[s] + 1;
                        queue.push_back(ground.state);
                    } else if (depth[ground.state] != depth[s] + 1) {
                        throw Error(ErrorKind::DepthConflict,
                                    "state " + t.states[ground.state] + " occurs at depths " +
                                        std::to_string(depth[ground.state]) + " and " +
                                        std::to_string(depth[s] + 1));
                    }
                }
            }
        }
    }
    return depth;
}

}  // namespace detail

/// Replaces the chosen child forms of every level-j transition by their
/// zero-coefficient versions; supports are preserved, so the domain of any
/// image computed through the result is unchanged.
inline Wtt zero_side(const Wtt& input, unsigned level, Side side) {
    std::vector<int> depth = detail::state_depths(input);
    Wtt out;
    out.modulus = input.modulus;
    out.states = input.states;
    out.leaf = input.leaf;
    out.symbols = input.symbols;
    out.root = input.root;
    bool touched = false;
    for (const auto& [key, tr] : input.transitions()) {
        WttTransition copy = tr;
        if (depth[key.first] == static_cast<int>(level) - 1) {
            touched = true;
            TermForm& target = (side == Side::left) ? copy.left : copy.right;
            TermForm zeroed;
            for (const auto& [ground, coef] : target.terms())
                zeroed.add_term(ground, AlgebraicComplex::zero(input.modulus));
            target = std::move(zeroed);
        }
        out.add_transition(key.first, key.second, std::move(copy));
    }
    if (!touched)
        throw Error(ErrorKind::InvalidGate, "no transition at level " + std::to_string(level) + " to zero");
    return out;
}

/// Controlled-U with arbitrary distinct control/target indices: nested
/// zeroL_c(T) + zeroR_c(I) applications, innermost control first.
inline Wtt controlled_wtt(const Unitary2& u, unsigned target, std::vector<unsigned> controls, unsigned qubits) {
    std::set<unsigned> seen = {target};
    for (unsigned c : controls) {
        if (c < 1 || c > qubits) throw Error(ErrorKind::InvalidGate, "control index out of range");
        if (!seen.insert(c).second) throw Error(ErrorKind::InvalidGate, "overlapping control/target indices");
    }
    Wtt t = single_qubit_wtt(u, target, qubits);
    std::sort(controls.begin(), controls.end(), std::greater<unsigned>());
    for (unsigned c : controls)
        t = add(zero_side(t, c, Side::left), zero_side(wire_wtt(qubits, u.modulus()), c, Side::right));
    return t;
}

/// U on every qubit for any input height: one state, both root and leaf.
inline Wtt broadcast_wtt(const Unitary2& u, const std::vector<std::string>& symbols) {
    if (symbols.empty()) throw Error(ErrorKind::InvalidGate, "broadcast transducer needs an alphabet");
    unsigned m = u.modulus();
    Wtt t;
    t.modulus = m;
    StateId s = t.add_state("s");
    t.leaf[s] = true;
    t.root = s;
    for (const std::string& name : symbols) {
        WttTransition tr;
        detail::add_nonzero(tr.left, s, Side::left, u.a);
        detail::add_nonzero(tr.left, s, Side::right, u.b);
        detail::add_nonzero(tr.right, s, Side::left, u.c);
        detail::add_nonzero(tr.right, s, Side::right, u.d);
        t.add_transition(s, t.add_symbol(name), std::move(tr));
    }
    return t;
}

/// The rotation phase gamma_k = e^{2*pi*i / 2^k} used by the Fourier boxes,
/// expressed in the workspace lattice. Needs modulus >= 2^{k-1}.
inline AlgebraicComplex qft_gamma(unsigned k, unsigned modulus) {
    // e^{2 pi i / 2^k} = w^{2m / 2^k}; integral exponent iff 2m >= 2^k.
    if (k < 1 || (k >= 2 && modulus < (1u << (k - 1))))
        throw Error(ErrorKind::UnsupportedModulus,
                    "rotation 2^-" + std::to_string(k) + " needs modulus >= " + std::to_string(1u << (k - 1)));
    unsigned exponent = (2 * modulus) >> k;
    return AlgebraicComplex::omega(modulus, exponent);
}

/// Fourier box i over qubits lo..hi of m: Hadamard on qubit lo+i-1 followed by
/// the controlled rotation chain towards qubit hi. Pass-through states above,
/// identity wires below the range.
inline Wtt qft_box_wtt(unsigned box, unsigned lo, unsigned n, unsigned qubits, unsigned modulus) {
    AlgebraicComplex half = AlgebraicComplex::one_over_sqrt2_pow(1, modulus);
    unsigned target = lo + box - 1;  // level of the Hadamard
    Wtt t;
    t.modulus = modulus;
    std::vector<StateId> q(qubits + 1), id(qubits + 1);
    for (unsigned j = 0; j <= qubits; j++) q[j] = t.add_state("q" + std::to_string(j));
    for (unsigned j = 0; j <= qubits; j++) id[j] = t.add_state("i" + std::to_string(j));
    t.leaf[q[qubits]] = true;
    t.leaf[id[qubits]] = true;
    t.root = q[0];

    for (unsigned j = 0; j < qubits; j++) {
        SymbolId sym = t.add_symbol("x" + std::to_string(j + 1));
        {
            WttTransition pass;
            pass.left.add_term({id[j + 1], Side::left}, AlgebraicComplex::one(modulus));
            pass.right.add_term({id[j + 1], Side::right}, AlgebraicComplex::one(modulus));
            t.add_transition(id[j], sym, std::move(pass));
        }
        WttTransition tr;
        if (j + 1 < target || j + 1 > lo + n - 1) {
            // outside the active span of this box: plain wire
            tr.left.add_term({q[j + 1], Side::left}, AlgebraicComplex::one(modulus));
            tr.right.add_term({q[j + 1], Side::right}, AlgebraicComplex::one(modulus));
        } else if (j + 1 == target) {
            // the Hadamard; the left (0) output branch sees no further
            // rotations from this box, the right branch collects them
            tr.left.add_term({id[j + 1], Side::left}, half);
            tr.left.add_term({id[j + 1], Side::right}, half);
            tr.right.add_term({q[j + 1], Side::left}, half);
            tr.right.add_term({q[j + 1], Side::right}, -half);
        } else {
            // rotation level: phase fires on input bit 1 regardless of the
            // branch taken at other levels
            AlgebraicComplex gamma = qft_gamma(j + 1 - target + 1, modulus);
            tr.left.add_term({q[j + 1], Side::left}, AlgebraicComplex::one(modulus));
            tr.right.add_term({q[j + 1], Side::right}, gamma);
        }
        t.add_transition(q[j], sym, std::move(tr));
    }
    return t;
}

/// Quantum Fourier transform without the final bit reversal, on qubits
/// lo..lo+n-1 of an m-qubit system, built directly from the composed-schema
/// state families: (level, set of right-branch Hadamard levels) plus a shared
/// identity tail.
inline Wtt qft_wtt(unsigned n, unsigned qubits, unsigned modulus, unsigned lo = 1) {
    if (n < 1 || lo < 1 || lo + n - 1 > qubits)
        throw Error(ErrorKind::InvalidGate, "QFT range out of bounds");
    if (n >= 2) qft_gamma(n, modulus);  // validates expressibility up front

    AlgebraicComplex half = AlgebraicComplex::one_over_sqrt2_pow(1, modulus);
    Wtt t;
    t.modulus = modulus;
    for (unsigned j = 1; j <= qubits; j++) t.add_symbol("x" + std::to_string(j));

    // Wires above the range, then states (level a in [1..n], mask of earlier
    // boxes whose Hadamard went to the right output branch), then one shared
    // wire chain below the range.
    std::vector<StateId> pre;
    for (unsigned j = 1; j < lo; j++) pre.push_back(t.add_state("c" + std::to_string(j)));
    std::map<std::pair<unsigned, unsigned>, StateId> inside;
    for (unsigned a = 1; a <= n; a++)
        for (unsigned mask = 0; mask < (1u << (a - 1)); mask++)
            inside[{a, mask}] = t.add_state("p" + std::to_string(a) + "_" + std::to_string(mask));
    std::vector<StateId> post;
    for (unsigned j = 0; j <= qubits - (lo + n - 1); j++) post.push_back(t.add_state("t" + std::to_string(j)));
    t.leaf[post.back()] = true;

    auto pass = [&](StateId from, unsigned level, StateId to) {
        WttTransition tr;
        tr.left.add_term({to, Side::left}, AlgebraicComplex::one(modulus));
        tr.right.add_term({to, Side::right}, AlgebraicComplex::one(modulus));
        t.add_transition(from, static_cast<SymbolId>(level - 1), std::move(tr));
    };

    for (unsigned j = 1; j < lo; j++) pass(pre[j - 1], j, (j == lo - 1) ? inside[{1, 0}] : pre[j]);
    for (unsigned j = 0; j + 1 < post.size(); j++) pass(post[j], lo + n + j, post[j + 1]);

    for (unsigned a = 1; a <= n; a++) {
        unsigned level = lo + a - 1;
        for (unsigned mask = 0; mask < (1u << (a - 1)); mask++) {
            StateId from = inside[{a, mask}];
            // Accumulated rotation phase on input bit 1: every earlier box j
            // in the mask contributes gamma_{a-j+1}.
            AlgebraicComplex phase = AlgebraicComplex::one(modulus);
            for (unsigned j = 1; j < a; j++)
                if (mask & (1u << (j - 1))) phase = phase * qft_gamma(a - j + 1, modulus);

            StateId next_keep = (a == n) ? post[0] : inside[{a + 1, mask}];
            StateId next_take = (a == n) ? post[0] : inside[{a + 1, mask | (1u << (a - 1))}];
            WttTransition tr;
            tr.left.add_term({next_keep, Side::left}, half);
            tr.left.add_term({next_keep, Side::right}, half * phase);
            tr.right.add_term({next_take, Side::left}, half);
            tr.right.add_term({next_take, Side::right}, -(half * phase));
            t.add_transition(from, static_cast<SymbolId>(level - 1), std::move(tr));
        }
    }

    t.root = (lo == 1) ? inside[{1, 0}] : pre[0];
    return t;
}

/// The same transform assembled by composing the Fourier boxes left to right;
/// used as the construction cross-check for qft_wtt.
inline Wtt qft_wtt_by_composition(unsigned n, unsigned qubits, unsigned modulus, unsigned lo = 1) {
    if (n < 1 || lo < 1 || lo + n - 1 > qubits)
        throw Error(ErrorKind::InvalidGate, "QFT range out of bounds");
    Wtt acc = qft_box_wtt(1, lo, n, qubits, modulus);
    for (unsigned box = 2; box <= n; box++) acc = compose(qft_box_wtt(box, lo, n, qubits, modulus), acc);
    return acc;
}

}  // namespace swta

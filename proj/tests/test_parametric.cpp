#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "support/dense_sim.hpp"
#include "support/random_models.hpp"
#include "swta/format.hpp"
#include "swta/gates.hpp"
#include "swta/parametric.hpp"

using namespace swta;

namespace {

AlgebraicComplex num(int n) { return AlgebraicComplex::integer(n); }

// The majority-gate box from the staircase construction walkthrough.
const char* kMajBox = R"(wtt m=4
root a
leaves id
trans a x -> (1*b(L) + 1*c(R) | 1*e(L) + 1*d(R))
trans b x -> (1*f(L) | 1*f(R))
trans c x -> (1*h(R) | 1*h(L))
trans d x -> (1*f(L) | 1*k(R))
trans e x -> (1*h(R) | 1*g(L))
trans f x -> (1*id(L) | 0*id(R))
trans g x -> (1*id(R) | 0*id(L))
trans h x -> (0*id(L) | 1*id(R))
trans k x -> (0*id(R) | 1*id(L))
trans id x -> (1*id(L) | 1*id(R))
trans id x' -> (1*id(L) | 1*id(R))
)";

Wtt maj_box() { return parse_wtt(kMajBox); }

StateId state_by_name(const Wtt& t, const std::string& name) {
    for (StateId s = 0; s < t.state_count(); s++)
        if (t.states[s] == name) return s;
    FAIL("state not found: " + name);
    return 0;
}

const AlgebraicComplex* term_coef(const Wtt& t, const TermForm& form, const std::string& state, Side side) {
    for (const auto& [g, c] : form.terms())
        if (t.states[g.state] == state && g.side == side) return &c;
    return nullptr;
}

/// The box shifted `shift` levels down and made symbol-agnostic (every body
/// transition fires on both the plain and the primed symbol), for building
/// the explicit j-fold compositions the staircase must match.
Wtt shifted_box(const Wtt& box, unsigned shift) {
    Wtt out;
    out.modulus = box.modulus;
    SymbolId x = out.add_symbol("x");
    SymbolId xp = out.add_symbol("x'");
    std::vector<StateId> map(box.state_count());
    for (StateId s = 0; s < box.state_count(); s++) {
        map[s] = out.add_state(box.states[s]);
        out.leaf[map[s]] = box.leaf[s];
    }
    auto box_x = box.find_symbol("x");
    auto box_xp = box.find_symbol("x'");
    REQUIRE(box_x.has_value());
    REQUIRE(box_xp.has_value());
    for (StateId s = 0; s < box.state_count(); s++) {
        const WttTransition* plain = box.transition(s, *box_x);
        const WttTransition* primed = box.transition(s, *box_xp);
        auto remap = [&](const WttTransition& tr) {
            WttTransition mapped;
            for (const auto& [g, c] : tr.left.terms()) mapped.left.add_term({map[g.state], g.side}, c);
            for (const auto& [g, c] : tr.right.terms()) mapped.right.add_term({map[g.state], g.side}, c);
            return mapped;
        };
        if (plain != nullptr) {
            out.add_transition(map[s], x, remap(*plain));
            out.add_transition(map[s], xp, remap(primed != nullptr ? *primed : *plain));
        } else if (primed != nullptr) {
            out.add_transition(map[s], xp, remap(*primed));
        }
    }
    StateId entry = map[box.root];
    for (unsigned level = shift; level > 0; level--) {
        StateId pass = out.add_state("pass" + std::to_string(level - 1));
        for (SymbolId sym : {x, xp}) {
            WttTransition tr;
            tr.left.add_term({entry, Side::left}, AlgebraicComplex::one(box.modulus));
            tr.right.add_term({entry, Side::right}, AlgebraicComplex::one(box.modulus));
            out.add_transition(pass, sym, std::move(tr));
        }
        entry = pass;
    }
    out.root = entry;
    return out;
}

/// The explicit j-fold staircase built with plain transducer composition.
Wtt explicit_staircase(const Wtt& box, unsigned offset, Dir dir, unsigned boxes) {
    std::vector<Wtt> shifted;
    for (unsigned k = 0; k < boxes; k++) shifted.push_back(shifted_box(box, k * offset));
    Wtt acc = (dir == Dir::right) ? shifted.front() : shifted.back();
    if (dir == Dir::right) {
        for (unsigned k = 1; k < boxes; k++) acc = compose(shifted[k], acc);
    } else {
        for (int k = static_cast<int>(boxes) - 2; k >= 0; k--) acc = compose(shifted[static_cast<size_t>(k)], acc);
    }
    return acc;
}

PerfectTree staircase_tree(std::mt19937& rng, unsigned offset, unsigned boxes, size_t height, unsigned m = 4) {
    size_t plain_levels = offset * boxes - 1;
    REQUIRE(height >= plain_levels);
    std::vector<std::string> labels;
    for (size_t level = 0; level < height; level++) labels.push_back(level < plain_levels ? "x" : "x'");
    std::uniform_int_distribution<int> coef(-3, 3);
    std::vector<AlgebraicComplex> leaves;
    for (size_t i = 0; i < (size_t(1) << height); i++) leaves.push_back(AlgebraicComplex::integer(coef(rng), m));
    return PerfectTree(std::move(labels), std::move(leaves));
}

}  // namespace

TEST_CASE("box validation", "[parametric]") {
    SECTION("the majority box validates with the expected depths") {
        BoxTransducer box = validate_box(maj_box());
        CHECK(box.depth[state_by_name(box.wtt, "a")] == 0);
        for (const char* name : {"b", "c", "d", "e"}) CHECK(box.depth[state_by_name(box.wtt, name)] == 1);
        for (const char* name : {"f", "g", "h", "k"}) CHECK(box.depth[state_by_name(box.wtt, name)] == 2);
        CHECK(box.depth_span == 3);
    }

    SECTION("a pure-wire box is rejected") {
        Wtt wire;
        wire.modulus = 4;
        StateId id = wire.add_state("id");
        wire.leaf[id] = true;
        wire.root = id;
        for (const char* sym : {"x", "x'"}) {
            WttTransition tr;
            tr.left.add_term({id, Side::left}, num(1));
            tr.right.add_term({id, Side::right}, num(1));
            wire.add_transition(id, wire.add_symbol(sym), std::move(tr));
        }
        try {
            validate_box(wire);
            FAIL("expected MissingId");
        } catch (const Error& e) {
            CHECK(e.kind == ErrorKind::MissingId);
        }
    }

    SECTION("a state reachable at two depths is a depth conflict") {
        std::string bad = kMajBox;
        std::string needle = "trans f x -> (1*id(L) | 0*id(R))";
        bad.replace(bad.find(needle), needle.size(), "trans f x -> (1*b(L) | 0*id(R))");
        try {
            validate_box(parse_wtt(bad));
            FAIL("expected DepthConflict");
        } catch (const Error& e) {
            CHECK(e.kind == ErrorKind::DepthConflict);
        }
    }

    SECTION("missing id loops are reported") {
        std::string bad = kMajBox;
        std::string needle = "trans id x' -> (1*id(L) | 1*id(R))\n";
        bad.erase(bad.find(needle), needle.size());
        try {
            validate_box(parse_wtt(bad));
            FAIL("expected MissingIdLoop");
        } catch (const Error& e) {
            CHECK(e.kind == ErrorKind::MissingIdLoop);
        }
    }
}

TEST_CASE("the majority staircase contains the worked transitions", "[parametric]") {
    Wtt c = parameterize(maj_box(), 2, Dir::right);
    SymbolId x = *c.find_symbol("x");
    SymbolId xp = *c.find_symbol("x'");

    StateId root = c.root;
    CHECK(c.states[root] == "<a>b");

    const WttTransition* root_tr = c.transition(root, x);
    REQUIRE(root_tr != nullptr);
    REQUIRE(root_tr->left.size() == 2);
    REQUIRE(root_tr->right.size() == 2);
    CHECK(term_coef(c, root_tr->left, "<b>b", Side::left) != nullptr);
    CHECK(term_coef(c, root_tr->left, "<c>b", Side::right) != nullptr);
    CHECK(term_coef(c, root_tr->right, "<e>b", Side::left) != nullptr);
    CHECK(term_coef(c, root_tr->right, "<d>b", Side::right) != nullptr);

    SECTION("continuing spawns the overlapped tuple") {
        StateId b = state_by_name(c, "<b>b");
        const WttTransition* cont = c.transition(b, x);
        REQUIRE(cont != nullptr);
        REQUIRE(cont->left.size() == 1);
        CHECK(term_coef(c, cont->left, "<f,a>b", Side::left) != nullptr);
        CHECK(term_coef(c, cont->right, "<f,a>b", Side::right) != nullptr);
    }

    SECTION("ending emits the primed variant") {
        StateId b = state_by_name(c, "<b>b");
        const WttTransition* end = c.transition(b, xp);
        REQUIRE(end != nullptr);
        CHECK(term_coef(c, end->left, "<f>e", Side::left) != nullptr);
        CHECK(term_coef(c, end->right, "<f>e", Side::right) != nullptr);
    }

    SECTION("the overlapped tuple composes with id deletion and keeps zero supports") {
        StateId fa = state_by_name(c, "<f,a>b");
        const WttTransition* tr = c.transition(fa, x);
        REQUIRE(tr != nullptr);
        REQUIRE(tr->left.size() == 2);
        REQUIRE(tr->right.size() == 2);
        const AlgebraicComplex* b_coef = term_coef(c, tr->left, "<b>b", Side::left);
        const AlgebraicComplex* c_coef = term_coef(c, tr->left, "<c>b", Side::right);
        const AlgebraicComplex* e_coef = term_coef(c, tr->right, "<e>b", Side::left);
        const AlgebraicComplex* d_coef = term_coef(c, tr->right, "<d>b", Side::right);
        REQUIRE(b_coef != nullptr);
        REQUIRE(c_coef != nullptr);
        REQUIRE(e_coef != nullptr);
        REQUIRE(d_coef != nullptr);
        CHECK(*b_coef == num(1));
        CHECK(*c_coef == num(0));  // 0-coefficient support kept
        CHECK(*e_coef == num(1));
        CHECK(*d_coef == num(0));
    }

    SECTION("no transition leads from an end-tagged state to a begin-tagged one") {
        for (const auto& [key, tr] : c.transitions()) {
            if (c.states[key.first].back() != 'e') continue;
            for (const TermForm* form : {&tr.left, &tr.right})
                for (const auto& [g, coef] : form->terms()) CHECK(c.states[g.state].back() == 'e');
        }
    }

    SECTION("every support state gets explored") {
        std::set<StateId> referenced;
        for (const auto& [key, tr] : c.transitions())
            for (const TermForm* form : {&tr.left, &tr.right})
                for (const auto& [g, coef] : form->terms()) referenced.insert(g.state);
        for (StateId s : referenced) {
            bool known = c.leaf[s];
            for (const auto& [key, tr] : c.transitions())
                if (key.first == s) known = true;
            CHECK(known);
        }
    }
}

TEST_CASE("staircase instantiation matches explicit composition", "[parametric][property]") {
    std::mt19937 rng(7777);

    auto check_box = [&](const Wtt& box_wtt, unsigned offset, Dir dir, unsigned max_boxes) {
        BoxTransducer box = validate_box(box_wtt);
        Wtt param = parameterize(box, offset, dir);
        for (unsigned boxes = 1; boxes <= max_boxes; boxes++) {
            Wtt chain = explicit_staircase(box_wtt, offset, dir, boxes);
            size_t min_height = (boxes - 1) * offset + box.depth_span;
            for (size_t height : {min_height, min_height + 1}) {
                for (int round = 0; round < 10; round++) {
                    PerfectTree t = staircase_tree(rng, offset, boxes, height);
                    auto via_param = apply(param, t);
                    auto via_chain = apply(chain, t);
                    REQUIRE(via_param.has_value());
                    REQUIRE(via_chain.has_value());
                    CHECK(*via_param == *via_chain);
                }
            }
        }
    };

    SECTION("majority box, offset 2, both directions") {
        check_box(maj_box(), 2, Dir::right, 4);
        check_box(maj_box(), 2, Dir::left, 3);
    }

    SECTION("relabeled CX box at offset 1") {
        Wtt cx_box = as_box(controlled_wtt(gate::x(), 2, {1}, 2));
        check_box(cx_box, 1, Dir::right, 4);
        check_box(cx_box, 1, Dir::left, 4);
    }
}

TEST_CASE("a single Hadamard box at offset 1 is the broadcast gate", "[parametric]") {
    Wtt hbox = as_box(single_qubit_wtt(gate::h(), 1, 1));
    Wtt param = parameterize(hbox, 1, Dir::right);
    Wtt broadcast = broadcast_wtt(gate::h(), {"x", "x'"});

    std::mt19937 rng(29);
    for (size_t height = 1; height <= 5; height++) {
        std::vector<std::string> labels(height, "x");
        labels.back() = "x'";
        std::uniform_int_distribution<int> coef(-3, 3);
        std::vector<AlgebraicComplex> leaves;
        for (size_t i = 0; i < (size_t(1) << height); i++) leaves.push_back(num(coef(rng)));
        PerfectTree t(labels, leaves);
        auto via_param = apply(param, t);
        auto via_broadcast = apply(broadcast, t);
        REQUIRE(via_param.has_value());
        CHECK(*via_param == *via_broadcast);
    }
}

TEST_CASE("the CX staircase reproduces the dense cascade on superposition inputs", "[parametric]") {
    Wtt cx_box = as_box(controlled_wtt(gate::x(), 2, {1}, 2));
    Wtt param = parameterize(cx_box, 1, Dir::right);

    for (size_t height = 3; height <= 5; height++) {
        unsigned boxes = static_cast<unsigned>(height) - 1;
        std::vector<std::string> labels(height, "x");
        for (size_t level = boxes - 1; level < height; level++) labels[level] = "x'";
        std::vector<AlgebraicComplex> leaves(size_t(1) << height, AlgebraicComplex::zero());
        leaves.front() = AlgebraicComplex::one_over_sqrt2_pow(1);
        leaves.back() = AlgebraicComplex::one_over_sqrt2_pow(1);
        PerfectTree input(labels, leaves);

        auto out = apply(param, input);
        REQUIRE(out.has_value());

        // Dense oracle: CX(k, k+1) applied for k = 1..height-1 in order.
        oracle::Mat acc = oracle::identity(size_t(1) << height, 4);
        for (unsigned k = 1; k < height; k++)
            acc = oracle::matmul(oracle::controlled(gate::x(), k + 1, {k}, static_cast<unsigned>(height)), acc);
        oracle::Vec expected = oracle::matvec(acc, leaves);
        CHECK(out->leaves() == expected);
    }
}

TEST_CASE("tuple growth is capped with a diagnostic", "[parametric]") {
    try {
        parameterize(validate_box(maj_box()), 1, Dir::right, 1);
        FAIL("expected the tuple cap to trip");
    } catch (const Error& e) {
        CHECK(e.kind == ErrorKind::DepthConflict);
    }
    CHECK_NOTHROW(parameterize(validate_box(maj_box()), 1, Dir::right));
}

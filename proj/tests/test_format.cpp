#include <catch2/catch_amalgamated.hpp>

#include "support/models.hpp"
#include "swta/format.hpp"

using namespace swta;

TEST_CASE("scalar literals parse and print", "[format]") {
    CHECK(parse_scalar("1", 4) == AlgebraicComplex::one());
    CHECK(parse_scalar("-1", 4) == -AlgebraicComplex::one());
    CHECK(parse_scalar("0", 4).is_zero());
    CHECK(parse_scalar("1/s2^3", 4) == AlgebraicComplex({1, 0, 0, 0}, 3));
    CHECK(parse_scalar("(0,1,0,-1)/s2^2", 4) == AlgebraicComplex({0, 1, 0, -1}, 2));
    CHECK(parse_scalar("(1,0)", 2) == AlgebraicComplex::one(2));

    SECTION("printing round-trips") {
        for (const char* text : {"0", "1", "-1", "7", "3/s2^2", "(0,1,0,-1)/s2^1", "(2,-1,3,4)"}) {
            AlgebraicComplex v = parse_scalar(text, 4);
            CHECK(parse_scalar(v.to_string(), 4) == v);
        }
        CHECK(parse_scalar("(2,0,0,0)/s2^2", 4).to_string() == "1");
    }

    SECTION("errors carry location") {
        CHECK_THROWS_AS(parse_scalar("(1,2,3)", 4), Error);
        CHECK_THROWS_AS(parse_scalar("1/s3^2", 4), Error);
        CHECK_THROWS_AS(parse_scalar("abc", 4), Error);
    }
}

TEST_CASE("the example automaton parses to the expected shape", "[format]") {
    // The transition listing uses states q, r, s and the two leaf states u, v.
    Swta a = fixtures::example_a();
    CHECK(a.state_count() == 5);
    CHECK(a.transition_count() == 6);
    CHECK(a.symbols.size() == 1);
    CHECK(a.colors.size() == 2);
    CHECK_FALSE(a.leaf[a.root]);
}

TEST_CASE("swta and wtt round-trips are stable", "[format]") {
    SECTION("swta") {
        Swta a = fixtures::example_a();
        std::string once = print_swta(a);
        std::string twice = print_swta(parse_swta(once));
        CHECK(once == twice);
    }
    SECTION("wtt") {
        Wtt t = fixtures::example_t();
        std::string once = print_wtt(t);
        std::string twice = print_wtt(parse_wtt(once));
        CHECK(once == twice);
    }
    SECTION("product names with angle brackets survive") {
        Swta img = image(fixtures::broadcast_h(), fixtures::bases());
        std::string once = print_swta(img);
        Swta back = parse_swta(once);
        CHECK(print_swta(back) == once);
        CHECK(back.states[back.root] == "<q,s>");
    }
}

TEST_CASE("empty and zero forms", "[format]") {
    SECTION("a bare 0 denotes the empty form") {
        Swta a = parse_swta("swta m=4\nroot q\nleaves u\ncolors 1\ntrans q a 1 -> (1*u | 0)\n");
        const SwtaTransition* tr = a.transition(a.root, 0, 0);
        REQUIRE(tr != nullptr);
        CHECK(tr->right.empty());
        // The empty form has no height witness, so the word is undefined.
        CHECK_FALSE(evaluate(a, {{0, 0}}).has_value());
    }

    SECTION("0*x is legal and distinct from omission") {
        Swta a = parse_swta("swta m=4\nroot q\nleaves u\ncolors 1\ntrans q a 1 -> (1*u | 0*u)\n");
        const SwtaTransition* tr = a.transition(a.root, 0, 0);
        REQUIRE(tr != nullptr);
        CHECK(tr->right.size() == 1);
        CHECK(evaluate(a, {{0, 0}}).has_value());
    }

    SECTION("a blank form is a parse error") {
        CHECK_THROWS_AS(parse_swta("swta m=4\nroot q\nleaves u\ncolors 1\ntrans q a 1 -> (1*u | )\n"), Error);
    }

    SECTION("undeclared colors are rejected") {
        CHECK_THROWS_AS(parse_swta("swta m=4\nroot q\nleaves u\ncolors 1\ntrans q a 2 -> (1*u | 1*u)\n"), Error);
    }

    SECTION("an empty transitions section with root in leaves is the one-leaf automaton") {
        Swta a = parse_swta("swta m=4\nroot q\nleaves q\ncolors 1\n");
        CHECK(a.transition_count() == 0);
        auto t = evaluate(a, {});
        REQUIRE(t.has_value());
        CHECK(*t == PerfectTree::leaf(AlgebraicComplex::one()));
    }
}

TEST_CASE("tree parsing and rendering", "[format]") {
    PerfectTree t = parse_tree("tree h=2 m=4 labels=a,a leaves=[1/s2^1,0,0,1/s2^1]");
    CHECK(t.height() == 2);
    CHECK(t.leaves()[0] == AlgebraicComplex({1, 0, 0, 0}, 1));

    SECTION("round-trip") {
        CHECK(parse_tree(print_tree(t, 4)) == t);
    }

    SECTION("dirac rendering lists nonzero kets") {
        CHECK(format_tree_dirac(t) == "1/s2^1|00> + 1/s2^1|11>");
        PerfectTree zero({"a"}, {AlgebraicComplex::zero(), AlgebraicComplex::zero()});
        CHECK(format_tree_dirac(zero) == "0");
        CHECK(format_tree_dirac(PerfectTree::leaf(AlgebraicComplex::one())) == "1");
    }

    SECTION("vector rendering lists all amplitudes") {
        CHECK(format_tree_vector(parse_tree("tree h=1 m=4 labels=a leaves=[1,0]")) == "[1, 0]");
    }
}

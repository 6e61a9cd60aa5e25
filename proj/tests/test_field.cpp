#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "swta/field.hpp"

using swta::AlgebraicComplex;
using swta::Basis;
using swta::Error;
using swta::FieldScalar;
using swta::Int;
using swta::Rat;
using swta::SparseVec;

namespace {

FieldScalar fs(std::vector<int> coeffs) {
    std::vector<Rat> rats(coeffs.begin(), coeffs.end());
    return FieldScalar(std::move(rats));
}

AlgebraicComplex random_scalar(std::mt19937& rng) {
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<unsigned> denom(0, 3);
    std::vector<Int> coeffs(4);
    for (auto& c : coeffs) c = coef(rng);
    return AlgebraicComplex(std::move(coeffs), denom(rng));
}

}  // namespace

TEST_CASE("field inversion", "[field]") {
    SECTION("invert(omega) = -omega^3") {
        FieldScalar omega = fs({0, 1, 0, 0});
        CHECK(omega.invert() == fs({0, 0, 0, -1}));
    }

    SECTION("invert(1/sqrt2) = sqrt2") {
        FieldScalar inv_sqrt2 = FieldScalar::embed(AlgebraicComplex({Int(1), Int(0), Int(0), Int(0)}, 1));
        CHECK(inv_sqrt2.invert() == FieldScalar::sqrt2(4));
    }

    SECTION("invert(1 + omega) multiplies back to one") {
        FieldScalar value = fs({1, 1, 0, 0});
        CHECK(value * value.invert() == FieldScalar::one());
    }

    SECTION("inverting zero fails") {
        CHECK_THROWS_AS(FieldScalar::zero().invert(), Error);
    }

    SECTION("random nonzero values invert exactly") {
        std::mt19937 rng(11);
        for (int i = 0; i < 100; i++) {
            AlgebraicComplex x = random_scalar(rng);
            if (x.is_zero()) continue;
            FieldScalar v = FieldScalar::embed(x);
            CHECK(v * v.invert() == FieldScalar::one());
        }
    }
}

TEST_CASE("embedding is a ring homomorphism", "[field]") {
    std::mt19937 rng(23);
    for (int i = 0; i < 200; i++) {
        AlgebraicComplex x = random_scalar(rng);
        AlgebraicComplex y = random_scalar(rng);
        CHECK(FieldScalar::embed(x + y) == FieldScalar::embed(x) + FieldScalar::embed(y));
        CHECK(FieldScalar::embed(x * y) == FieldScalar::embed(x) * FieldScalar::embed(y));
    }
}

TEST_CASE("span insertion", "[field]") {
    SECTION("first nonzero vector is always added") {
        Basis basis(3);
        SparseVec v = {{0, fs({1, 0, 0, 0})}, {2, fs({0, 1, 0, 0})}};
        CHECK(basis.insert(v));
        CHECK(basis.size() == 1);
    }

    SECTION("scalar multiples are dependent") {
        Basis basis(3);
        SparseVec v = {{0, fs({1, 0, 0, 0})}, {1, fs({3, 0, 0, 0})}};
        SparseVec twice = {{0, fs({2, 0, 0, 0})}, {1, fs({6, 0, 0, 0})}};
        CHECK(basis.insert(v));
        CHECK_FALSE(basis.insert(twice));
        CHECK(basis.size() == 1);
    }

    SECTION("dimension bounds the basis") {
        std::mt19937 rng(3);
        std::uniform_int_distribution<int> coef(-3, 3);
        const size_t dim = 4;
        Basis basis(dim);
        for (int i = 0; i < 200; i++) {
            SparseVec v;
            for (uint32_t j = 0; j < dim; j++) {
                int c = coef(rng);
                if (c != 0) v.push_back({j, fs({c, 0, 0, 0})});
            }
            basis.insert(v);
            CHECK(basis.size() <= dim);
        }
        // After saturation, fresh unit vectors are all dependent.
        bool grew = false;
        for (uint32_t j = 0; j < dim; j++) {
            SparseVec unit = {{j, FieldScalar::one()}};
            grew = basis.insert(unit) || grew;
            CHECK(basis.size() <= dim);
        }
        if (basis.size() == dim) CHECK_FALSE(grew);
    }

    SECTION("pivot rows are normalized to one") {
        Basis basis(2);
        SparseVec v = {{1, fs({0, 2, 0, 0})}};
        basis.insert(v);
        REQUIRE(basis.rows().size() == 1);
        CHECK(basis.rows()[0].front().second == FieldScalar::one());
    }

    SECTION("dimension mismatch is rejected") {
        Basis basis(2);
        SparseVec v = {{5, FieldScalar::one()}};
        CHECK_THROWS_AS(basis.insert(v), Error);
    }
}

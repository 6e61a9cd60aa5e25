#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "swta/scalar.hpp"

using swta::AlgebraicComplex;
using swta::Error;
using swta::ErrorKind;
using swta::Int;

namespace {

AlgebraicComplex make(std::vector<Int> coeffs, unsigned k) { return AlgebraicComplex(std::move(coeffs), k); }

AlgebraicComplex random_scalar(std::mt19937& rng) {
    std::uniform_int_distribution<int> coef(-4, 4);
    std::uniform_int_distribution<unsigned> denom(0, 3);
    std::vector<Int> coeffs(4);
    for (auto& c : coeffs) c = coef(rng);
    return AlgebraicComplex(std::move(coeffs), denom(rng));
}

bool close(std::complex<double> a, std::complex<double> b, double eps = 1e-12) {
    return std::abs(a - b) < eps;
}

}  // namespace

TEST_CASE("scalar construction and canonical form", "[scalar]") {
    CHECK(make({1, 0, 0, 0}, 0).is_one());
    CHECK(close(make({1, 0, 0, 0}, 1).to_complex(), {1.0 / std::sqrt(2.0), 0.0}));
    // w/sqrt(2) = (1+i)/2
    CHECK(close(make({0, 1, 0, 0}, 1).to_complex(), std::polar(1.0, 3.14159265358979323846 / 4) / std::sqrt(2.0)));
    CHECK(close(make({0, 1, 0, 0}, 1).to_complex(), {0.5, 0.5}));

    SECTION("k is reduced greedily") {
        AlgebraicComplex two_over_two = make({2, 0, 0, 0}, 2);
        CHECK(two_over_two == AlgebraicComplex::one());
        CHECK(two_over_two.k() == 0);
    }

    SECTION("zero normalizes k away") {
        AlgebraicComplex z = make({0, 0, 0, 0}, 3);
        CHECK(z.is_zero());
        CHECK(z.k() == 0);
    }

    SECTION("wrong coefficient count is rejected") {
        CHECK_THROWS_AS(make({1, 0, 0}, 0), Error);
    }
}

TEST_CASE("scalar addition", "[scalar]") {
    AlgebraicComplex one = AlgebraicComplex::one();
    CHECK((one + (-one)).is_zero());

    SECTION("1/sqrt2 + 1/sqrt2 = sqrt2") {
        AlgebraicComplex half_pow = make({1, 0, 0, 0}, 1);
        AlgebraicComplex sum = half_pow + half_pow;
        CHECK(sum == make({0, 1, 0, -1}, 0));
        CHECK(close(sum.to_complex(), {std::sqrt(2.0), 0.0}));
    }

    SECTION("denominator equalization: 1 + 1/sqrt2") {
        AlgebraicComplex sum = AlgebraicComplex::one() + make({1, 0, 0, 0}, 1);
        CHECK(sum == make({1, 1, 0, -1}, 1));
        CHECK(close(sum.to_complex(), {1.0 + 1.0 / std::sqrt(2.0), 0.0}));
    }

    SECTION("mismatched moduli are rejected") {
        CHECK_THROWS_AS(AlgebraicComplex::one(4) + AlgebraicComplex::one(8), Error);
    }
}

TEST_CASE("scalar multiplication", "[scalar]") {
    SECTION("omega times a value is a signed right circular shift") {
        AlgebraicComplex value = make({3, -1, 2, 5}, 2);
        CHECK(AlgebraicComplex::omega() * value == make({-5, 3, -1, 2}, 2));
    }

    SECTION("multiplicative identity") {
        std::mt19937 rng(7);
        for (int i = 0; i < 50; i++) {
            AlgebraicComplex x = random_scalar(rng);
            CHECK(x * AlgebraicComplex::one() == x);
        }
    }

    SECTION("k values add") {
        AlgebraicComplex r = make({1, 0, 0, 0}, 1) * make({1, 0, 0, 0}, 1);
        CHECK(r == make({1, 0, 0, 0}, 2));
        CHECK(close(r.to_complex(), {0.5, 0.0}));
    }
}

TEST_CASE("scalar equality and zero test", "[scalar]") {
    CHECK(make({2, 0, 0, 0}, 2) == make({1, 0, 0, 0}, 0));
    CHECK(AlgebraicComplex::omega() == AlgebraicComplex::omega());
    CHECK(make({0, 0, 0, 0}, 3).is_zero());
}

TEST_CASE("scalar ring laws hold on random values", "[scalar]") {
    std::mt19937 rng(42);
    for (int i = 0; i < 300; i++) {
        AlgebraicComplex x = random_scalar(rng);
        AlgebraicComplex y = random_scalar(rng);
        AlgebraicComplex z = random_scalar(rng);
        CHECK(x + y == y + x);
        CHECK(x * (y + z) == x * y + x * z);
    }
}

TEST_CASE("canonical equality agrees with floating point evaluation", "[scalar]") {
    std::mt19937 rng(2024);
    for (int i = 0; i < 1000; i++) {
        AlgebraicComplex x = random_scalar(rng);
        AlgebraicComplex y = random_scalar(rng);
        bool exact_equal = (x == y);
        double distance = std::abs(x.to_complex() - y.to_complex());
        if (exact_equal) {
            CHECK(distance < 1e-9);
        } else {
            CHECK(distance > 1e-9);
        }
    }
}

TEST_CASE("conjugation reverses coefficients with sign", "[scalar]") {
    AlgebraicComplex x = make({3, 1, -2, 4}, 1);
    CHECK(x.conjugate() == make({3, -4, 2, -1}, 1));
    std::mt19937 rng(5);
    for (int i = 0; i < 50; i++) {
        AlgebraicComplex v = random_scalar(rng);
        CHECK(close(v.conjugate().to_complex(), std::conj(v.to_complex())));
        AlgebraicComplex n = v.norm_sq();
        CHECK(close(n.to_complex(), {std::norm(v.to_complex()), 0.0}));
    }
}

TEST_CASE("higher moduli and the m-lattice", "[scalar]") {
    // w_8^2 = w_4 as complex numbers
    CHECK(close(AlgebraicComplex::omega(8, 2).to_complex(), AlgebraicComplex::omega(4, 1).to_complex()));
    // omega^m = -1
    CHECK(AlgebraicComplex::omega(8, 8) == -AlgebraicComplex::one(8));

    SECTION("m = 2: only even k reduces") {
        AlgebraicComplex v({Int(2), Int(0)}, 2);
        CHECK(v == AlgebraicComplex::one(2));
        CHECK_THROWS_AS(AlgebraicComplex::one(2) + AlgebraicComplex({Int(1), Int(0)}, 1), Error);
    }
}

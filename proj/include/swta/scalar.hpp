#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "swta/errors.hpp"

namespace swta {

using Int = boost::multiprecision::cpp_int;

inline bool is_power_of_two(unsigned value) {
    return value != 0 && (value & (value - 1)) == 0;
}

/// Exact complex scalar (a_0 + a_1*w + ... + a_{m-1}*w^{m-1}) / sqrt(2)^k where
/// w = e^{i*pi/m} and m is a power of two. Values are kept in canonical form:
/// either k = 0 or the coefficient vector is not divisible by the ring element
/// sqrt(2) = w^{m/4} - w^{3m/4}, which makes equality a component comparison.
class AlgebraicComplex {
  public:
    AlgebraicComplex() : coeffs_(4, 0), k_(0) {}

    AlgebraicComplex(std::vector<Int> coeffs, unsigned k) : coeffs_(std::move(coeffs)), k_(k) {
        if (!is_power_of_two(static_cast<unsigned>(coeffs_.size())))
            throw Error(ErrorKind::InvalidScalar,
                        "coefficient count must be a power of two, got " + std::to_string(coeffs_.size()));
        canonicalize();
    }

    static AlgebraicComplex zero(unsigned m = 4) { return AlgebraicComplex(std::vector<Int>(m, 0), 0); }

    static AlgebraicComplex one(unsigned m = 4) { return integer(1, m); }

    static AlgebraicComplex integer(const Int& value, unsigned m = 4) {
        std::vector<Int> coeffs(m, 0);
        coeffs[0] = value;
        return AlgebraicComplex(std::move(coeffs), 0);
    }

    /// w^power, the primitive 2m-th root of unity raised to `power`.
    static AlgebraicComplex omega(unsigned m = 4, unsigned power = 1) {
        std::vector<Int> coeffs(m, 0);
        unsigned reduced = power % (2 * m);
        Int sign = 1;
        if (reduced >= m) {
            reduced -= m;
            sign = -1;
        }
        coeffs[reduced] = sign;
        return AlgebraicComplex(std::move(coeffs), 0);
    }

    static AlgebraicComplex one_over_sqrt2_pow(unsigned k, unsigned m = 4) {
        std::vector<Int> coeffs(m, 0);
        coeffs[0] = 1;
        return AlgebraicComplex(std::move(coeffs), k);
    }

    unsigned modulus() const { return static_cast<unsigned>(coeffs_.size()); }
    unsigned k() const { return k_; }
    const std::vector<Int>& coeffs() const { return coeffs_; }

    bool is_zero() const {
        for (const Int& c : coeffs_)
            if (c != 0) return false;
        return true;
    }

    bool is_one() const { return *this == one(modulus()); }

    bool operator==(const AlgebraicComplex& other) const {
        return k_ == other.k_ && coeffs_ == other.coeffs_;
    }
    bool operator!=(const AlgebraicComplex& other) const { return !(*this == other); }

    AlgebraicComplex operator+(const AlgebraicComplex& other) const {
        check_same_modulus(other);
        const unsigned m = modulus();
        if (k_ == other.k_) {
            std::vector<Int> sum(m);
            for (unsigned i = 0; i < m; i++) sum[i] = coeffs_[i] + other.coeffs_[i];
            return AlgebraicComplex(std::move(sum), k_);
        }
        // Equalize denominators by lifting the smaller-k operand with the
        // sqrt(2) ring element the required number of times.
        const AlgebraicComplex& low = (k_ < other.k_) ? *this : other;
        const AlgebraicComplex& high = (k_ < other.k_) ? other : *this;
        unsigned diff = high.k_ - low.k_;
        std::vector<Int> lifted = low.coeffs_;
        if (m < 4) {
            if (diff % 2 != 0)
                throw Error(ErrorKind::InvalidScalar,
                            "odd sqrt(2)-power difference is not representable for m < 4");
            for (unsigned step = 0; step < diff / 2; step++)
                for (Int& c : lifted) c *= 2;
        } else {
            for (unsigned step = 0; step < diff; step++) lifted = times_sqrt2(lifted);
        }
        std::vector<Int> sum(m);
        for (unsigned i = 0; i < m; i++) sum[i] = lifted[i] + high.coeffs_[i];
        return AlgebraicComplex(std::move(sum), high.k_);
    }

    AlgebraicComplex operator-() const {
        std::vector<Int> neg = coeffs_;
        for (Int& c : neg) c = -c;
        return AlgebraicComplex(std::move(neg), k_);
    }

    AlgebraicComplex operator-(const AlgebraicComplex& other) const { return *this + (-other); }

    AlgebraicComplex operator*(const AlgebraicComplex& other) const {
        check_same_modulus(other);
        const unsigned m = modulus();
        // Negacyclic convolution: w^m = -1 folds indices above m-1 back with a sign flip.
        std::vector<Int> prod(m, 0);
        for (unsigned i = 0; i < m; i++) {
            if (coeffs_[i] == 0) continue;
            for (unsigned j = 0; j < m; j++) {
                if (other.coeffs_[j] == 0) continue;
                unsigned idx = i + j;
                if (idx < m)
                    prod[idx] += coeffs_[i] * other.coeffs_[j];
                else
                    prod[idx - m] -= coeffs_[i] * other.coeffs_[j];
            }
        }
        return AlgebraicComplex(std::move(prod), k_ + other.k_);
    }

    /// Complex conjugate; uses conj(w^j) = -w^{m-j} for 0 < j < m.
    AlgebraicComplex conjugate() const {
        const unsigned m = modulus();
        std::vector<Int> conj(m, 0);
        conj[0] = coeffs_[0];
        for (unsigned j = 1; j < m; j++) conj[m - j] = -coeffs_[j];
        return AlgebraicComplex(std::move(conj), k_);
    }

    /// |z|^2 as an exact scalar.
    AlgebraicComplex norm_sq() const { return *this * conjugate(); }

    std::complex<double> to_complex() const {
        const unsigned m = modulus();
        std::complex<double> acc(0.0, 0.0);
        constexpr double pi = 3.14159265358979323846;
        for (unsigned j = 0; j < m; j++) {
            if (coeffs_[j] == 0) continue;
            double c = coeffs_[j].convert_to<double>();
            acc += c * std::polar(1.0, pi * static_cast<double>(j) / static_cast<double>(m));
        }
        return acc / std::pow(std::sqrt(2.0), static_cast<double>(k_));
    }

    /// Scalar literal used by the model file formats.
    std::string to_string() const {
        if (is_zero()) return "0";
        bool single = true;
        for (unsigned j = 1; j < modulus(); j++)
            if (coeffs_[j] != 0) single = false;
        std::ostringstream out;
        if (single) {
            out << coeffs_[0];
        } else {
            out << "(";
            for (unsigned j = 0; j < modulus(); j++) {
                if (j) out << ",";
                out << coeffs_[j];
            }
            out << ")";
        }
        if (k_ > 0) out << "/s2^" << k_;
        return out.str();
    }

  private:
    void check_same_modulus(const AlgebraicComplex& other) const {
        if (modulus() != other.modulus())
            throw Error(ErrorKind::InvalidScalar, "mixed moduli " + std::to_string(modulus()) + " and " +
                                                      std::to_string(other.modulus()));
    }

    // Multiplication by sqrt(2) = w^{m/4} - w^{3m/4}, valid for m >= 4.
    static std::vector<Int> times_sqrt2(const std::vector<Int>& coeffs) {
        const unsigned m = static_cast<unsigned>(coeffs.size());
        std::vector<Int> out(m, 0);
        auto add_rotated = [&](unsigned shift, int sign) {
            for (unsigned j = 0; j < m; j++) {
                unsigned idx = j + shift;
                Int val = sign * coeffs[j];
                if (idx < m)
                    out[idx] += val;
                else
                    out[idx - m] -= val;
            }
        };
        add_rotated(m / 4, 1);
        add_rotated(3 * m / 4, -1);
        return out;
    }

    void canonicalize() {
        if (is_zero()) {
            k_ = 0;
            return;
        }
        const unsigned m = modulus();
        if (m < 4) {
            // sqrt(2) is not a ring element; only even powers (factors of 2) reduce.
            while (k_ >= 2) {
                bool even = true;
                for (const Int& c : coeffs_)
                    if (c % 2 != 0) even = false;
                if (!even) break;
                for (Int& c : coeffs_) c /= 2;
                k_ -= 2;
            }
            return;
        }
        while (k_ >= 1) {
            // x is divisible by sqrt(2) iff x*sqrt(2) has all-even coefficients,
            // in which case x/sqrt(2) = (x*sqrt(2))/2.
            std::vector<Int> lifted = times_sqrt2(coeffs_);
            bool even = true;
            for (const Int& c : lifted)
                if (c % 2 != 0) even = false;
            if (!even) break;
            for (Int& c : lifted) c /= 2;
            coeffs_ = std::move(lifted);
            k_ -= 1;
        }
    }

    std::vector<Int> coeffs_;
    unsigned k_;
};

inline std::ostream& operator<<(std::ostream& os, const AlgebraicComplex& value) {
    return os << value.to_string();
}

}  // namespace swta

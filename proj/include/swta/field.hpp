#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <utility>
#include <vector>

#include "swta/errors.hpp"
#include "swta/scalar.hpp"

namespace swta {

using Rat = boost::multiprecision::cpp_rational;

/// Element of the cyclotomic field Q(w), w = e^{i*pi/m}, stored as rational
/// coordinates over the basis {1, w, ..., w^{m-1}}. This is the exact field
/// the verification engine runs Gaussian elimination over; the denominator-free
/// AlgebraicComplex ring stays in automata transitions.
class FieldScalar {
  public:
    FieldScalar() : coeffs_(4, Rat(0)) {}

    explicit FieldScalar(std::vector<Rat> coeffs) : coeffs_(std::move(coeffs)) {
        if (!is_power_of_two(static_cast<unsigned>(coeffs_.size())))
            throw Error(ErrorKind::InvalidScalar, "coefficient count must be a power of two");
    }

    static FieldScalar zero(unsigned m = 4) { return FieldScalar(std::vector<Rat>(m, Rat(0))); }

    static FieldScalar one(unsigned m = 4) {
        std::vector<Rat> coeffs(m, Rat(0));
        coeffs[0] = 1;
        return FieldScalar(std::move(coeffs));
    }

    /// Folds the 1/sqrt(2)^k denominator into rational coordinates via
    /// sqrt(2) = w^{m/4} - w^{3m/4}. Odd k needs m >= 4.
    static FieldScalar embed(const AlgebraicComplex& value) {
        const unsigned m = value.modulus();
        std::vector<Rat> coeffs(m);
        for (unsigned j = 0; j < m; j++) coeffs[j] = Rat(value.coeffs()[j]);
        FieldScalar result(std::move(coeffs));
        unsigned k = value.k();
        if (k % 2 == 1) {
            if (m < 4)
                throw Error(ErrorKind::InvalidScalar, "odd sqrt(2) power is not expressible for m < 4");
            // x / sqrt(2)^k = x * sqrt(2) / 2^{(k+1)/2}
            result = result * sqrt2(m);
            k += 1;
        }
        Int denom = Int(1) << (k / 2);
        for (Rat& c : result.coeffs_) c /= Rat(denom);
        return result;
    }

    static FieldScalar sqrt2(unsigned m) {
        if (m < 4) throw Error(ErrorKind::InvalidScalar, "sqrt(2) requires m >= 4");
        std::vector<Rat> coeffs(m, Rat(0));
        coeffs[m / 4] = 1;
        coeffs[3 * m / 4] = -1;
        return FieldScalar(std::move(coeffs));
    }

    unsigned modulus() const { return static_cast<unsigned>(coeffs_.size()); }
    const std::vector<Rat>& coeffs() const { return coeffs_; }

    bool is_zero() const {
        for (const Rat& c : coeffs_)
            if (c != 0) return false;
        return true;
    }

    bool operator==(const FieldScalar& other) const { return coeffs_ == other.coeffs_; }
    bool operator!=(const FieldScalar& other) const { return !(*this == other); }

    FieldScalar operator+(const FieldScalar& other) const {
        check_same_modulus(other);
        std::vector<Rat> sum(coeffs_.size());
        for (size_t i = 0; i < coeffs_.size(); i++) sum[i] = coeffs_[i] + other.coeffs_[i];
        return FieldScalar(std::move(sum));
    }

    FieldScalar operator-() const {
        std::vector<Rat> neg = coeffs_;
        for (Rat& c : neg) c = -c;
        return FieldScalar(std::move(neg));
    }

    FieldScalar operator-(const FieldScalar& other) const { return *this + (-other); }

    FieldScalar operator*(const FieldScalar& other) const {
        check_same_modulus(other);
        const unsigned m = modulus();
        std::vector<Rat> prod(m, Rat(0));
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
        return FieldScalar(std::move(prod));
    }

    /// Multiplicative inverse, obtained by solving the m-by-m rational system
    /// given by this value's multiplication matrix.
    FieldScalar invert() const {
        if (is_zero()) throw Error(ErrorKind::DivisionByZero, "inverse of zero");
        const unsigned m = modulus();
        // mat[t][j] = coefficient of y_j in (x*y)_t under the w^m = -1 fold.
        std::vector<std::vector<Rat>> mat(m, std::vector<Rat>(m + 1, Rat(0)));
        for (unsigned i = 0; i < m; i++) {
            for (unsigned j = 0; j < m; j++) {
                unsigned idx = i + j;
                if (idx < m)
                    mat[idx][j] += coeffs_[i];
                else
                    mat[idx - m][j] -= coeffs_[i];
            }
        }
        mat[0][m] = 1;  // right-hand side e_0
        for (unsigned col = 0, row = 0; col < m && row < m; col++) {
            unsigned pivot = row;
            while (pivot < m && mat[pivot][col] == 0) pivot++;
            if (pivot == m) continue;
            std::swap(mat[pivot], mat[row]);
            Rat inv = mat[row][col];
            for (unsigned j = col; j <= m; j++) mat[row][j] /= inv;
            for (unsigned r = 0; r < m; r++) {
                if (r == row || mat[r][col] == 0) continue;
                Rat factor = mat[r][col];
                for (unsigned j = col; j <= m; j++) mat[r][j] -= factor * mat[row][j];
            }
            row++;
        }
        std::vector<Rat> result(m);
        for (unsigned j = 0; j < m; j++) result[j] = mat[j][m];
        FieldScalar candidate(std::move(result));
        if (!((*this * candidate) == one(m)))
            throw Error(ErrorKind::DivisionByZero, "multiplication matrix is singular");
        return candidate;
    }

    FieldScalar operator/(const FieldScalar& other) const { return *this * other.invert(); }

    std::complex<double> to_complex() const {
        const unsigned m = modulus();
        std::complex<double> acc(0.0, 0.0);
        constexpr double pi = 3.14159265358979323846;
        for (unsigned j = 0; j < m; j++) {
            if (coeffs_[j] == 0) continue;
            double c = boost::multiprecision::numerator(coeffs_[j]).convert_to<double>() /
                       boost::multiprecision::denominator(coeffs_[j]).convert_to<double>();
            acc += c * std::polar(1.0, pi * static_cast<double>(j) / static_cast<double>(m));
        }
        return acc;
    }

  private:
    void check_same_modulus(const FieldScalar& other) const {
        if (modulus() != other.modulus())
            throw Error(ErrorKind::InvalidScalar, "mixed moduli in field arithmetic");
    }

    std::vector<Rat> coeffs_;
};

/// Sparse vector over the cyclotomic field, indexed by automaton state.
using SparseVec = std::vector<std::pair<uint32_t, FieldScalar>>;  // sorted by index, nonzero entries

inline SparseVec sparse_normalize(SparseVec vec) {
    SparseVec out;
    out.reserve(vec.size());
    for (auto& [idx, val] : vec)
        if (!val.is_zero()) out.emplace_back(idx, std::move(val));
    return out;
}

inline void sparse_add_scaled(SparseVec& target, const SparseVec& addend, const FieldScalar& factor) {
    SparseVec merged;
    merged.reserve(target.size() + addend.size());
    size_t i = 0, j = 0;
    while (i < target.size() || j < addend.size()) {
        if (j == addend.size() || (i < target.size() && target[i].first < addend[j].first)) {
            merged.push_back(std::move(target[i++]));
        } else if (i == target.size() || addend[j].first < target[i].first) {
            FieldScalar val = addend[j].second * factor;
            if (!val.is_zero()) merged.emplace_back(addend[j].first, std::move(val));
            j++;
        } else {
            FieldScalar val = target[i].second + addend[j].second * factor;
            if (!val.is_zero()) merged.emplace_back(target[i].first, std::move(val));
            i++;
            j++;
        }
    }
    target = std::move(merged);
}

/// Row-echelon basis of sparse field vectors with unit pivots. Collects the
/// linearly independent vectors reaching a state during the zero-invariant
/// fixpoint; never grows beyond the ambient dimension.
class Basis {
  public:
    explicit Basis(size_t dimension) : dimension_(dimension) {}

    size_t dimension() const { return dimension_; }
    size_t size() const { return rows_.size(); }
    const std::vector<SparseVec>& rows() const { return rows_; }

    /// Reduces `vec` against the basis; inserts the residual if independent.
    /// Returns true when the vector enlarged the span.
    bool insert(SparseVec vec) {
        for (auto& [idx, val] : vec)
            if (idx >= dimension_) throw Error(ErrorKind::InvalidVector, "index exceeds basis dimension");
        for (size_t r = 0; r < rows_.size(); r++) {
            if (vec.empty()) break;
            uint32_t pivot = rows_[r].front().first;
            const FieldScalar* coef = lookup(vec, pivot);
            if (coef != nullptr && !coef->is_zero()) {
                FieldScalar factor = -*coef;
                sparse_add_scaled(vec, rows_[r], factor);
            }
        }
        if (vec.empty()) return false;
        FieldScalar inv = vec.front().second.invert();
        for (auto& [idx, val] : vec) val = val * inv;
        // Keep rows ordered by pivot so elimination stays one pass.
        size_t pos = 0;
        while (pos < rows_.size() && rows_[pos].front().first < vec.front().first) pos++;
        rows_.insert(rows_.begin() + static_cast<long>(pos), std::move(vec));
        return true;
    }

  private:
    static const FieldScalar* lookup(const SparseVec& vec, uint32_t idx) {
        for (auto& [i, val] : vec)
            if (i == idx) return &val;
        return nullptr;
    }

    size_t dimension_;
    std::vector<SparseVec> rows_;
};

}  // namespace swta

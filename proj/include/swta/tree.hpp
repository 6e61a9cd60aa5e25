#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "swta/errors.hpp"
#include "swta/scalar.hpp"

namespace swta {

/// Perfect binary tree encoding one quantum state: one symbol per level and a
/// dense row of 2^h leaf amplitudes, read left to right as the state vector.
class PerfectTree {
  public:
    PerfectTree(std::vector<std::string> level_labels, std::vector<AlgebraicComplex> leaves)
        : labels_(std::move(level_labels)), leaves_(std::move(leaves)) {
        if (leaves_.empty() || (leaves_.size() & (leaves_.size() - 1)) != 0)
            throw Error(ErrorKind::Incompatible, "leaf count must be a power of two");
        size_t h = 0;
        while ((size_t(1) << h) < leaves_.size()) h++;
        if (labels_.size() != h)
            throw Error(ErrorKind::Incompatible, "label count does not match tree height");
    }

    static PerfectTree leaf(AlgebraicComplex value) {
        return PerfectTree({}, {std::move(value)});
    }

    static PerfectTree cons(const std::string& label, const PerfectTree& left, const PerfectTree& right) {
        if (left.height() != right.height() || left.labels_ != right.labels_)
            throw Error(ErrorKind::Incompatible, "cons of incompatible subtrees");
        std::vector<std::string> labels;
        labels.reserve(left.labels_.size() + 1);
        labels.push_back(label);
        labels.insert(labels.end(), left.labels_.begin(), left.labels_.end());
        std::vector<AlgebraicComplex> leaves;
        leaves.reserve(left.leaves_.size() * 2);
        leaves.insert(leaves.end(), left.leaves_.begin(), left.leaves_.end());
        leaves.insert(leaves.end(), right.leaves_.begin(), right.leaves_.end());
        return PerfectTree(std::move(labels), std::move(leaves));
    }

    size_t height() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<AlgebraicComplex>& leaves() const { return leaves_; }

    bool compatible_with(const PerfectTree& other) const {
        return labels_ == other.labels_;
    }

    bool operator==(const PerfectTree& other) const {
        return labels_ == other.labels_ && leaves_ == other.leaves_;
    }
    bool operator!=(const PerfectTree& other) const { return !(*this == other); }

    /// Subtree rooted at the branch word `path` (string over '0'/'1').
    PerfectTree subtree(const std::string& path) const {
        if (path.size() > height()) throw Error(ErrorKind::PositionError, "branch word below the leaves");
        for (char c : path)
            if (c != '0' && c != '1') throw Error(ErrorKind::PositionError, "branch word must be binary");
        size_t prefix = 0;
        for (char c : path) prefix = prefix * 2 + (c == '1' ? 1 : 0);
        size_t sub_height = height() - path.size();
        size_t width = size_t(1) << sub_height;
        std::vector<std::string> labels(labels_.begin() + static_cast<long>(path.size()), labels_.end());
        std::vector<AlgebraicComplex> leaves(leaves_.begin() + static_cast<long>(prefix * width),
                                             leaves_.begin() + static_cast<long>((prefix + 1) * width));
        return PerfectTree(std::move(labels), std::move(leaves));
    }

    std::string to_string() const {
        std::ostringstream out;
        out << "tree h=" << height() << " labels=";
        for (size_t i = 0; i < labels_.size(); i++) {
            if (i) out << ",";
            out << labels_[i];
        }
        out << " leaves=[";
        for (size_t i = 0; i < leaves_.size(); i++) {
            if (i) out << ",";
            out << leaves_[i].to_string();
        }
        out << "]";
        return out.str();
    }

  private:
    std::vector<std::string> labels_;
    std::vector<AlgebraicComplex> leaves_;
};

/// Linear combination of compatible trees: sum a_i * t_i. All internal labels
/// must coincide; leaves are the scaled sums. The paper's bottom result for
/// incompatible operands is reported as an Incompatible error.
inline PerfectTree combine(const std::vector<std::pair<AlgebraicComplex, PerfectTree>>& terms) {
    if (terms.empty()) throw Error(ErrorKind::Incompatible, "combine of an empty term list");
    const PerfectTree& first = terms.front().second;
    for (const auto& [coef, tree] : terms)
        if (!tree.compatible_with(first))
            throw Error(ErrorKind::Incompatible, "combine of incompatible trees");
    std::vector<AlgebraicComplex> leaves(first.leaves().size(), AlgebraicComplex::zero(first.leaves()[0].modulus()));
    for (const auto& [coef, tree] : terms)
        for (size_t i = 0; i < leaves.size(); i++) leaves[i] = leaves[i] + coef * tree.leaves()[i];
    return PerfectTree(first.labels(), std::move(leaves));
}

inline std::ostream& operator<<(std::ostream& os, const PerfectTree& tree) {
    return os << tree.to_string();
}

}  // namespace swta

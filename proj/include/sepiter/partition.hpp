#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sepiter/tensor_core.hpp"

namespace sepiter {

/// Grouping of elementary subsystems into parties. Indices are 0-based
/// internally; the text form `1,2|3,4` is 1-based.
class Partition {
  public:
    /// Throws StructuralError unless groups are nonempty, disjoint and cover
    /// {0,...,K-1} for K = total member count.
    explicit Partition(std::vector<std::vector<int>> groups);

    /// One party per subsystem, {1}:{2}:...:{K}.
    static Partition finest(std::size_t subsystems);

    static Partition parse(std::string_view text);

    [[nodiscard]] const std::vector<std::vector<int>>& groups() const { return groups_; }
    [[nodiscard]] std::size_t parties() const { return groups_.size(); }
    [[nodiscard]] std::size_t subsystems() const { return subsystems_; }

    /// Concatenation of the groups: slot order after regrouping.
    [[nodiscard]] std::vector<int> order() const;
    [[nodiscard]] bool is_contiguous() const;

    /// `1,2|3,4`
    [[nodiscard]] std::string to_string() const;

    bool operator==(const Partition& other) const { return groups_ == other.groups_; }

  private:
    std::vector<std::vector<int>> groups_;
    std::size_t subsystems_ = 0;
};

struct CoarseGrained {
    MultipartiteOperator op;
    /// Elementary slot order applied before grouping; identity for contiguous partitions.
    std::vector<int> permutation;
};

/// Regroups an operator so each group of the partition becomes one party.
CoarseGrained coarse_grain(const MultipartiteOperator& op, const Partition& partition);

/// Same reindexing for a bare matrix on the elementary dims.
Matrix coarse_grain_matrix(const Matrix& m, const SubsystemDims& dims, const Partition& partition);

/// Dims of the parties after grouping.
SubsystemDims grouped_dims(const SubsystemDims& dims, const Partition& partition);

/// All set partitions of K subsystems (K <= 6), groups ordered by their
/// smallest member.
std::vector<Partition> enumerate_partitions(std::size_t subsystems);

}  // namespace sepiter

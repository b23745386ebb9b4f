#include "sepiter/partition.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

namespace sepiter {

Partition::Partition(std::vector<std::vector<int>> groups) : groups_(std::move(groups)) {
    if (groups_.empty()) throw StructuralError("Partition: no groups");
    std::vector<int> all;
    for (const auto& g : groups_) {
        if (g.empty()) throw StructuralError("Partition: empty group");
        all.insert(all.end(), g.begin(), g.end());
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i] != static_cast<int>(i))
            throw StructuralError("Partition: groups must be disjoint and cover subsystems 1.." +
                                  std::to_string(all.size()));
    }
    subsystems_ = all.size();
}

Partition Partition::finest(std::size_t subsystems) {
    std::vector<std::vector<int>> g(subsystems);
    for (std::size_t i = 0; i < subsystems; ++i) g[i] = {static_cast<int>(i)};
    return Partition(std::move(g));
}

Partition Partition::parse(std::string_view text) {
    std::vector<std::vector<int>> groups(1);
    const char* p = text.data();
    const char* end = p + text.size();
    bool expect_number = true;
    while (p < end) {
        if (*p == ' ') {
            ++p;
        } else if (*p == '|' || *p == ',') {
            if (expect_number) throw StructuralError("Partition: malformed text '" + std::string(text) + "'");
            if (*p == '|') groups.emplace_back();
            expect_number = true;
            ++p;
        } else {
            int value = 0;
            auto [next, ec] = std::from_chars(p, end, value);
            if (ec != std::errc() || !expect_number)
                throw StructuralError("Partition: malformed text '" + std::string(text) + "'");
            if (value < 1) throw StructuralError("Partition: indices are 1-based");
            groups.back().push_back(value - 1);
            expect_number = false;
            p = next;
        }
    }
    if (expect_number) throw StructuralError("Partition: malformed text '" + std::string(text) + "'");
    return Partition(std::move(groups));
}

std::vector<int> Partition::order() const {
    std::vector<int> out;
    out.reserve(subsystems_);
    for (const auto& g : groups_) out.insert(out.end(), g.begin(), g.end());
    return out;
}

bool Partition::is_contiguous() const {
    const auto o = order();
    for (std::size_t i = 0; i < o.size(); ++i)
        if (o[i] != static_cast<int>(i)) return false;
    return true;
}

std::string Partition::to_string() const {
    std::string s;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        if (g) s += '|';
        for (std::size_t i = 0; i < groups_[g].size(); ++i) {
            if (i) s += ',';
            s += std::to_string(groups_[g][i] + 1);
        }
    }
    return s;
}

SubsystemDims grouped_dims(const SubsystemDims& dims, const Partition& partition) {
    if (partition.subsystems() != dims.parties())
        throw StructuralError("partition covers " + std::to_string(partition.subsystems()) +
                              " subsystems but dims " + dims.to_string() + " has " +
                              std::to_string(dims.parties()));
    std::vector<int> out;
    for (const auto& g : partition.groups()) {
        int d = 1;
        for (int i : g) d *= dims[i];
        out.push_back(d);
    }
    return SubsystemDims(std::move(out));
}

Matrix coarse_grain_matrix(const Matrix& m, const SubsystemDims& dims, const Partition& partition) {
    (void)grouped_dims(dims, partition);
    if (partition.is_contiguous()) return m;
    const auto order = partition.order();
    return permute_subsystems(m, dims, order);
}

CoarseGrained coarse_grain(const MultipartiteOperator& op, const Partition& partition) {
    const SubsystemDims out_dims = grouped_dims(op.dims(), partition);
    auto order = partition.order();
    Matrix m = partition.is_contiguous() ? op.matrix() : permute_subsystems(op.matrix(), op.dims(), order);
    return {MultipartiteOperator(std::move(m), out_dims), std::move(order)};
}

std::vector<Partition> enumerate_partitions(std::size_t subsystems) {
    if (subsystems < 1 || subsystems > 6)
        throw DomainError("enumerate_partitions: supported for 1..6 subsystems");
    // restricted growth strings
    std::vector<Partition> out;
    std::vector<int> rgs(subsystems, 0);
    while (true) {
        const int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<std::vector<int>> groups(blocks);
        for (std::size_t i = 0; i < subsystems; ++i) groups[rgs[i]].push_back(static_cast<int>(i));
        out.emplace_back(std::move(groups));

        std::size_t i = subsystems;
        while (--i > 0) {
            const int prefix_max = *std::max_element(rgs.begin(), rgs.begin() + i);
            if (rgs[i] <= prefix_max) {
                ++rgs[i];
                std::fill(rgs.begin() + i + 1, rgs.end(), 0);
                break;
            }
        }
        if (i == 0) break;
    }
    return out;
}

}  // namespace sepiter

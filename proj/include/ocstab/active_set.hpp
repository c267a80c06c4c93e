#ifndef OCSTAB_ACTIVE_SET_HPP
#define OCSTAB_ACTIVE_SET_HPP

#include <cstdint>
#include <vector>

namespace ocstab {

/// Disjoint cover of the interior nodes: lower-active (I1), strictly
/// inactive (I2), upper-active (I3).
struct ActiveSetPartition {
    std::vector<int> lower, inactive, upper;
    std::vector<int8_t> mask;  // per node: 1, 2 or 3
    double tolerance_used = 0.0;

    bool is_lower(int i) const { return mask[static_cast<size_t>(i)] == 1; }
    bool is_inactive(int i) const { return mask[static_cast<size_t>(i)] == 2; }
    bool is_upper(int i) const { return mask[static_cast<size_t>(i)] == 3; }
};

}  // namespace ocstab

#endif

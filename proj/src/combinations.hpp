#pragma once

#include <cstddef>
#include <vector>

namespace caussearch::detail {

/// Calls f on every size-k subset of `items` in lexicographic index order;
/// stops early when f returns true. Returns whether f stopped it.
template <typename F>
bool for_each_subset(const std::vector<int>& items, std::size_t k, F&& f) {
    const std::size_t n = items.size();
    if (k > n) return false;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<int> subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
        if (f(subset)) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// Calls f on every subset of `items` (all sizes, smallest first).
template <typename F>
bool for_each_powerset(const std::vector<int>& items, F&& f) {
    for (std::size_t k = 0; k <= items.size(); ++k) {
        if (for_each_subset(items, k, f)) return true;
    }
    return false;
}

} // namespace caussearch::detail

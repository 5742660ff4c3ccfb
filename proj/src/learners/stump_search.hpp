#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "stackline/matrix.hpp"

namespace stackline::detail {

/// Per-feature row orderings, sorted once and reused by every boosting round.
class SortedColumns {
public:
    explicit SortedColumns(const Matrix& x) : x_(x), order_(x.cols()) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            auto& idx = order_[j];
            idx.resize(x.rows());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::stable_sort(idx.begin(), idx.end(),
                             [&](std::size_t a, std::size_t b) { return x(a, j) < x(b, j); });
        }
    }

    const Matrix& x() const { return x_; }
    const std::vector<std::size_t>& order(std::size_t feature) const { return order_[feature]; }
    std::size_t features() const { return order_.size(); }

private:
    const Matrix& x_;
    std::vector<std::vector<std::size_t>> order_;
};

/// Midpoint strictly below `hi` so that `hi > threshold` holds even for adjacent doubles.
inline double split_point(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return mid < hi ? mid : lo;
}

/// Calls visit(feature, threshold, position) for every distinct split, where
/// position is the count of rows at or below the threshold in that feature's order.
template <typename OnRow, typename OnSplit>
void sweep_splits(const SortedColumns& cols, OnRow on_row, OnSplit on_split) {
    const Matrix& x = cols.x();
    for (std::size_t j = 0; j < cols.features(); ++j) {
        const auto& idx = cols.order(j);
        on_row(j, std::size_t{0}, /*reset=*/true);
        for (std::size_t p = 0; p + 1 < idx.size(); ++p) {
            on_row(j, idx[p], false);
            const double lo = x(idx[p], j);
            const double hi = x(idx[p + 1], j);
            if (lo < hi) on_split(j, split_point(lo, hi), p + 1);
        }
    }
}

}  // namespace stackline::detail

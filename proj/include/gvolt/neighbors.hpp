#pragma once

#include "gvolt/manifold.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace gvolt {

/// Uniform cell grid over the first min(d, 3) coordinates of a point set.
///
/// Exact for fixed-radius queries: two points within distance r in R^d are
/// within r in any coordinate projection, so scanning the cells covering the
/// projected query box never misses a neighbor. The caller does the full
/// d-dimensional distance test.
class GridIndex {
public:
    GridIndex(const RowMatrix& points, double cell_size);

    /// Calls `fn(j, dist)` for every indexed point j with ||x_j - q|| <= radius,
    /// in unspecified order.
    template <class Fn>
    void for_each_within(std::span<const double> q, double radius, Fn&& fn) const;

    [[nodiscard]] double cell_size() const { return cell_; }

private:
    using Key = std::array<std::int64_t, 3>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            std::uint64_t h = 1469598103934665603ull;
            for (auto c : k) {
                h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            }
            return static_cast<std::size_t>(h);
        }
    };

    [[nodiscard]] std::int64_t coord(double x) const {
        return static_cast<std::int64_t>(std::floor(x / cell_));
    }

    const RowMatrix* points_;
    double cell_;
    int grid_dims_;
    std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> cells_;
};

template <class Fn>
void GridIndex::for_each_within(std::span<const double> q, double radius, Fn&& fn) const {
    const auto d = static_cast<std::size_t>(points_->cols());
    Key lo{0, 0, 0}, hi{0, 0, 0};
    for (int k = 0; k < grid_dims_; ++k) {
        lo[k] = coord(q[k] - radius);
        hi[k] = coord(q[k] + radius);
    }
    const double r2 = radius * radius;
    Key key{0, 0, 0};
    for (key[0] = lo[0]; key[0] <= hi[0]; ++key[0]) {
        for (key[1] = lo[1]; key[1] <= hi[1]; ++key[1]) {
            for (key[2] = lo[2]; key[2] <= hi[2]; ++key[2]) {
                auto it = cells_.find(key);
                if (it == cells_.end()) continue;
                for (std::uint32_t j : it->second) {
                    const double* p = points_->data() + static_cast<std::size_t>(j) * d;
                    double s = 0.0;
                    for (std::size_t c = 0; c < d; ++c) {
                        const double diff = p[c] - q[c];
                        s += diff * diff;
                    }
                    // cheap squared reject, exact test on the distance itself
                    if (s > r2 * (1.0 + 1e-12)) continue;
                    const double dist = std::sqrt(s);
                    if (dist <= radius) fn(j, dist);
                }
            }
        }
    }
}

}  // namespace gvolt

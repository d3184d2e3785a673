#include "gvolt/neighbors.hpp"

#include "gvolt/errors.hpp"

#include <algorithm>

namespace gvolt {

GridIndex::GridIndex(const RowMatrix& points, double cell_size)
    : points_(&points), cell_(cell_size), grid_dims_(std::min<int>(3, static_cast<int>(points.cols()))) {
    if (!(cell_size > 0.0)) throw ValidationError("grid cell size must be positive");
    const auto n = static_cast<std::size_t>(points.rows());
    for (std::size_t i = 0; i < n; ++i) {
        Key key{0, 0, 0};
        for (int k = 0; k < grid_dims_; ++k) key[k] = coord(points(static_cast<Eigen::Index>(i), k));
        cells_[key].push_back(static_cast<std::uint32_t>(i));
    }
}

}  // namespace gvolt

#pragma once

// Uniform-grid bounding-box filter. Items are registered in every cell
// their box spans; a query returns the sorted ids of items whose boxes
// meet the query box, never more precise than box overlap.

#include <cstddef>
#include <vector>

#include "scqa/geometry.hpp"

namespace scqa {

class GridIndex {
 public:
  GridIndex() = default;
  /// Empty boxes (std::nullopt semantics) are passed as `present = false`.
  explicit GridIndex(const std::vector<geom::Box>& boxes,
                     const std::vector<bool>& present = {});

  /// Ids of present items whose box meets `query` expanded by `slack`.
  std::vector<std::size_t> query(const geom::Box& query, double slack = 0.0) const;
  std::size_t size() const noexcept { return boxes_.size(); }

 private:
  std::pair<int, int> cell_range_x(double lo, double hi) const;
  std::pair<int, int> cell_range_y(double lo, double hi) const;

  std::vector<geom::Box> boxes_;
  std::vector<bool> present_;
  double x0_ = 0, y0_ = 0, cw_ = 1, ch_ = 1;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace scqa

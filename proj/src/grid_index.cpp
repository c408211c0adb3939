#include "scqa/grid_index.hpp"

#include <algorithm>
#include <cmath>

namespace scqa {

GridIndex::GridIndex(const std::vector<geom::Box>& boxes, const std::vector<bool>& present)
    : boxes_(boxes), present_(present) {
  if (present_.empty()) present_.assign(boxes_.size(), true);
  bool any = false;
  geom::Box extent;
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    if (!present_[i]) continue;
    if (!any)
      extent = boxes_[i];
    else
      boost::geometry::expand(extent, boxes_[i]);
    any = true;
  }
  if (!any) return;
  const int side = std::clamp(static_cast<int>(std::ceil(std::sqrt(static_cast<double>(boxes_.size())))), 1, 1024);
  x0_ = extent.min_corner().x();
  y0_ = extent.min_corner().y();
  const double w = extent.max_corner().x() - x0_;
  const double h = extent.max_corner().y() - y0_;
  nx_ = w > 0 ? side : 1;
  ny_ = h > 0 ? side : 1;
  cw_ = w > 0 ? w / nx_ : 1.0;
  ch_ = h > 0 ? h / ny_ : 1.0;
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    if (!present_[i]) continue;
    const auto [ix0, ix1] = cell_range_x(boxes_[i].min_corner().x(), boxes_[i].max_corner().x());
    const auto [iy0, iy1] = cell_range_y(boxes_[i].min_corner().y(), boxes_[i].max_corner().y());
    for (int y = iy0; y <= iy1; ++y)
      for (int x = ix0; x <= ix1; ++x) cells_[static_cast<std::size_t>(y) * nx_ + x].push_back(i);
  }
}

std::pair<int, int> GridIndex::cell_range_x(double lo, double hi) const {
  int a = static_cast<int>(std::floor((lo - x0_) / cw_));
  int b = static_cast<int>(std::floor((hi - x0_) / cw_));
  return {std::clamp(a, 0, nx_ - 1), std::clamp(b, 0, nx_ - 1)};
}

std::pair<int, int> GridIndex::cell_range_y(double lo, double hi) const {
  int a = static_cast<int>(std::floor((lo - y0_) / ch_));
  int b = static_cast<int>(std::floor((hi - y0_) / ch_));
  return {std::clamp(a, 0, ny_ - 1), std::clamp(b, 0, ny_ - 1)};
}

std::vector<std::size_t> GridIndex::query(const geom::Box& q, double slack) const {
  std::vector<std::size_t> out;
  if (cells_.empty()) return out;
  const double qx0 = q.min_corner().x() - slack, qx1 = q.max_corner().x() + slack;
  const double qy0 = q.min_corner().y() - slack, qy1 = q.max_corner().y() + slack;
  const auto [ix0, ix1] = cell_range_x(qx0, qx1);
  const auto [iy0, iy1] = cell_range_y(qy0, qy1);
  for (int y = iy0; y <= iy1; ++y)
    for (int x = ix0; x <= ix1; ++x)
      for (std::size_t i : cells_[static_cast<std::size_t>(y) * nx_ + x])
        if (geom::boxes_intersect(boxes_[i], q, slack)) out.push_back(i);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace scqa

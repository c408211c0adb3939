#include "scqa/raster_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace scqa::geom {

namespace {

enum Cell : std::uint8_t { kExterior = 0, kInterior = 1, kBoundary = 2 };

struct Grid {
  double x0, y0, cx, cy;
  int n;
};

struct Edge {
  double ax, ay, bx, by;
};

std::vector<Edge> edges_of(const Region& g) {
  std::vector<Edge> out;
  auto add = [&](const Ring& r) {
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
      out.push_back({r[i].x(), r[i].y(), r[i + 1].x(), r[i + 1].y()});
  };
  for (const auto& p : g.polygons()) {
    add(p.outer());
    for (const auto& h : p.inners()) add(h);
  }
  return out;
}

// Indices of the closed cells [lo + k*c, lo + (k+1)*c] meeting [a, b].
std::pair<int, int> cell_span(double a, double b, double lo, double c, int n) {
  int first = static_cast<int>(std::ceil((a - lo) / c - 1.0));
  int last = static_cast<int>(std::floor((b - lo) / c));
  return {std::max(first, 0), std::min(last, n - 1)};
}

std::vector<std::uint8_t> rasterize(const Region& g, const Grid& grid) {
  const int n = grid.n;
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(n) * n, kExterior);
  const auto edges = edges_of(g);

  for (const auto& e : edges) {
    const double xa = std::min(e.ax, e.bx), xb = std::max(e.ax, e.bx);
    const auto [ilo, ihi] = cell_span(xa, xb, grid.x0, grid.cx, n);
    for (int i = ilo; i <= ihi; ++i) {
      const double cx0 = std::max(xa, grid.x0 + i * grid.cx);
      const double cx1 = std::min(xb, grid.x0 + (i + 1) * grid.cx);
      double ya, yb;
      if (e.bx == e.ax) {
        ya = std::min(e.ay, e.by);
        yb = std::max(e.ay, e.by);
      } else {
        const double slope = (e.by - e.ay) / (e.bx - e.ax);
        const double y1 = e.ay + (cx0 - e.ax) * slope;
        const double y2 = e.ay + (cx1 - e.ax) * slope;
        ya = std::min(y1, y2);
        yb = std::max(y1, y2);
      }
      const auto [jlo, jhi] = cell_span(ya, yb, grid.y0, grid.cy, n);
      for (int j = jlo; j <= jhi; ++j) cells[static_cast<std::size_t>(j) * n + i] = kBoundary;
    }
  }

  // Crossing-number fill along each row of cell centers.
  std::vector<double> xs;
  for (int j = 0; j < n; ++j) {
    const double y = grid.y0 + (j + 0.5) * grid.cy;
    xs.clear();
    for (const auto& e : edges) {
      if ((e.ay > y) == (e.by > y)) continue;
      xs.push_back(e.ax + (y - e.ay) * (e.bx - e.ax) / (e.by - e.ay));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Centers strictly between the crossings.
      int ifirst = static_cast<int>(std::floor((xs[k] - grid.x0) / grid.cx - 0.5)) + 1;
      int ilast = static_cast<int>(std::ceil((xs[k + 1] - grid.x0) / grid.cx - 0.5)) - 1;
      ifirst = std::max(ifirst, 0);
      ilast = std::min(ilast, n - 1);
      for (int i = ifirst; i <= ilast; ++i) {
        auto& c = cells[static_cast<std::size_t>(j) * n + i];
        if (c != kBoundary) c = kInterior;
      }
    }
  }
  return cells;
}

void require_resolved(const Region& g, const Grid& grid) {
  const Box& b = g.bbox();
  const double w = b.max_corner().x() - b.min_corner().x();
  const double h = b.max_corner().y() - b.min_corner().y();
  if (w < 4 * grid.cx || h < 4 * grid.cy)
    throw GeometryError("raster resolution too coarse for the input features");
}

}  // namespace

FourIntersection four_intersection_oracle(const Region& g1, const Region& g2, int resolution) {
  if (g1.empty() || g2.empty())
    throw GeometryError("four_intersection_oracle is undefined for the empty geometry");
  if (resolution < 8) throw GeometryError("raster resolution must be at least 8");
  Box box = g1.bbox();
  boost::geometry::expand(box, g2.bbox());
  double w = box.max_corner().x() - box.min_corner().x();
  double h = box.max_corner().y() - box.min_corner().y();
  const double pad_x = 0.02 * w, pad_y = 0.02 * h;
  Grid grid{box.min_corner().x() - pad_x, box.min_corner().y() - pad_y,
            (w + 2 * pad_x) / resolution, (h + 2 * pad_y) / resolution, resolution};
  require_resolved(g1, grid);
  require_resolved(g2, grid);

  const auto c1 = rasterize(g1, grid);
  const auto c2 = rasterize(g2, grid);
  FourIntersection fi;
  for (std::size_t k = 0; k < c1.size(); ++k) {
    fi.boundary_boundary |= c1[k] == kBoundary && c2[k] == kBoundary;
    fi.interior_interior |= c1[k] == kInterior && c2[k] == kInterior;
    fi.boundary_interior |= c1[k] == kBoundary && c2[k] == kInterior;
    fi.interior_boundary |= c1[k] == kInterior && c2[k] == kBoundary;
  }
  return fi;
}

bool topo_oracle(Predicate t, const Region& g1, const Region& g2, int resolution) {
  if (g1.empty() || g2.empty()) return false;
  return holds(t, classify(four_intersection_oracle(g1, g2, resolution)));
}

}  // namespace scqa::geom

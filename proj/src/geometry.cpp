#include "scqa/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include <boost/container_hash/hash.hpp>

namespace bg = boost::geometry;

namespace scqa::geom {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double dist(const Point& a, const Point& b) {
  return std::hypot(a.x() - b.x(), a.y() - b.y());
}

bool point_less(const Point& a, const Point& b) {
  return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

// Distance from p to the line through a and b (or to a if a == b).
double line_distance(const Point& p, const Point& a, const Point& b) {
  const double len = dist(a, b);
  if (len == 0.0) return dist(p, a);
  return std::abs(cross(a, b, p)) / len;
}

// Drops near-duplicate, collinear and spike vertices. Returns an open
// vertex list; fewer than three vertices means the ring degenerated.
std::vector<Point> clean_ring(const Ring& ring, double eps_len) {
  std::vector<Point> pts(ring.begin(), ring.end());
  if (pts.size() > 1 && bg::equals(pts.front(), pts.back())) pts.pop_back();
  bool changed = true;
  while (changed && pts.size() >= 3) {
    changed = false;
    std::vector<Point> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
      if (!out.empty() && dist(out.back(), p) <= eps_len) {
        changed = true;
        continue;
      }
      out.push_back(p);
    }
    while (out.size() > 1 && dist(out.front(), out.back()) <= eps_len) {
      out.pop_back();
      changed = true;
    }
    pts.swap(out);
    if (pts.size() < 3) break;
    out.clear();
    const std::size_t n = pts.size();
    std::vector<bool> keep(n, true);
    for (std::size_t i = 0; i < n; ++i) {
      // Skip neighbours already removed in this pass so removals never
      // cascade inconsistently.
      std::size_t prev = (i + n - 1) % n;
      while (!keep[prev] && prev != i) prev = (prev + n - 1) % n;
      const std::size_t next = (i + 1) % n;
      if (prev == i || prev == next) continue;
      if (line_distance(pts[i], pts[prev], pts[next]) <= eps_len) {
        keep[i] = false;
        changed = true;
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      if (keep[i]) out.push_back(pts[i]);
    pts.swap(out);
  }
  if (pts.size() < 3) pts.clear();
  return pts;
}

Ring make_ring(std::vector<Point> pts) {
  auto it = std::min_element(pts.begin(), pts.end(), point_less);
  std::rotate(pts.begin(), it, pts.end());
  Ring r(pts.begin(), pts.end());
  r.push_back(r.front());
  return r;
}

// Rotates every ring so it starts at its lexicographically smallest vertex.
void canonicalize(MultiPolygon& mp) {
  auto rotate_ring = [](Ring& r) {
    if (r.size() < 2) return;
    std::vector<Point> pts(r.begin(), r.end() - 1);
    r = make_ring(std::move(pts));
  };
  for (auto& poly : mp) {
    rotate_ring(poly.outer());
    for (auto& h : poly.inners()) rotate_ring(h);
    std::sort(poly.inners().begin(), poly.inners().end(),
              [](const Ring& a, const Ring& b) {
                return point_less(a.front(), b.front());
              });
  }
  std::sort(mp.begin(), mp.end(), [](const Polygon& a, const Polygon& b) {
    return point_less(a.outer().front(), b.outer().front());
  });
}

MultiPolygon regularize(const MultiPolygon& in, const GeometryConfig& cfg) {
  MultiPolygon out;
  for (const auto& poly : in) {
    auto outer = clean_ring(poly.outer(), cfg.eps_len);
    if (outer.empty()) continue;
    Polygon p;
    p.outer() = make_ring(std::move(outer));
    if (std::abs(bg::area(p.outer())) <= cfg.eps_area) continue;
    for (const auto& h : poly.inners()) {
      auto hole = clean_ring(h, cfg.eps_len);
      if (hole.empty()) continue;
      Ring hr = make_ring(std::move(hole));
      if (std::abs(bg::area(hr)) <= cfg.eps_area) continue;
      p.inners().push_back(std::move(hr));
    }
    bg::correct(p);
    if (bg::area(p) <= cfg.eps_area) continue;
    out.push_back(std::move(p));
  }
  canonicalize(out);
  return out;
}

double raw_area(const MultiPolygon& mp) { return mp.empty() ? 0.0 : bg::area(mp); }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

template <typename Op>
MultiPolygon run_overlay(const char* what, Op&& op) {
  MultiPolygon out;
  try {
    op(out);
  } catch (const bg::exception& e) {
    throw GeometryError(std::string(what) + " failed: " + e.what());
  }
  return out;
}

struct Segment {
  Point a, b;
};

void collect_segments(const Region& g, std::vector<Segment>& out) {
  auto add = [&](const Ring& r) {
    for (std::size_t i = 0; i + 1 < r.size(); ++i) out.push_back({r[i], r[i + 1]});
  };
  for (const auto& poly : g.polygons()) {
    add(poly.outer());
    for (const auto& h : poly.inners()) add(h);
  }
}

double point_segment_distance(const Point& p, const Segment& s) {
  const double dx = s.b.x() - s.a.x();
  const double dy = s.b.y() - s.a.y();
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return dist(p, s.a);
  double t = ((p.x() - s.a.x()) * dx + (p.y() - s.a.y()) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x() - (s.a.x() + t * dx), p.y() - (s.a.y() + t * dy));
}

int sign(double v) { return (v > 0) - (v < 0); }

bool segments_cross(const Segment& s, const Segment& t) {
  const int d1 = sign(cross(t.a, t.b, s.a));
  const int d2 = sign(cross(t.a, t.b, s.b));
  const int d3 = sign(cross(s.a, s.b, t.a));
  const int d4 = sign(cross(s.a, s.b, t.b));
  return d1 * d2 < 0 && d3 * d4 < 0;
}

double segment_distance(const Segment& s, const Segment& t) {
  if (segments_cross(s, t)) return 0.0;
  return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t),
                   point_segment_distance(t.a, s), point_segment_distance(t.b, s)});
}

// Minimum boundary distance, stopping early once it drops to stop_at.
double boundary_distance_until(const Region& a, const Region& b, double stop_at) {
  std::vector<Segment> sa, sb;
  collect_segments(a, sa);
  collect_segments(b, sb);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : sa) {
    const double sx0 = std::min(s.a.x(), s.b.x()), sx1 = std::max(s.a.x(), s.b.x());
    const double sy0 = std::min(s.a.y(), s.b.y()), sy1 = std::max(s.a.y(), s.b.y());
    for (const auto& t : sb) {
      const double tx0 = std::min(t.a.x(), t.b.x()), tx1 = std::max(t.a.x(), t.b.x());
      const double ty0 = std::min(t.a.y(), t.b.y()), ty1 = std::max(t.a.y(), t.b.y());
      const double gx = std::max({0.0, tx0 - sx1, sx0 - tx1});
      const double gy = std::max({0.0, ty0 - sy1, sy0 - ty1});
      if (std::hypot(gx, gy) >= best) continue;
      best = std::min(best, segment_distance(s, t));
      if (best <= stop_at) return best;
    }
  }
  return best;
}

// True when some component P of `whole` is partially covered by `other`:
// area(P ∩ other) and area(P \ other) both exceed eps. For a connected
// interior this is exactly ∂other ∩ ∘P ≠ ∅.
bool partially_covered(const Region& whole, const Region& other, double inter_area,
                       const GeometryConfig& cfg) {
  if (whole.polygon_count() == 1) {
    return inter_area > cfg.eps_area && area(whole) - inter_area > cfg.eps_area;
  }
  for (const auto& poly : whole.polygons()) {
    MultiPolygon part{poly};
    MultiPolygon inter = run_overlay("intersection", [&](MultiPolygon& out) {
      bg::intersection(part, other.polygons(), out);
    });
    const double in = raw_area(inter);
    if (in > cfg.eps_area && bg::area(poly) - in > cfg.eps_area) return true;
  }
  return false;
}

}  // namespace

GeometryConfig GeometryConfig::for_extent(const Box& extent, std::optional<double> d) {
  const double w = extent.max_corner().x() - extent.min_corner().x();
  const double h = extent.max_corner().y() - extent.min_corner().y();
  const double diag = std::hypot(w, h);
  GeometryConfig cfg;
  if (diag > 0) {
    const double box_area = w * h > 0 ? w * h : diag * diag;
    cfg.eps_area = 1e-9 * box_area;
    cfg.eps_len = 1e-12 * diag;
    cfg.d = 1e-3 * diag;
  }
  if (d) cfg.d = *d;
  cfg.validate();
  return cfg;
}

void GeometryConfig::validate() const {
  if (!(d > 0)) throw Error("buffer distance d must be positive");
  if (!(eps_area > 0)) throw Error("eps_area must be positive");
  if (!(eps_len > 0)) throw Error("eps_len must be positive");
}

const GeometryConfig& default_config() {
  static const GeometryConfig cfg{};
  return cfg;
}

Region::Region(MultiPolygon polygons, const GeometryConfig& cfg)
    : polygons_(regularize(polygons, cfg)) {
  if (!polygons_.empty()) bg::envelope(polygons_, bbox_);
}

Region Region::from_polygons(MultiPolygon polygons, const GeometryConfig& cfg) {
  bg::correct(polygons);
  std::string reason;
  if (!bg::is_valid(polygons, reason))
    throw GeometryError("invalid geometry: " + reason);
  return Region(std::move(polygons), cfg);
}

Region Region::from_trusted(MultiPolygon polygons, const GeometryConfig& cfg) {
  return Region(std::move(polygons), cfg);
}

Region Region::rectangle(double x0, double y0, double x1, double y1) {
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  Polygon p;
  p.outer() = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
  return Region(MultiPolygon{p}, default_config());
}

std::size_t Region::vertex_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : polygons_) {
    n += p.outer().size();
    for (const auto& h : p.inners()) n += h.size();
  }
  return n;
}

bool operator==(const Region& a, const Region& b) {
  auto same_ring = [](const Ring& r, const Ring& s) {
    if (r.size() != s.size()) return false;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i].x() != s[i].x() || r[i].y() != s[i].y()) return false;
    return true;
  };
  if (a.polygons_.size() != b.polygons_.size()) return false;
  for (std::size_t i = 0; i < a.polygons_.size(); ++i) {
    const auto& p = a.polygons_[i];
    const auto& q = b.polygons_[i];
    if (!same_ring(p.outer(), q.outer())) return false;
    if (p.inners().size() != q.inners().size()) return false;
    for (std::size_t j = 0; j < p.inners().size(); ++j)
      if (!same_ring(p.inners()[j], q.inners()[j])) return false;
  }
  return true;
}

Predicate parse_predicate(std::string_view name) {
  const std::string n = lower(name);
  if (n == "ov" || n == "overlaps") return Predicate::Overlaps;
  if (n == "eq" || n == "equals" || n == "equal") return Predicate::Equals;
  if (n == "cb" || n == "coveredby") return Predicate::CoveredBy;
  if (n == "is" || n == "inside") return Predicate::Inside;
  if (n == "cv" || n == "covers") return Predicate::Covers;
  if (n == "ic" || n == "includes") return Predicate::Includes;
  if (n == "to" || n == "touches") return Predicate::Touches;
  if (n == "dj" || n == "disjoint") return Predicate::Disjoint;
  if (n == "it" || n == "intersects") return Predicate::Intersects;
  if (n == "wi" || n == "within") return Predicate::Within;
  if (n == "co" || n == "contains") return Predicate::Contains;
  if (n == "ii" || n == "iintersects") return Predicate::IIntersects;
  throw UnsupportedPredicate("unknown topological predicate '" + std::string(name) + "'");
}

std::string_view short_name(Predicate p) {
  switch (p) {
    case Predicate::Overlaps: return "OV";
    case Predicate::Equals: return "EQ";
    case Predicate::CoveredBy: return "CB";
    case Predicate::Inside: return "IS";
    case Predicate::Covers: return "CV";
    case Predicate::Includes: return "IC";
    case Predicate::Touches: return "TO";
    case Predicate::Disjoint: return "DJ";
    case Predicate::Intersects: return "IT";
    case Predicate::Within: return "WI";
    case Predicate::Contains: return "CO";
    case Predicate::IIntersects: return "II";
  }
  return "??";
}

std::string_view long_name(Predicate p) {
  switch (p) {
    case Predicate::Overlaps: return "Overlaps";
    case Predicate::Equals: return "Equals";
    case Predicate::CoveredBy: return "CoveredBy";
    case Predicate::Inside: return "Inside";
    case Predicate::Covers: return "Covers";
    case Predicate::Includes: return "Includes";
    case Predicate::Touches: return "Touches";
    case Predicate::Disjoint: return "Disjoint";
    case Predicate::Intersects: return "Intersects";
    case Predicate::Within: return "Within";
    case Predicate::Contains: return "Contains";
    case Predicate::IIntersects: return "IIntersects";
  }
  return "??";
}

Predicate converse(Predicate p) {
  switch (p) {
    case Predicate::CoveredBy: return Predicate::Covers;
    case Predicate::Covers: return Predicate::CoveredBy;
    case Predicate::Inside: return Predicate::Includes;
    case Predicate::Includes: return Predicate::Inside;
    case Predicate::Within: return Predicate::Contains;
    case Predicate::Contains: return Predicate::Within;
    default: return p;
  }
}

bool is_base(Predicate p) {
  return std::find(kBasePredicates.begin(), kBasePredicates.end(), p) != kBasePredicates.end();
}

FourIntersection signature(Predicate base) {
  //                           ∂∂     ∘∘     ∂∘     ∘∂
  switch (base) {
    case Predicate::Disjoint: return {false, false, false, false};
    case Predicate::Touches: return {true, false, false, false};
    case Predicate::Equals: return {true, true, false, false};
    case Predicate::Inside: return {false, true, true, false};
    case Predicate::CoveredBy: return {true, true, true, false};
    case Predicate::Includes: return {false, true, false, true};
    case Predicate::Covers: return {true, true, false, true};
    case Predicate::Overlaps: return {true, true, true, true};
    default: throw UnsupportedPredicate("no 4-intersection signature for derived predicate");
  }
}

Predicate classify(const FourIntersection& fi) {
  if (!fi.interior_interior)
    return fi.boundary_boundary ? Predicate::Touches : Predicate::Disjoint;
  if (fi.boundary_interior && fi.interior_boundary) return Predicate::Overlaps;
  if (fi.boundary_interior)
    return fi.boundary_boundary ? Predicate::CoveredBy : Predicate::Inside;
  if (fi.interior_boundary)
    return fi.boundary_boundary ? Predicate::Covers : Predicate::Includes;
  return Predicate::Equals;
}

bool holds(Predicate t, Predicate base) {
  switch (t) {
    case Predicate::Intersects: return base != Predicate::Disjoint;
    case Predicate::Within:
      return base == Predicate::Inside || base == Predicate::CoveredBy || base == Predicate::Equals;
    case Predicate::Contains:
      return base == Predicate::Includes || base == Predicate::Covers || base == Predicate::Equals;
    case Predicate::IIntersects:
      return base != Predicate::Disjoint && base != Predicate::Touches;
    default: return t == base;
  }
}

double area(const Region& g) { return raw_area(g.polygons()); }

bool is_empty(const Region& g, const GeometryConfig& cfg) {
  return g.empty() || area(g) <= cfg.eps_area;
}

bool boxes_intersect(const Box& a, const Box& b, double slack) {
  return a.min_corner().x() <= b.max_corner().x() + slack &&
         b.min_corner().x() <= a.max_corner().x() + slack &&
         a.min_corner().y() <= b.max_corner().y() + slack &&
         b.min_corner().y() <= a.max_corner().y() + slack;
}

Region difference(const Region& a, const Region& b, const GeometryConfig& cfg) {
  if (a.empty()) return {};
  if (b.empty() || !boxes_intersect(a.bbox(), b.bbox())) return a;
  return Region::from_trusted(run_overlay("difference", [&](MultiPolygon& out) {
                                bg::difference(a.polygons(), b.polygons(), out);
                              }),
                              cfg);
}

Region intersection(const Region& a, const Region& b, const GeometryConfig& cfg) {
  if (a.empty() || b.empty() || !boxes_intersect(a.bbox(), b.bbox())) return {};
  return Region::from_trusted(run_overlay("intersection", [&](MultiPolygon& out) {
                                bg::intersection(a.polygons(), b.polygons(), out);
                              }),
                              cfg);
}

Region union_(const Region& a, const Region& b, const GeometryConfig& cfg) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return Region::from_trusted(run_overlay("union", [&](MultiPolygon& out) {
                                bg::union_(a.polygons(), b.polygons(), out);
                              }),
                              cfg);
}

Region geom_union(std::span<const Region> regions, const GeometryConfig& cfg) {
  if (regions.empty()) return {};
  if (regions.size() == 1) return regions.front();
  const std::size_t mid = regions.size() / 2;
  return union_(geom_union(regions.first(mid), cfg), geom_union(regions.subspan(mid), cfg),
                cfg);
}

Region buffer(const Region& g, double d, const GeometryConfig& cfg) {
  if (!(d > 0)) throw Error("buffer distance must be positive");
  if (g.empty()) return {};
  namespace sb = bg::strategy::buffer;
  return Region::from_trusted(run_overlay("buffer", [&](MultiPolygon& out) {
                                bg::buffer(g.polygons(), out, sb::distance_symmetric<double>(d),
                                           sb::side_straight(), sb::join_miter(),
                                           sb::end_flat(), sb::point_square());
                              }),
                              cfg);
}

double symmetric_difference_area(const Region& a, const Region& b, const GeometryConfig& cfg) {
  return area(difference(a, b, cfg)) + area(difference(b, a, cfg));
}

bool is_subset(const Region& a, const Region& b, const GeometryConfig& cfg) {
  return area(difference(a, b, cfg)) <= cfg.eps_area;
}

bool approx_equal(const Region& a, const Region& b, const GeometryConfig& cfg) {
  if (a == b) return true;
  return symmetric_difference_area(a, b, cfg) <= cfg.eps_area;
}

double boundary_distance(const Region& a, const Region& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return boundary_distance_until(a, b, -1.0);
}

FourIntersection four_intersection(const Region& g1, const Region& g2,
                                   const GeometryConfig& cfg) {
  if (g1.empty() || g2.empty())
    throw GeometryError("four_intersection is undefined for the empty geometry");
  if (g1 == g2) return signature(Predicate::Equals);
  FourIntersection fi;
  if (!boxes_intersect(g1.bbox(), g2.bbox(), cfg.eps_len)) return fi;
  fi.boundary_boundary = boundary_distance_until(g1, g2, cfg.eps_len) <= cfg.eps_len;
  const Region inter = intersection(g1, g2, cfg);
  const double inter_area = area(inter);
  fi.interior_interior = inter_area > cfg.eps_area;
  if (fi.interior_interior) {
    fi.boundary_interior = partially_covered(g2, g1, inter_area, cfg);
    fi.interior_boundary = partially_covered(g1, g2, inter_area, cfg);
  }
  return fi;
}

Predicate relate(const Region& g1, const Region& g2, const GeometryConfig& cfg) {
  return classify(four_intersection(g1, g2, cfg));
}

bool topo(Predicate t, const Region& g1, const Region& g2, const GeometryConfig& cfg) {
  if (g1.empty() || g2.empty()) return false;
  // Cheap rejections before the overlay.
  if (!boxes_intersect(g1.bbox(), g2.bbox(), cfg.eps_len)) return t == Predicate::Disjoint;
  return holds(t, relate(g1, g2, cfg));
}

bool topo(std::string_view t, const Region& g1, const Region& g2, const GeometryConfig& cfg) {
  return topo(parse_predicate(t), g1, g2, cfg);
}

std::size_t region_hash(const Region& g, double quantum) {
  std::size_t seed = g.polygon_count();
  auto add_ring = [&](const Ring& r) {
    boost::hash_combine(seed, r.size());
    for (const auto& p : r) {
      boost::hash_combine(seed, std::llround(p.x() / quantum));
      boost::hash_combine(seed, std::llround(p.y() / quantum));
    }
  };
  for (const auto& poly : g.polygons()) {
    add_ring(poly.outer());
    for (const auto& h : poly.inners()) add_ring(h);
  }
  return seed;
}

}  // namespace scqa::geom

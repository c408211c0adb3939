#pragma once

// Regularized polygonal regions and the topological predicates between them.
//
// A Region is either empty or a finite set of polygons (outer ring plus
// holes) with pairwise disjoint interiors and total area above eps_area.
// Every operation returns a regularized Region: slivers at or below
// eps_area are dropped and rings are cleaned of duplicate and collinear
// vertices, so results can be compared and hashed.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <json.hpp>

#include "scqa/error.hpp"

namespace scqa::geom {

using Point = boost::geometry::model::d2::point_xy<double>;
/// Counter-clockwise outer rings, clockwise holes, closed.
using Polygon = boost::geometry::model::polygon<Point, false, true>;
using Ring = Polygon::ring_type;
using MultiPolygon = boost::geometry::model::multi_polygon<Polygon>;
using Box = boost::geometry::model::box<Point>;

struct GeometryConfig {
  /// Buffer distance used to separate touching geometries.
  double d = 0.01;
  /// Regions with area at or below this are empty; equality is tested on
  /// symmetric-difference area against it.
  double eps_area = 1e-9;
  /// Boundary contact tolerance and vertex snapping distance.
  double eps_len = 1e-9;

  /// Defaults scaled to an instance extent: eps_area = 1e-9 * box area,
  /// eps_len = 1e-12 * diagonal, d = 1e-3 * diagonal unless given.
  static GeometryConfig for_extent(const Box& extent,
                                   std::optional<double> d = std::nullopt);
  void validate() const;
};

const GeometryConfig& default_config();

class Region {
 public:
  Region() = default;

  /// Validates and regularizes user-supplied polygons. Throws GeometryError
  /// for self-intersecting or otherwise invalid input.
  static Region from_polygons(MultiPolygon polygons,
                              const GeometryConfig& cfg = default_config());
  /// Regularizes the output of a boolean operation without validity checks.
  static Region from_trusted(MultiPolygon polygons,
                             const GeometryConfig& cfg = default_config());
  static Region rectangle(double x0, double y0, double x1, double y1);

  bool empty() const noexcept { return polygons_.empty(); }
  const MultiPolygon& polygons() const noexcept { return polygons_; }
  std::size_t polygon_count() const noexcept { return polygons_.size(); }
  std::size_t vertex_count() const noexcept;
  /// Only meaningful for non-empty regions.
  const Box& bbox() const noexcept { return bbox_; }

  /// Exact structural equality of the canonical vertex lists.
  friend bool operator==(const Region& a, const Region& b);

 private:
  explicit Region(MultiPolygon polygons, const GeometryConfig& cfg);

  MultiPolygon polygons_;
  Box bbox_{};
};

/// Non-emptiness of the four boundary/interior intersections.
struct FourIntersection {
  bool boundary_boundary = false;  // ∂g1 ∩ ∂g2
  bool interior_interior = false;  // ∘g1 ∩ ∘g2
  bool boundary_interior = false;  // ∂g1 ∩ ∘g2
  bool interior_boundary = false;  // ∘g1 ∩ ∂g2
  friend bool operator==(const FourIntersection&,
                         const FourIntersection&) = default;
};

/// The eight base relations followed by the four derived ones.
enum class Predicate {
  Overlaps,     // OV
  Equals,       // EQ
  CoveredBy,    // CB
  Inside,       // IS
  Covers,       // CV
  Includes,     // IC
  Touches,      // TO
  Disjoint,     // DJ
  Intersects,   // IT
  Within,       // WI
  Contains,     // CO
  IIntersects,  // II
};

inline constexpr std::array<Predicate, 8> kBasePredicates = {
    Predicate::Disjoint, Predicate::Touches,   Predicate::Equals,
    Predicate::Inside,   Predicate::CoveredBy, Predicate::Includes,
    Predicate::Covers,   Predicate::Overlaps};

inline constexpr std::array<Predicate, 12> kAllPredicates = {
    Predicate::Overlaps, Predicate::Equals,     Predicate::CoveredBy,
    Predicate::Inside,   Predicate::Covers,     Predicate::Includes,
    Predicate::Touches,  Predicate::Disjoint,   Predicate::Intersects,
    Predicate::Within,   Predicate::Contains,   Predicate::IIntersects};

/// Accepts the two-letter codes (OV, II, ...) and the long names
/// (overlaps, iintersects, ...), case-insensitively.
Predicate parse_predicate(std::string_view name);
std::string_view short_name(Predicate p);
std::string_view long_name(Predicate p);
Predicate converse(Predicate p);
bool is_base(Predicate p);
/// The 4-intersection signature of a base predicate.
FourIntersection signature(Predicate base);
/// Base relation for a 4-intersection pattern. Patterns outside the eight
/// region rows (only reachable with multi-part regions) fall back to the
/// nearest row: both-partial -> Overlaps, interior-only -> Equals.
Predicate classify(const FourIntersection& fi);
/// Evaluates T against a base relation using the derived-predicate rules.
bool holds(Predicate t, Predicate base);

double area(const Region& g);
bool is_empty(const Region& g, const GeometryConfig& cfg = default_config());

Region difference(const Region& a, const Region& b,
                  const GeometryConfig& cfg = default_config());
Region intersection(const Region& a, const Region& b,
                    const GeometryConfig& cfg = default_config());
Region union_(const Region& a, const Region& b,
              const GeometryConfig& cfg = default_config());
Region geom_union(std::span<const Region> regions,
                  const GeometryConfig& cfg = default_config());
/// Mitered (square-cap) outward offset by d. buffer(Empty, d) = Empty.
Region buffer(const Region& g, double d,
              const GeometryConfig& cfg = default_config());

double symmetric_difference_area(const Region& a, const Region& b,
                                 const GeometryConfig& cfg = default_config());
/// a ⊆ b up to eps_area.
bool is_subset(const Region& a, const Region& b,
               const GeometryConfig& cfg = default_config());
/// Symmetric difference area at or below eps_area.
bool approx_equal(const Region& a, const Region& b,
                  const GeometryConfig& cfg = default_config());

/// Minimum distance between the boundaries of two regions.
double boundary_distance(const Region& a, const Region& b);

/// Throws GeometryError if either argument is empty.
FourIntersection four_intersection(const Region& g1, const Region& g2,
                                   const GeometryConfig& cfg = default_config());
/// Base relation between two non-empty regions.
Predicate relate(const Region& g1, const Region& g2,
                 const GeometryConfig& cfg = default_config());
/// False whenever either argument is empty.
bool topo(Predicate t, const Region& g1, const Region& g2,
          const GeometryConfig& cfg = default_config());
bool topo(std::string_view t, const Region& g1, const Region& g2,
          const GeometryConfig& cfg = default_config());

bool boxes_intersect(const Box& a, const Box& b, double slack = 0.0);

/// Hash of the canonical vertex list with coordinates rounded to quantum.
std::size_t region_hash(const Region& g, double quantum);

// WKT (POLYGON, MULTIPOLYGON, "POLYGON EMPTY") and GeoJSON geometries.
Region parse_wkt(std::string_view wkt,
                 const GeometryConfig& cfg = default_config());
std::string to_wkt(const Region& g);
Region from_geojson(const nlohmann::json& geometry,
                    const GeometryConfig& cfg = default_config());
nlohmann::json to_geojson(const Region& g);

}  // namespace scqa::geom

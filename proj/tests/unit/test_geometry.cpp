#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "scqa/geometry.hpp"

using namespace scqa::geom;
using fixtures::rect;

namespace {

Region poly(std::vector<std::pair<double, double>> ring) {
  Polygon p;
  for (auto [x, y] : ring) p.outer().push_back({x, y});
  p.outer().push_back(p.outer().front());
  return Region::from_polygons(MultiPolygon{p});
}

}  // namespace

TEST_CASE("regularization removes duplicate, collinear and spike vertices") {
  const Region clean = rect(0, 0, 2, 1);
  const Region noisy = poly({{0, 0}, {1, 0}, {1, 0}, {2, 0}, {2, 1}, {0, 1}});
  CHECK(noisy == clean);
  CHECK(noisy.vertex_count() == clean.vertex_count());
  CHECK(clean.vertex_count() == 5);
  // Starting vertex and orientation do not matter.
  CHECK(poly({{2, 1}, {0, 1}, {0, 0}, {2, 0}}) == clean);
  CHECK(poly({{0, 0}, {0, 1}, {2, 1}, {2, 0}}) == clean);
}

TEST_CASE("invalid input polygons are rejected") {
  CHECK_THROWS_AS(poly({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), scqa::GeometryError);
  CHECK_THROWS_AS(parse_wkt("POLYGON((0 0,1 0))"), scqa::Error);
}

TEST_CASE("WKT and GeoJSON round trips") {
  const Region holed = difference(rect(0, 0, 4, 4), rect(1, 1, 2, 2));
  for (const Region& g : {rect(0, 0, 1, 1), holed, union_(rect(0, 0, 1, 1), rect(3, 3, 4, 4)), Region{}}) {
    CHECK(parse_wkt(to_wkt(g)) == g);
    CHECK(from_geojson(to_geojson(g)) == g);
  }
  CHECK(parse_wkt("POLYGON EMPTY").empty());
  CHECK(parse_wkt("MULTIPOLYGON(((0 0,1 0,1 1,0 1,0 0)),((2 2,3 2,3 3,2 3,2 2)))").polygon_count() == 2);
  CHECK(to_wkt(rect(0, 0, 1.5, 1)) == "POLYGON ((0 0, 1.5 0, 1.5 1, 0 1, 0 0))");
}

TEST_CASE("boolean operations and areas") {
  const Region a = rect(0, 0, 2, 2), b = rect(1, 1, 3, 3);
  CHECK(area(intersection(a, b)) == doctest::Approx(1));
  CHECK(area(difference(a, b)) == doctest::Approx(3));
  CHECK(area(union_(a, b)) == doctest::Approx(7));
  CHECK(symmetric_difference_area(a, b) == doctest::Approx(6));
  CHECK(difference(a, a).empty());
  CHECK(intersection(a, rect(5, 5, 6, 6)).empty());
  // Touching rectangles share only an edge: the intersection is a sliver
  // and regularizes to empty.
  CHECK(intersection(a, rect(2, 0, 3, 2)).empty());
  CHECK(is_subset(rect(0.5, 0.5, 1, 1), a));
  CHECK_FALSE(is_subset(b, a));
  CHECK(approx_equal(union_(rect(0, 0, 1, 2), rect(1, 0, 2, 2)), a));
  std::vector<Region> parts = {rect(0, 0, 1, 1), rect(1, 0, 2, 1), rect(0, 1, 2, 2)};
  CHECK(approx_equal(geom_union(parts), a));
  CHECK(geom_union(std::span<const Region>{}).empty());
}

TEST_CASE("mitered buffer") {
  const double d = 0.1;
  const Region b = buffer(rect(0, 0, 1, 1), d);
  CHECK(area(b) == doctest::Approx((1 + 2 * d) * (1 + 2 * d)));
  CHECK(approx_equal(b, rect(-d, -d, 1 + d, 1 + d), GeometryConfig{0.01, 1e-9, 1e-9}));
  CHECK(buffer(Region{}, d).empty());
}

TEST_CASE("base relations on canonical layouts") {
  const Region g = rect(0, 0, 4, 4);
  CHECK(relate(g, rect(5, 0, 6, 1)) == Predicate::Disjoint);
  CHECK(relate(g, rect(4, 0, 6, 1)) == Predicate::Touches);
  CHECK(relate(g, rect(4, 4, 6, 6)) == Predicate::Touches);  // corner contact
  CHECK(relate(g, rect(0, 0, 4, 4)) == Predicate::Equals);
  CHECK(relate(rect(1, 1, 2, 2), g) == Predicate::Inside);
  CHECK(relate(rect(0, 1, 2, 2), g) == Predicate::CoveredBy);
  CHECK(relate(g, rect(1, 1, 2, 2)) == Predicate::Includes);
  CHECK(relate(g, rect(0, 1, 2, 2)) == Predicate::Covers);
  CHECK(relate(g, rect(3, 3, 5, 5)) == Predicate::Overlaps);
  // A hole: the inner square touches the ring from inside the hole.
  const Region holed = difference(g, rect(1, 1, 3, 3));
  CHECK(relate(holed, rect(1, 1, 3, 3)) == Predicate::Touches);
  CHECK(relate(holed, rect(1.5, 1.5, 2.5, 2.5)) == Predicate::Disjoint);
}

TEST_CASE("derived predicates") {
  using P = Predicate;
  for (P base : kBasePredicates) {
    CHECK(holds(P::Intersects, base) == (base != P::Disjoint));
    CHECK(holds(P::IIntersects, base) == (base != P::Disjoint && base != P::Touches));
    CHECK(holds(P::Within, base) == (base == P::Inside || base == P::CoveredBy || base == P::Equals));
    CHECK(holds(P::Contains, base) == (base == P::Includes || base == P::Covers || base == P::Equals));
    for (P other : kBasePredicates) CHECK(holds(other, base) == (other == base));
  }
  CHECK(topo(P::Within, rect(1, 1, 2, 2), rect(0, 0, 4, 4)));
  CHECK(topo("CO", rect(0, 0, 4, 4), rect(1, 1, 2, 2)));
  CHECK_FALSE(topo(P::Intersects, Region{}, rect(0, 0, 1, 1)));
  CHECK_THROWS_AS(four_intersection(Region{}, rect(0, 0, 1, 1)), scqa::GeometryError);
}

TEST_CASE("signatures classify back to their relation and converses swap roles") {
  for (Predicate p : kBasePredicates) {
    CHECK(classify(signature(p)) == p);
    const auto s = signature(p), c = signature(converse(p));
    CHECK(s.boundary_interior == c.interior_boundary);
    CHECK(s.boundary_boundary == c.boundary_boundary);
  }
  for (Predicate p : kAllPredicates) CHECK(converse(converse(p)) == p);
  CHECK(converse(Predicate::Inside) == Predicate::Includes);
  CHECK(converse(Predicate::CoveredBy) == Predicate::Covers);
  CHECK(converse(Predicate::Within) == Predicate::Contains);
  CHECK(converse(Predicate::IIntersects) == Predicate::IIntersects);
}

TEST_CASE("predicate names") {
  for (Predicate p : kAllPredicates) {
    CHECK(parse_predicate(short_name(p)) == p);
    CHECK(parse_predicate(long_name(p)) == p);
  }
  CHECK(parse_predicate("iintersects") == Predicate::IIntersects);
  CHECK(parse_predicate("ov") == Predicate::Overlaps);
  CHECK_THROWS_AS(parse_predicate("crosses"), scqa::UnsupportedPredicate);
}

TEST_CASE("hashing and boundary distance") {
  const Region a = rect(0, 0, 1, 1);
  CHECK(region_hash(a, 1e-6) == region_hash(poly({{1, 1}, {0, 1}, {0, 0}, {1, 0}}), 1e-6));
  CHECK(region_hash(a, 1e-6) != region_hash(rect(0, 0, 1, 2), 1e-6));
  CHECK(boundary_distance(a, rect(3, 0, 4, 1)) == doctest::Approx(2));
  CHECK(boundary_distance(a, rect(1, 0, 2, 1)) == doctest::Approx(0));
}

TEST_CASE("config scaling") {
  const auto cfg = GeometryConfig::for_extent(Box({0, 0}, {30, 40}));
  CHECK(cfg.d == doctest::Approx(0.05));
  CHECK(cfg.eps_area == doctest::Approx(1.2e-6));
  CHECK(GeometryConfig::for_extent(Box({0, 0}, {30, 40}), 0.5).d == 0.5);
  GeometryConfig bad;
  bad.d = -1;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("property: inclusion-exclusion and exactly one base relation") {
  std::mt19937_64 rng(7);
  auto coord = [&] { return static_cast<double>(rng() % 9); };
  for (int i = 0; i < 300; ++i) {
    double x0 = coord(), x1 = coord(), y0 = coord(), y1 = coord();
    double u0 = coord(), u1 = coord(), v0 = coord(), v1 = coord();
    if (x0 == x1 || y0 == y1 || u0 == u1 || v0 == v1) continue;
    const Region a = rect(std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1));
    const Region b = rect(std::min(u0, u1), std::min(v0, v1), std::max(u0, u1), std::max(v0, v1));
    CHECK(area(union_(a, b)) == doctest::Approx(area(a) + area(b) - area(intersection(a, b))));
    int true_count = 0;
    for (Predicate p : kBasePredicates) true_count += topo(p, a, b) ? 1 : 0;
    CHECK(true_count == 1);
    CHECK(relate(b, a) == converse(relate(a, b)));
  }
}

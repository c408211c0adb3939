#include <doctest.h>

#include "fixtures.hpp"

using namespace scqa;
using fixtures::rect;
using fixtures::tid_of;
using geom::Predicate;
using geom::Region;

namespace {

const geom::GeometryConfig kCfg = fixtures::config(0.1);

bool same(const Region& a, const Region& b) { return geom::approx_equal(a, b, kCfg); }

}  // namespace

TEST_CASE("transformations on hand-built pairs") {
  const Region g = rect(0, 0, 4, 4);
  // Overlap: the smaller side of the split is removed.
  CHECK(same(tr(Predicate::Overlaps, g, rect(3, 0, 6, 4), kCfg), rect(0, 0, 3, 4)));
  CHECK(same(tr(Predicate::Overlaps, g, rect(-1, -1, 3, 5), kCfg), rect(0, 0, 3, 4)));
  CHECK(same(tr(Predicate::IIntersects, g, rect(-1, -1, 3, 5), kCfg), rect(3, 0, 4, 4)));
  // Containment: the first region loses what it shares with the second.
  CHECK(tr(Predicate::Inside, rect(1, 1, 2, 2), g, kCfg).empty());
  CHECK(same(tr(Predicate::Covers, g, rect(0, 0, 1, 4), kCfg), rect(1, 0, 4, 4)));
  CHECK(tr(Predicate::Includes, g, rect(0, 0, 1, 4), kCfg) == g);
  CHECK(tr(Predicate::Equals, g, g, kCfg).empty());
  // Touching: pulled back by the buffer distance.
  CHECK(same(tr(Predicate::Touches, g, rect(4, 0, 5, 4), kCfg), rect(0, 0, 3.9, 4)));
  CHECK(same(tr(Predicate::Intersects, g, rect(3, 0, 5, 4), kCfg), rect(0, 0, 2.9, 4)));
  // A false atom leaves the region alone.
  CHECK(tr(Predicate::Touches, g, rect(6, 0, 7, 1), kCfg) == g);
  CHECK_THROWS_AS(tr(Predicate::Disjoint, g, rect(6, 0, 7, 1), kCfg), UnsupportedPredicate);
  // The converse form shrinks the second argument of T.
  CHECK(same(tr_converse(Predicate::Includes, rect(1, 1, 2, 2), g, kCfg),
             tr(Predicate::Inside, rect(1, 1, 2, 2), g, kCfg)));
}

TEST_CASE("property: transformations falsify the atom and only shrink") {
  const std::vector<std::pair<Region, Region>> pairs = {
      {rect(0, 0, 4, 4), rect(3, 1, 6, 3)}, {rect(0, 0, 4, 4), rect(1, 1, 2, 2)},
      {rect(1, 1, 2, 2), rect(0, 0, 4, 4)}, {rect(0, 0, 4, 4), rect(4, 0, 5, 2)},
      {rect(0, 0, 4, 4), rect(0, 0, 4, 4)}, {rect(0, 0, 4, 4), rect(0, 0, 2, 4)},
      {rect(0, 0, 2, 4), rect(0, 0, 4, 4)},
  };
  for (Predicate t : geom::kAllPredicates) {
    if (t == Predicate::Disjoint) continue;
    for (const auto& [a, b] : pairs) {
      if (!geom::topo(t, a, b, kCfg)) continue;
      const Region r = tr(t, a, b, kCfg);
      CHECK_FALSE(geom::topo(t, r, b, kCfg));
      CHECK(geom::is_subset(r, a, kCfg));
    }
  }
}

TEST_CASE("overlap chains have 2^(n-1) minimal repairs, all tied") {
  for (int n = 2; n <= 4; ++n) {
    const auto s = fixtures::overlap_chain(n);
    const auto set = enumerate_repairs(s.instance, s.sics);
    CHECK(set.minimal_count() == (1u << (n - 1)));
    CHECK(set.min_delta == doctest::Approx(0.2 * (n - 1)));
    for (const auto* r : set.minimal()) {
      CHECK(validate_shrink_repair(s.instance, r->instance, identity_correlation(s.instance), s.sics));
      CHECK(r->delta == doctest::Approx(delta_instances(s.instance, r->instance)));
    }
  }
}

TEST_CASE("parcels and buildings: two minimal repairs") {
  const auto s = fixtures::parcels_and_buildings();
  const auto& d = s.instance;
  const auto set = enumerate_repairs(d, s.sics);
  REQUIRE(set.minimal_count() == 2);
  CHECK(set.min_delta == doctest::Approx(5.5));
  const Tid g2 = tid_of(d, "idl2"), g4 = tid_of(d, "idl4"), g5 = tid_of(d, "idb1");
  int emptied = 0, holed = 0;
  for (const auto* r : set.minimal()) {
    const auto& i = r->instance;
    CHECK(same(i.at(g5).region, rect(2, 1, 3, 2)));
    if (i.at(g4).region.empty()) {
      ++emptied;
      CHECK(same(i.at(g2).region, rect(4, 0, 7, 4)));
    } else {
      ++holed;
      CHECK(same(i.at(g2).region, geom::difference(rect(4, 0, 7, 4), rect(5, 1, 6, 2))));
    }
    CHECK_FALSE(r->provenance.empty());
  }
  CHECK(emptied == 1);
  CHECK(holed == 1);
  // Non-minimal leaves exist (e.g. cutting g2 out of g3) and cost more.
  CHECK(set.repairs.size() > 2);
  for (const auto& r : set.repairs) CHECK(r.delta >= set.min_delta - 1e-9);

  const auto vs = versions(set, g4);
  CHECK(vs.versions.size() == 2);
  const auto m = vs.minimum(d.config());
  REQUIRE(m);
  CHECK(m->empty());
  CHECK(versions(set, tid_of(d, "idl1")).versions.size() == 1);
  CHECK_THROWS(versions(set, Tid{99}));
}

TEST_CASE("every fixed-order minimal repair is found under all orderings") {
  for (const auto& s : {fixtures::parcels_and_buildings(), fixtures::overlap_chain(3)}) {
    const auto fixed = enumerate_repairs(s.instance, s.sics);
    RepairOptions full;
    full.full_ordering = true;
    const auto all = enumerate_repairs(s.instance, s.sics, full);
    // Other orders can add tied repairs (parcels: cutting idl4 out of idl3 first).
    CHECK(fixed.minimal_count() <= all.minimal_count());
    CHECK(fixed.min_delta == doctest::Approx(all.min_delta));
    for (const auto* r : fixed.minimal()) {
      bool found = false;
      for (const auto* q : all.minimal()) {
        bool eq = true;
        for (const auto& t : s.instance.tuples())
          eq = eq && same(r->instance.at(t->tid).region, q->instance.at(t->tid).region);
        found = found || eq;
      }
      CHECK(found);
    }
    CHECK(all.nodes_expanded >= fixed.nodes_expanded);
  }
}

TEST_CASE("repair search is independent of the thread count") {
  const auto s = fixtures::counties_and_lakes();
  RepairOptions one, many;
  many.threads = 4;
  const auto a = enumerate_repairs(s.instance, s.sics, one);
  const auto b = enumerate_repairs(s.instance, s.sics, many);
  REQUIRE(a.repairs.size() == b.repairs.size());
  CHECK(a.nodes_expanded == b.nodes_expanded);
  for (std::size_t i = 0; i < a.repairs.size(); ++i) {
    CHECK(a.repairs[i].delta == b.repairs[i].delta);
    for (const auto& t : s.instance.tuples())
      CHECK(a.repairs[i].instance.at(t->tid).region == b.repairs[i].instance.at(t->tid).region);
  }
}

TEST_CASE("search limits abort instead of truncating") {
  const auto s = fixtures::overlap_chain(5);
  RepairOptions o;
  o.limits.max_nodes = 3;
  try {
    enumerate_repairs(s.instance, s.sics, o);
    FAIL("expected the node limit to trip");
  } catch (const SearchLimitExceeded& e) {
    CHECK(e.nodes_expanded >= 3);
  }
  o.limits = {};
  o.limits.max_depth = 1;
  CHECK_THROWS_AS(enumerate_repairs(s.instance, s.sics, o), SearchLimitExceeded);
}

TEST_CASE("a consistent instance is its own only repair") {
  const auto s = fixtures::tiled_parcels();
  const auto set = enumerate_repairs(s.instance, s.sics);
  REQUIRE(set.repairs.size() == 1);
  CHECK(set.min_delta == 0);
  CHECK(set.repairs[0].minimal);
}

TEST_CASE("single steps") {
  const auto s = fixtures::parcels_three();
  const auto root = RepairNode::root(s.instance);
  const auto v = find_violations(s.instance, s.sics).at(0);
  const auto child = apply_step(root, s.sics[0], v, 0, Side::Second);
  CHECK(child.applied.size() == 1);
  CHECK(child.total_area == doctest::Approx(root.total_area - 4));
  CHECK(child.applied[0].target == v.witness[1]);
  // The same violation is gone in the child.
  CHECK_THROWS_AS(apply_step(child, s.sics[0], v, 0, Side::First), StaleViolation);
  CHECK_THROWS(apply_step(root, s.sics[0], v, 3, Side::First));
}

TEST_CASE("shrink-repair validation") {
  const auto s = fixtures::parcels_three();
  const auto& d = s.instance;
  const Tid g2 = tid_of(d, "idl2");
  const auto f = identity_correlation(d);
  CHECK(validate_shrink_repair(d, d.with_region(g2, rect(4, 0, 7, 4)), f, s.sics));
  CHECK_FALSE(validate_shrink_repair(d, d.with_region(g2, rect(4, 0, 7.5, 4)), f, s.sics));  // still inconsistent
  CHECK_FALSE(validate_shrink_repair(d, d.with_region(g2, rect(3.5, 0, 7, 4)), f, s.sics));  // grows
  CHECK_FALSE(validate_shrink_repair(d, d, f, s.sics));
}

// Minimal repairs need not tie in delta. Two touching squares of different
// heights under an Intersects constraint: pulling the short one back costs
// d * 1, pulling the tall one back costs d * (1 + d) because the buffer of
// the short one is mitered. Only the first repair is minimal, so the core
// (intersection over minimal repairs) keeps the tall square whole, while the
// direct construction, which assumes every conflict can be resolved either
// way, shrinks both.
TEST_CASE("untied repairs separate the direct core from the repair core") {
  auto schema = std::make_shared<Schema>();
  schema->add(fixtures::relation("R", {"id"}, {"id"}));
  const std::vector<Row> rows = {{"R", {fixtures::str("a")}, rect(0, 0, 1, 1)},
                                 {"R", {fixtures::str("b")}, rect(1, 0, 2, 2)}};
  const Instance d = Instance::load(schema, rows, kCfg);
  const std::vector<DenialSIC> sics = {CoreSIC{"r_it", "R", Predicate::Intersects}.to_denial(*schema)};
  const auto set = enumerate_repairs(d, sics);
  CHECK(set.repairs.size() == 2);
  CHECK(set.minimal_count() == 1);
  CHECK(set.min_delta == doctest::Approx(0.1));
  const auto by_repairs = core_via_repairs(set);
  const auto direct = core_direct(d, sics);
  const Tid b = tid_of(d, "b");
  CHECK(same(by_repairs.instance.at(b).region, rect(1, 0, 2, 2)));
  CHECK(same(direct.instance.at(b).region, geom::difference(rect(1, 0, 2, 2), rect(-0.1, -0.1, 1.1, 1.1))));
}

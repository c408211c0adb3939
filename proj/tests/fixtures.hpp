#pragma once

// Hand-built instances shared by the unit and acceptance tests.
//
// Coordinates are reconstructions: only the topology of each layout
// (which pairs overlap, touch or nest) is fixed by the scenarios they stand
// for, so every shape is an axis-aligned rectangle on a coarse lattice.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "scqa/constraints.hpp"
#include "scqa/core.hpp"
#include "scqa/query.hpp"
#include "scqa/repair.hpp"

namespace fixtures {

using scqa::DenialSIC;
using scqa::Instance;
using scqa::Row;
using scqa::Value;
using scqa::geom::Predicate;
using scqa::geom::Region;

inline Region rect(double x0, double y0, double x1, double y1) {
  return Region::rectangle(x0, y0, x1, y1);
}

inline Value str(const char* s) { return Value{std::string(s)}; }
inline Value num(std::int64_t v) { return Value{v}; }

inline scqa::RelationSchema relation(std::string name, std::vector<std::string> string_attrs,
                                     std::vector<std::string> key) {
  scqa::RelationSchema r;
  r.name = std::move(name);
  for (auto& a : string_attrs) r.attributes.push_back({std::move(a), scqa::AttrType::String});
  r.key = std::move(key);
  return r;
}

inline scqa::geom::GeometryConfig config(double d = 0.05) {
  scqa::geom::GeometryConfig cfg;
  cfg.d = d;
  cfg.eps_area = 1e-9;
  cfg.eps_len = 1e-9;
  return cfg;
}

struct Scenario {
  Instance instance;
  std::vector<DenialSIC> sics;
};

/// Tid of the tuple whose first thematic value is `key`.
inline scqa::Tid tid_of(const Instance& d, const std::string& key) {
  for (const auto& t : d.tuples())
    if (std::get<std::string>(t->thematic.at(0)) == key) return t->tid;
  throw scqa::Error("no tuple " + key);
}

// Three land parcels: idl1 apart, idl2 and idl3 overlapping.
inline Scenario parcels_three() {
  auto schema = std::make_shared<scqa::Schema>();
  schema->add(relation("LandP", {"idl"}, {"idl"}));
  std::vector<Row> rows = {
      {"LandP", {str("idl1")}, rect(0, 0, 3, 4)},
      {"LandP", {str("idl2")}, rect(4, 0, 8, 4)},
      {"LandP", {str("idl3")}, rect(7, 0, 11, 4)},
  };
  Scenario s{Instance::load(schema, rows, config()), {}};
  s.sics.push_back(scqa::CoreSIC{"parcels_ii", "LandP", Predicate::IIntersects}.to_denial(*schema));
  return s;
}

// Parcels and buildings. LandP(idl, name, owner), Building(idb).
//   g1 [0,3]x[0,4], g2 [4,8]x[0,4], g3 [7,11]x[0,4] parcels, g2 OV g3;
//   g4 [5,6]x[1,2] parcel nested in g2;
//   g5 [2,3.5]x[1,2] building crossing the g1 boundary;
//   g6 [7.5,9]x[1,2] building inside g3 and overlapping g2.
// SICs: parcels may not internally intersect; buildings may not overlap
// parcels. Exactly two minimal repairs tie at delta 5.5: both cut g3 out of
// g2 and clip g5 to g1; one also cuts g4 out of g2, the other empties g4.
inline Scenario parcels_and_buildings() {
  auto schema = std::make_shared<scqa::Schema>();
  schema->add(relation("LandP", {"idl", "name", "owner"}, {"idl"}));
  schema->add(relation("Building", {"idb"}, {"idb"}));
  std::vector<Row> rows = {
      {"LandP", {str("idl1"), str("n1"), str("o1")}, rect(0, 0, 3, 4)},
      {"LandP", {str("idl2"), str("n2"), str("o2")}, rect(4, 0, 8, 4)},
      {"LandP", {str("idl3"), str("n3"), str("o3")}, rect(7, 0, 11, 4)},
      {"LandP", {str("idl4"), str("n4"), str("o4")}, rect(5, 1, 6, 2)},
      {"Building", {str("idb1")}, rect(2, 1, 3.5, 2)},
      {"Building", {str("idb2")}, rect(7.5, 1, 9, 2)},
  };
  Scenario s{Instance::load(schema, rows, config()), {}};
  s.sics.push_back(scqa::CoreSIC{"parcels_ii", "LandP", Predicate::IIntersects}.to_denial(*schema));
  DenialSIC b;
  b.id = "building_ov";
  b.atoms = {{"Building", {"b"}, "s1"}, {"LandP", {"l", "_", "_"}, "s2"}};
  b.topo = {{Predicate::Overlaps, "s1", "s2"}};
  b.validate(*schema);
  s.sics.push_back(b);
  return s;
}

/// Only the parcels of parcels_and_buildings() under the core SIC.
inline Scenario parcels_four() {
  auto full = parcels_and_buildings();
  std::vector<scqa::TuplePtr> keep;
  for (const auto& t : full.instance.tuples())
    if (t->relation == "LandP") keep.push_back(t);
  return {full.instance.with_tuples(keep), {full.sics[0]}};
}

// Consistent parcels tiled edge to edge with one building each.
//   idl1 [0,2]x[0,1], idl2 [2,4]x[0,1], idl3 [0,4]x[1,2]: all pairs touch.
//   idb1 inside idl1, idb2 inside idl3.
inline Scenario tiled_parcels() {
  auto schema = std::make_shared<scqa::Schema>();
  schema->add(relation("LandP", {"idl"}, {"idl"}));
  schema->add(relation("Building", {"idb"}, {"idb"}));
  std::vector<Row> rows = {
      {"LandP", {str("idl1")}, rect(0, 0, 2, 1)},
      {"LandP", {str("idl2")}, rect(2, 0, 4, 1)},
      {"LandP", {str("idl3")}, rect(0, 1, 4, 2)},
      {"Building", {str("idb1")}, rect(0.5, 0.25, 1.5, 0.75)},
      {"Building", {str("idb2")}, rect(2.5, 1.25, 3.5, 1.75)},
  };
  Scenario s{Instance::load(schema, rows, config()), {}};
  s.sics.push_back(scqa::CoreSIC{"parcels_ii", "LandP", Predicate::IIntersects}.to_denial(*schema));
  return s;
}

/// Window meeting idb2 only.
inline Region tiled_window() { return rect(3, 1.5, 5, 3); }

// Vertical chain of unit squares, neighbours overlapping by 0.2 x 1.
inline Scenario overlap_chain(int n) {
  auto schema = std::make_shared<scqa::Schema>();
  schema->add(relation("R", {"id"}, {"id"}));
  std::vector<Row> rows;
  for (int i = 0; i < n; ++i) {
    const double y0 = i == 0 ? 0.0 : i - 0.2;
    rows.push_back({"R", {Value{"t" + std::to_string(i + 1)}}, rect(0, y0, 1, i + 1.0)});
  }
  Scenario s{Instance::load(schema, rows, config()), {}};
  s.sics.push_back(scqa::CoreSIC{"chain_ii", "R", Predicate::IIntersects}.to_denial(*schema));
  return s;
}

// Two overlapping rectangles, and a window that touches one repaired
// version of the first but lies inside the unrepaired one.
inline Scenario overlapping_pair() {
  auto schema = std::make_shared<scqa::Schema>();
  schema->add(relation("R", {"id"}, {"id"}));
  std::vector<Row> rows = {
      {"R", {str("r1")}, rect(0, 0, 2, 1)},
      {"R", {str("r2")}, rect(1, 0, 3, 1)},
  };
  Scenario s{Instance::load(schema, rows, config()), {}};
  s.sics.push_back(scqa::CoreSIC{"r_ii", "R", Predicate::IIntersects}.to_denial(*schema));
  return s;
}

inline Region overlapping_pair_window() { return rect(1, 0, 1.5, 1); }

// Counties and lakes. County(idc, name), Lake(idl).
//   idc3 [3,7]x[3,7] overlaps idc1 (left), idc2 (top) and idc4 (right),
//   each by a zone of area 1; idc5 is isolated.
//   idl1 and idl2 are unit squares touching along x = 5; idl3 lies inside
//   idc3 away from its conflict zones.
// SICs: counties may not internally intersect, lakes may not intersect.
// Each county overlap resolves two ways and the lake contact two ways, for
// sixteen minimal repairs.
inline Scenario counties_and_lakes() {
  auto schema = std::make_shared<scqa::Schema>();
  schema->add(relation("County", {"idc", "name"}, {"idc"}));
  schema->add(relation("Lake", {"idl"}, {"idl"}));
  std::vector<Row> rows = {
      {"County", {str("idc1"), str("n1")}, rect(0, 4, 3.5, 6)},
      {"County", {str("idc2"), str("n2")}, rect(4, 6.5, 6, 9)},
      {"County", {str("idc3"), str("n3")}, rect(3, 3, 7, 7)},
      {"County", {str("idc4"), str("n4")}, rect(6.5, 4, 9, 6)},
      {"County", {str("idc5"), str("n5")}, rect(10, 0, 12, 2)},
      {"Lake", {str("idl1")}, rect(4, 0, 5, 1)},
      {"Lake", {str("idl2")}, rect(5, 0, 6, 1)},
      {"Lake", {str("idl3")}, rect(4.5, 4.5, 5.5, 5.5)},
  };
  Scenario s{Instance::load(schema, rows, config()), {}};
  s.sics.push_back(scqa::CoreSIC{"county_ii", "County", Predicate::IIntersects}.to_denial(*schema));
  s.sics.push_back(scqa::CoreSIC{"lake_it", "Lake", Predicate::Intersects}.to_denial(*schema));
  return s;
}

// Random instances whose minimal repairs all tie in delta.
//
// Tuples are rectangles in horizontal chains, one chain per band; every
// rectangle of a band spans the same y-range, so cutting either side of a
// contact removes the same area. Consecutive chain members overlap, touch or
// stand apart; the contact zones along one rectangle are separated by more
// than 2d so no repair step interacts with another conflict. Bands are more
// than 2d apart. Two relations R and S share the layout and each carries
// the same core SIC.
struct RandomOptions {
  Predicate pred = Predicate::IIntersects;
  std::size_t max_tuples = 8;
  std::size_t max_conflicts = 4;
  double d = 0.05;
};

inline Scenario random_tied(std::uint64_t seed, const RandomOptions& o) {
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto pick = [&](double lo, double hi) { return std::round((lo + (hi - lo) * unit()) * 20.0) / 20.0; };
  auto schema = std::make_shared<scqa::Schema>();
  for (const char* r : {"R", "S"}) {
    scqa::RelationSchema rel;
    rel.name = r;
    rel.attributes = {{"id", scqa::AttrType::Integer}};
    rel.key = {"id"};
    schema->add(rel);
  }

  for (;;) {
    std::vector<Row> rows;
    std::size_t conflicts = 0;
    const std::size_t total = 3 + rng() % (o.max_tuples - 2);
    double band_y = 0;
    std::int64_t next_id = 1;
    while (rows.size() < total) {
      const std::string rel = rng() % 2 ? "R" : "S";
      const double h = pick(1.0, 2.0);
      const std::size_t len = std::min<std::size_t>(1 + rng() % 3, total - rows.size());
      double x = pick(0.0, 2.0);
      Region prev_copy;
      for (std::size_t i = 0; i < len; ++i) {
        const double w = pick(2.0, 3.5);
        Region g = rect(x, band_y, x + w, band_y + h);
        const int contact = static_cast<int>(rng() % 3);  // 0 overlap, 1 touch, 2 gap
        if (o.pred == Predicate::Equals && i > 0 && contact == 0) {
          // Duplicate of the previous rectangle.
          g = prev_copy;
        } else {
          x += w;
          if (contact == 0) x -= pick(0.2, 0.8);
          if (contact == 2) x += pick(0.4, 1.0);
        }
        prev_copy = g;
        rows.push_back({rel, {Value{next_id++}}, g});
      }
      band_y += h + pick(0.5, 1.5);
    }
    auto cfg = config(o.d);
    Instance d = Instance::load(schema, rows, cfg);
    std::vector<DenialSIC> sics = {
        scqa::CoreSIC{"r_core", "R", o.pred}.to_denial(*schema),
        scqa::CoreSIC{"s_core", "S", o.pred}.to_denial(*schema),
    };
    conflicts = scqa::find_violations(d, sics).size();
    if (conflicts >= 1 && conflicts <= o.max_conflicts) return {std::move(d), std::move(sics)};
  }
}

}  // namespace fixtures

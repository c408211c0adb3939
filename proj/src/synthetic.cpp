#include "scqa/synthetic.hpp"

#include <cmath>
#include <random>

namespace scqa {

ConflictMode parse_conflict_mode(std::string_view name) {
  if (name == "equals" || name == "eq") return ConflictMode::Equals;
  if (name == "iintersects" || name == "ii") return ConflictMode::IIntersects;
  if (name == "intersects" || name == "it") return ConflictMode::Intersects;
  throw Error("unknown conflict mode '" + std::string(name) + "'");
}

std::string_view conflict_mode_name(ConflictMode m) {
  switch (m) {
    case ConflictMode::Equals: return "equals";
    case ConflictMode::IIntersects: return "iintersects";
    case ConflictMode::Intersects: return "intersects";
  }
  return "?";
}

geom::Predicate conflict_predicate(ConflictMode m) {
  switch (m) {
    case ConflictMode::Equals: return geom::Predicate::Equals;
    case ConflictMode::IIntersects: return geom::Predicate::IIntersects;
    case ConflictMode::Intersects: return geom::Predicate::Intersects;
  }
  return geom::Predicate::IIntersects;
}

std::shared_ptr<const Schema> synthetic_schema() {
  auto schema = std::make_shared<Schema>();
  schema->add(RelationSchema{
      "R", {{"id", AttrType::Integer}, {"name", AttrType::String}}, {"id"}, "geometry"});
  return schema;
}

namespace {

constexpr double kCell = 10.0;

struct Rect {
  double x0, y0, x1, y1;
};

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

// Portable draws so output does not depend on the standard library.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

struct Slot {
  std::size_t first;  // tuple index of the left member
  std::size_t row;
  std::size_t col;
};

}  // namespace

SyntheticData gen_synthetic(const SyntheticOptions& o) {
  if (o.conflict_pct < 0 || o.conflict_pct > 100)
    throw Error("conflict percentage must lie in [0, 100]");
  const std::size_t n = o.n;
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * o.conflict_pct / 100.0));
  if (k == 1 || (k > 0 && n < 2))
    throw Error("a conflict percentage of " + std::to_string(o.conflict_pct) + " is infeasible for " +
                std::to_string(n) + " tuples");
  const std::size_t side = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))));
  auto cols_in_row = [&](std::size_t row) { return std::min(side, n - row * side); };

  std::mt19937_64 rng(o.seed);
  std::vector<Rect> rects(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = static_cast<double>(i % side) * kCell;
    const double cy = static_cast<double>(i / side) * kCell;
    const double x0 = round3(cx + uniform(rng, 1.0, 2.0));
    const double w = round3(uniform(rng, 5.0, 6.5));
    const double y0 = round3(cy + uniform(rng, 1.0, 4.0));
    const double h = round3(uniform(rng, 5.0, 5.5));
    rects[i] = {x0, y0, round3(x0 + w), round3(y0 + h)};
  }

  // Disjoint pair slots (c, c+1), c even, within each row.
  std::vector<Slot> slots;
  for (std::size_t row = 0; row * side < n; ++row)
    for (std::size_t c = 0; c + 1 < cols_in_row(row); c += 2) slots.push_back({row * side + c, row, c});

  std::vector<std::vector<std::size_t>> groups;
  std::vector<bool> used(slots.size(), false);
  if (k % 2 == 1) {
    std::vector<std::size_t> candidates;
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (slots[s].col + 2 < cols_in_row(slots[s].row)) candidates.push_back(s);
    if (candidates.empty()) throw Error("grid too small for a three-tuple conflict");
    const std::size_t s = candidates[below(rng, candidates.size())];
    used[s] = true;
    if (s + 1 < slots.size() && slots[s + 1].row == slots[s].row) used[s + 1] = true;
    groups.push_back({slots[s].first, slots[s].first + 1, slots[s].first + 2});
  }
  std::vector<std::size_t> free_slots;
  for (std::size_t s = 0; s < slots.size(); ++s)
    if (!used[s]) free_slots.push_back(s);
  for (std::size_t i = free_slots.size(); i > 1; --i) std::swap(free_slots[i - 1], free_slots[below(rng, i)]);
  const std::size_t pairs = (k - (k % 2 == 1 ? 3 : 0)) / 2;
  if (pairs > free_slots.size())
    throw Error("conflict percentage " + std::to_string(o.conflict_pct) + " is infeasible for " +
                std::to_string(n) + " tuples on a " + std::to_string(side) + "-wide grid");
  for (std::size_t p = 0; p < pairs; ++p)
    groups.push_back({slots[free_slots[p]].first, slots[free_slots[p]].first + 1});

  for (const auto& g : groups) {
    for (std::size_t m = 0; m + 1 < g.size(); ++m) {
      Rect& a = rects[g[m]];
      Rect& b = rects[g[m + 1]];
      switch (o.mode) {
        case ConflictMode::Equals: b = rects[g[0]]; break;
        case ConflictMode::IIntersects: a.x1 = round3(b.x0 + uniform(rng, 0.5, 1.5)); break;
        case ConflictMode::Intersects: a.x1 = b.x0; break;
      }
    }
  }

  std::vector<Row> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Rect& r = rects[i];
    geom::Polygon p;
    p.outer() = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}, {r.x0, r.y0}};
    rows.push_back({"R",
                    {Value{static_cast<std::int64_t>(i + 1)}, Value{"r" + std::to_string(i + 1)}},
                    geom::Region::from_trusted(geom::MultiPolygon{p})});
  }
  const double extent = static_cast<double>(side) * kCell;
  const geom::Box box({0.0, 0.0}, {extent, extent});
  auto cfg = geom::GeometryConfig::for_extent(box, o.d);
  auto schema = synthetic_schema();
  SyntheticData out{Instance::load(schema, rows, cfg), {}, k};
  out.sics.push_back(CoreSIC{"core_" + std::string(conflict_mode_name(o.mode)), "R",
                             conflict_predicate(o.mode)}
                         .to_denial(*schema));
  return out;
}

}  // namespace scqa

#include "scqa/query.hpp"

#include <algorithm>
#include <sstream>

#include "scqa/grid_index.hpp"
#include "scqa/instance_io.hpp"
#include "scqa/parallel.hpp"

namespace scqa {

using geom::Predicate;
using geom::Region;

Predicate query_predicate(const Query& q) {
  return std::visit([](const auto& x) { return x.pred; }, q);
}

bool is_basic(const Query& q) {
  const Predicate p = query_predicate(q);
  return p == Predicate::Intersects || p == Predicate::IIntersects;
}

namespace {

std::vector<std::string> effective_projection(const RelationSchema& rel,
                                              const std::vector<std::string>& projection) {
  if (!projection.empty()) return projection;
  std::vector<std::string> out;
  for (const auto& a : rel.attributes) out.push_back(a.name);
  return out;
}

void check_projection(const RelationSchema& rel, const std::vector<std::string>& projection) {
  const auto proj = effective_projection(rel, projection);
  for (const auto& p : proj) rel.index_of(p);
  for (const auto& k : rel.key)
    if (std::find(proj.begin(), proj.end(), k) == proj.end())
      throw SchemaError("projection over " + rel.name + " must contain key attribute '" + k + "'");
}

std::vector<std::size_t> projection_indices(const RelationSchema& rel,
                                            const std::vector<std::string>& projection) {
  std::vector<std::size_t> out;
  for (const auto& p : effective_projection(rel, projection)) out.push_back(rel.index_of(p));
  return out;
}

void check_predicate(Predicate p) {
  if (p == Predicate::Disjoint) throw UnsupportedPredicate("queries do not support Disjoint");
}

}  // namespace

void validate_query(const Query& q, const Schema& schema) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        check_predicate(x.pred);
        if constexpr (std::is_same_v<T, RangeQuery>) {
          check_projection(schema.relation(x.relation), x.projection);
          if (x.window.empty()) throw SchemaError("range query window must be non-empty");
        } else {
          check_projection(schema.relation(x.relation1), x.projection1);
          check_projection(schema.relation(x.relation2), x.projection2);
        }
      },
      q);
}

AnswerSet eval_range(const RangeQuery& q, const Instance& d) {
  validate_query(q, d.schema());
  const auto& rel = d.schema().relation(q.relation);
  const auto idx = projection_indices(rel, q.projection);
  AnswerSet out;
  out.columns = effective_projection(rel, q.projection);
  const auto& cfg = d.config();
  for (const auto& t : d.tuples()) {
    if (t->relation != q.relation || t->region.empty()) continue;
    if (!geom::boxes_intersect(t->region.bbox(), q.window.bbox(), cfg.eps_len)) continue;
    if (!geom::topo(q.pred, t->region, q.window, cfg)) continue;
    Answer a;
    for (auto i : idx) a.values.push_back(t->thematic[i]);
    a.regions.push_back(t->region);
    a.tids.push_back(t->tid);
    auto key = a.values;
    out.rows.emplace(std::move(key), std::move(a));
  }
  return out;
}

AnswerSet eval_join(const JoinQuery& q, const Instance& d) {
  validate_query(q, d.schema());
  const auto& rel1 = d.schema().relation(q.relation1);
  const auto& rel2 = d.schema().relation(q.relation2);
  const auto idx1 = projection_indices(rel1, q.projection1);
  const auto idx2 = projection_indices(rel2, q.projection2);
  AnswerSet out;
  out.geometry_columns = 2;
  for (const auto& c : effective_projection(rel1, q.projection1)) out.columns.push_back(c);
  for (const auto& c : effective_projection(rel2, q.projection2)) out.columns.push_back(c);
  const auto& cfg = d.config();

  std::vector<const SpatialTuple*> right;
  std::vector<geom::Box> boxes;
  for (const auto& t : d.tuples()) {
    if (t->relation != q.relation2 || t->region.empty()) continue;
    right.push_back(t.get());
    boxes.push_back(t->region.bbox());
  }
  const GridIndex index(boxes);
  for (const auto& t1 : d.tuples()) {
    if (t1->relation != q.relation1 || t1->region.empty()) continue;
    for (std::size_t j : index.query(t1->region.bbox(), cfg.eps_len)) {
      const SpatialTuple* t2 = right[j];
      if (t1->tid == t2->tid) continue;
      if (!geom::topo(q.pred, t1->region, t2->region, cfg)) continue;
      Answer a;
      for (auto i : idx1) a.values.push_back(t1->thematic[i]);
      for (auto i : idx2) a.values.push_back(t2->thematic[i]);
      a.regions = {t1->region, t2->region};
      a.tids = {t1->tid, t2->tid};
      auto key = a.values;
      out.rows.emplace(std::move(key), std::move(a));
    }
  }
  return out;
}

AnswerSet eval(const Query& q, const Instance& d) {
  return std::visit(
      [&](const auto& x) -> AnswerSet {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RangeQuery>)
          return eval_range(x, d);
        else
          return eval_join(x, d);
      },
      q);
}

AnswerSet cqa_via_repairs(const Query& q, const RepairSet& repairs, unsigned threads) {
  const auto minimal = repairs.minimal();
  if (minimal.empty()) throw InvariantFailure("repair set has no minimal repair");
  std::vector<AnswerSet> per_repair(minimal.size());
  parallel_for(minimal.size(), threads,
               [&](std::size_t i) { per_repair[i] = eval(q, minimal[i]->instance); });

  const auto& cfg = repairs.original.config();
  AnswerSet out = per_repair.front();
  for (std::size_t r = 1; r < per_repair.size(); ++r) {
    const auto& other = per_repair[r];
    for (auto it = out.rows.begin(); it != out.rows.end();) {
      auto match = other.rows.find(it->first);
      if (match == other.rows.end()) {
        it = out.rows.erase(it);
        continue;
      }
      if (match->second.tids != it->second.tids)
        throw InvariantFailure("answer row maps to different tuples across repairs");
      for (std::size_t g = 0; g < it->second.regions.size(); ++g)
        it->second.regions[g] =
            geom::intersection(it->second.regions[g], match->second.regions[g], cfg);
      ++it;
    }
  }
  return out;
}

AnswerSet cqa_via_repairs(const Query& q, const Instance& d, const std::vector<DenialSIC>& sics,
                          const RepairOptions& options) {
  validate_query(q, d.schema());
  return cqa_via_repairs(q, enumerate_repairs(d, sics, options), options.threads);
}

bool same_answers(const AnswerSet& a, const AnswerSet& b, const geom::GeometryConfig& cfg) {
  if (a.rows.size() != b.rows.size()) return false;
  for (const auto& [values, row] : a.rows) {
    auto it = b.rows.find(values);
    if (it == b.rows.end() || it->second.regions.size() != row.regions.size()) return false;
    for (std::size_t g = 0; g < row.regions.size(); ++g)
      if (!geom::approx_equal(row.regions[g], it->second.regions[g], cfg)) return false;
  }
  return true;
}

Query query_from_json(const nlohmann::json& j, const Schema& schema,
                      const geom::GeometryConfig& cfg) {
  try {
    const std::string type = j.value("type", std::string("range"));
    const Predicate pred = geom::parse_predicate(j.at("pred").get<std::string>());
    if (type == "range") {
      RangeQuery q;
      q.relation = j.at("relation").get<std::string>();
      q.pred = pred;
      const auto& w = j.at("window");
      q.window = w.is_string() ? geom::parse_wkt(w.get<std::string>(), cfg) : geom::from_geojson(w, cfg);
      q.projection = j.value("projection", std::vector<std::string>{});
      validate_query(q, schema);
      return q;
    }
    if (type == "join") {
      JoinQuery q;
      const auto rels = j.at("relations").get<std::vector<std::string>>();
      if (rels.size() != 2) throw ParseError("join query needs exactly two relations");
      q.relation1 = rels[0];
      q.relation2 = rels[1];
      q.pred = pred;
      if (j.contains("projection")) {
        const auto proj = j.at("projection").get<std::vector<std::vector<std::string>>>();
        if (proj.size() != 2) throw ParseError("join projection needs two attribute lists");
        q.projection1 = proj[0];
        q.projection2 = proj[1];
      }
      validate_query(q, schema);
      return q;
    }
    throw ParseError("unknown query type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed query: ") + e.what());
  }
}

namespace {

double relative_change(const Instance& original, Tid tid, const Region& g) {
  const Region& orig = original.at(tid).region;
  const double a = geom::area(orig);
  return a > 0 ? delta_regions(orig, g, original.config()) / a : 0.0;
}

std::string geometry_column(std::size_t g) {
  return g == 0 ? "geometry" : "geometry" + std::to_string(g + 1);
}

}  // namespace

nlohmann::json answers_to_geojson(const AnswerSet& a, const Instance* original) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& [values, row] : a.rows) {
    nlohmann::json props = nlohmann::json::object();
    for (std::size_t c = 0; c < a.columns.size() && c < values.size(); ++c)
      props[a.columns[c]] = std::visit([](const auto& x) { return nlohmann::json(x); }, values[c]);
    if (original)
      for (std::size_t g = 0; g < row.regions.size(); ++g)
        props["rel_change" + (g ? std::to_string(g + 1) : std::string())] =
            relative_change(*original, row.tids[g], row.regions[g]);
    nlohmann::json geometry;
    if (row.regions.size() == 1) {
      geometry = geom::to_geojson(row.regions[0]);
    } else {
      nlohmann::json parts = nlohmann::json::array();
      for (const auto& r : row.regions) parts.push_back(geom::to_geojson(r));
      geometry = {{"type", "GeometryCollection"}, {"geometries", parts}};
    }
    features.push_back({{"type", "Feature"}, {"properties", props}, {"geometry", geometry}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

std::string answers_to_csv(const AnswerSet& a, const Instance* original) {
  std::ostringstream out;
  bool first = true;
  auto cell = [&](const std::string& s) {
    if (!first) out << ',';
    out << io::csv_escape(s);
    first = false;
  };
  for (const auto& c : a.columns) cell(c);
  for (std::size_t g = 0; g < a.geometry_columns; ++g) cell(geometry_column(g));
  if (original)
    for (std::size_t g = 0; g < a.geometry_columns; ++g)
      cell("rel_change" + (g ? std::to_string(g + 1) : std::string()));
  out << '\n';
  for (const auto& [values, row] : a.rows) {
    first = true;
    for (const auto& v : values) cell(to_string(v));
    for (const auto& r : row.regions) cell(geom::to_wkt(r));
    if (original)
      for (std::size_t g = 0; g < row.regions.size(); ++g) {
        std::ostringstream num;
        num.precision(6);
        num << relative_change(*original, row.tids[g], row.regions[g]);
        cell(num.str());
      }
    out << '\n';
  }
  return out.str();
}

}  // namespace scqa

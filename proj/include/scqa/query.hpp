#pragma once

// Range and join queries and consistent answers via repairs.
//
// Answers are keyed by their thematic values. Projections must contain the
// key of every queried relation, so a row identifies its tuples.

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "scqa/repair.hpp"

namespace scqa {

struct RangeQuery {
  std::string relation;
  geom::Predicate pred = geom::Predicate::Intersects;
  geom::Region window;
  /// Empty means every thematic attribute.
  std::vector<std::string> projection;
};

/// Pairs (t1, t2) with T(g1, g2). A tuple is never paired with itself.
struct JoinQuery {
  std::string relation1, relation2;
  geom::Predicate pred = geom::Predicate::Intersects;
  std::vector<std::string> projection1, projection2;
};

using Query = std::variant<RangeQuery, JoinQuery>;

geom::Predicate query_predicate(const Query& q);
/// T ∈ {IT, II}.
bool is_basic(const Query& q);
/// Throws SchemaError for unknown attributes or projections missing a key,
/// UnsupportedPredicate for Disjoint.
void validate_query(const Query& q, const Schema& schema);

struct Answer {
  std::vector<Value> values;
  /// One region per queried relation.
  std::vector<geom::Region> regions;
  std::vector<Tid> tids;
};

struct AnswerSet {
  std::vector<std::string> columns;
  std::size_t geometry_columns = 1;
  /// Sorted by thematic values.
  std::map<std::vector<Value>, Answer> rows;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
  bool contains(const std::vector<Value>& values) const { return rows.count(values) > 0; }
};

AnswerSet eval_range(const RangeQuery& q, const Instance& d);
AnswerSet eval_join(const JoinQuery& q, const Instance& d);
AnswerSet eval(const Query& q, const Instance& d);

/// Thematic rows answered in every minimal repair; each geometry is the
/// intersection of the per-repair geometries of the same tid. Rows whose
/// intersection is empty are kept with an empty region.
AnswerSet cqa_via_repairs(const Query& q, const RepairSet& repairs, unsigned threads = 1);
AnswerSet cqa_via_repairs(const Query& q, const Instance& d, const std::vector<DenialSIC>& sics,
                          const RepairOptions& options = {});

/// Same thematic rows and every geometry pair within eps_area.
bool same_answers(const AnswerSet& a, const AnswerSet& b, const geom::GeometryConfig& cfg);

// Query JSON:
//   {"type":"range","relation":"LandP","pred":"intersects","window":"<WKT>",
//    "projection":[...]}
//   {"type":"join","relations":["A","B"],"pred":"touches",
//    "projection":[[...],[...]]}
Query query_from_json(const nlohmann::json& j, const Schema& schema,
                      const geom::GeometryConfig& cfg = geom::default_config());

/// Features with the thematic columns as properties. Joins emit a
/// GeometryCollection of both regions. With `original`, each geometry also
/// reports its relative area change against the original tuple.
nlohmann::json answers_to_geojson(const AnswerSet& a, const Instance* original = nullptr);
std::string answers_to_csv(const AnswerSet& a, const Instance* original = nullptr);

}  // namespace scqa

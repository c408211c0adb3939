#pragma once

// The core of an inconsistent instance: per tuple, the intersection of its
// regions across all minimal repairs. For core SICs it is computed directly
// by removing from each region the union of the regions it conflicts with.

#include <map>
#include <string>
#include <vector>

#include "scqa/query.hpp"

namespace scqa {

struct CoreInstance {
  /// Same tids and thematic values as the original; regions may be empty.
  Instance instance;
  std::string provenance;  // "repairs" or "direct"
};

/// Per predicate and tid, the tids it conflicts with. Symmetric and
/// irreflexive.
struct ConflictSet {
  std::map<geom::Predicate, std::map<Tid, std::vector<Tid>>> conflicts;

  const std::vector<Tid>& of(geom::Predicate p, Tid tid) const;
};

/// With `wanted` (indexed like d.tuples()), only those tuples get entries.
ConflictSet build_conflicts(const Instance& d, const std::vector<CoreSIC>& sics,
                            unsigned threads = 1, const std::vector<bool>* wanted = nullptr);

CoreInstance core_via_repairs(const RepairSet& repairs);
CoreInstance core_via_repairs(const Instance& d, const std::vector<DenialSIC>& sics,
                              const RepairOptions& options = {});

/// Throws SchemaError if some SIC is not a core SIC.
std::vector<CoreSIC> core_sics(const std::vector<DenialSIC>& sics, const Schema& schema);

/// No repair enumeration. Predicates absent for a relation act as identity.
CoreInstance core_direct(const Instance& d, const std::vector<CoreSIC>& sics,
                         unsigned threads = 1);
CoreInstance core_direct(const Instance& d, const std::vector<DenialSIC>& sics,
                         unsigned threads = 1);

/// Consistent answers to a basic query evaluated on the core. Range queries
/// only compute core regions for tuples whose original region satisfies the
/// predicate against the window. Throws NonBasicQuery unless T ∈ {IT, II}.
AnswerSet cqa_via_core(const Query& q, const Instance& d, const std::vector<CoreSIC>& sics,
                       unsigned threads = 1);
AnswerSet cqa_via_core(const Query& q, const Instance& d, const std::vector<DenialSIC>& sics,
                       unsigned threads = 1);
/// Evaluation over a core computed once (materialized).
AnswerSet cqa_on_core(const Query& q, const CoreInstance& core);

/// Names and the buffer distance used in the generated SQL.
struct SqlDialect {
  std::string geometry_column;  // defaults to the relation's geometry attribute
  double d = 0.01;
  std::string view_prefix = "Core_";
};

/// View definition for one core SIC in PostGIS-style function names.
std::string emit_core_sql(const CoreSIC& sic, const Schema& schema, const SqlDialect& dialect);

}  // namespace scqa

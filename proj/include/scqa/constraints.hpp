#pragma once

// Denial spatial integrity constraints and violation detection.
//
// A DenialSIC forbids any binding of its relational atoms that satisfies the
// thematic condition and every topological atom. Quantifiers range over
// non-empty regions only, so tuples with an empty region never bind.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scqa/model.hpp"

namespace scqa {

struct Term {
  bool is_var = true;
  std::string var;  // when is_var
  Value constant;   // otherwise
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view cmp_op_name(CmpOp op);

/// lhs op rhs. Tuples (more than one term per side) support = and != only.
struct Comparison {
  std::vector<Term> lhs;
  CmpOp op = CmpOp::Ne;
  std::vector<Term> rhs;
};

/// R(x1, ..., xn; s). "_" is an anonymous thematic variable.
struct Atom {
  std::string relation;
  std::vector<std::string> thematic_vars;
  std::string spatial_var;
};

struct TopoAtom {
  geom::Predicate pred;
  std::string s1, s2;
};

struct DenialSIC {
  std::string id;
  std::vector<Atom> atoms;
  std::vector<Comparison> where;
  std::vector<TopoAtom> topo;

  /// Safety, arity and predicate checks. Throws SchemaError or
  /// UnsupportedPredicate.
  void validate(const Schema& schema) const;
  /// Index of the atom binding a spatial variable. Throws SchemaError.
  std::size_t atom_of(std::string_view spatial_var) const;
};

/// R(x̄1; s1) ∧ R(x̄2; s2) ∧ key(x̄1) ≠ key(x̄2) ∧ T(s1, s2), T ∈ {II, IT, EQ}.
struct CoreSIC {
  std::string id;
  std::string relation;
  geom::Predicate pred = geom::Predicate::IIntersects;

  DenialSIC to_denial(const Schema& schema) const;
};

bool is_core_predicate(geom::Predicate p);
/// Recognizes the CoreSIC shape in a general SIC.
std::optional<CoreSIC> as_core(const DenialSIC& sic, const Schema& schema);
/// True when every SIC has the CoreSIC shape.
bool all_core(const std::vector<DenialSIC>& sics, const Schema& schema);

/// Keeps, per relation, one SIC with the weakest predicate (IT < II < EQ).
std::vector<CoreSIC> normalize_core_sics(const std::vector<CoreSIC>& sics);

struct Violation {
  std::size_t sic_index = 0;
  std::string sic_id;
  /// One tid per atom of the SIC.
  std::vector<Tid> witness;

  /// Sorted distinct tids; the identity used for deduplication.
  std::vector<Tid> tid_set() const;
};

/// Ordered by sic index, then the sorted tid set. Deterministic.
std::vector<Violation> find_violations(const Instance& d, const DenialSIC& sic,
                                       std::size_t sic_index = 0);
std::vector<Violation> find_violations(const Instance& d, const std::vector<DenialSIC>& sics);
bool is_consistent(const Instance& d, const std::vector<DenialSIC>& sics);

/// True when the bound tuples satisfy the SIC body (used to detect stale
/// violations).
bool body_holds(const Instance& d, const DenialSIC& sic, const std::vector<Tid>& witness);

// JSON forms. A file holds an array of SICs or {"sics": [...]}.
DenialSIC sic_from_json(const nlohmann::json& j, const Schema& schema);
std::vector<DenialSIC> sics_from_json(const nlohmann::json& j, const Schema& schema);
nlohmann::json sic_to_json(const DenialSIC& sic);
/// Parses "a != b", "(a1,b1) != (a2,b2)", "x < 5", "name = 'abc'".
Comparison parse_comparison(std::string_view text);

}  // namespace scqa

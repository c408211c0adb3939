#pragma once

// Spatio-relational schema, tuples with surrogate ids, and instances.
//
// Every tuple carries a tid assigned at load time. Repair steps replace a
// tuple's region but never its tid, so the correlation between an instance
// and any instance reachable from it is the identity on tids.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scqa/geometry.hpp"

namespace scqa {

using Value = std::variant<std::int64_t, double, std::string>;

std::string to_string(const Value& v);
/// Numeric values compare across integer/real; strings compare with
/// strings. Throws SchemaError for a string/number comparison.
std::partial_ordering compare_values(const Value& a, const Value& b);

enum class AttrType { String, Integer, Real };

AttrType parse_attr_type(std::string_view name);
std::string_view attr_type_name(AttrType t);
/// Parses text into a value of the given type. Throws ParseError.
Value parse_value(std::string_view text, AttrType type);

struct Attribute {
  std::string name;
  AttrType type = AttrType::String;
};

struct RelationSchema {
  std::string name;
  std::vector<Attribute> attributes;  // thematic attributes only
  std::vector<std::string> key;
  std::string geometry = "geometry";

  std::size_t arity() const noexcept { return attributes.size(); }
  /// Throws SchemaError for an unknown attribute.
  std::size_t index_of(std::string_view attribute) const;
  std::optional<std::size_t> find(std::string_view attribute) const;
  std::vector<std::size_t> key_indices() const;
  void validate() const;
};

class Schema {
 public:
  void add(RelationSchema relation);
  bool has(std::string_view name) const;
  /// Throws SchemaError for an unknown relation.
  const RelationSchema& relation(std::string_view name) const;
  const std::map<std::string, RelationSchema, std::less<>>& relations() const noexcept {
    return relations_;
  }

 private:
  std::map<std::string, RelationSchema, std::less<>> relations_;
};

/// Surrogate tuple id.
struct Tid {
  std::uint64_t value = 0;
  friend auto operator<=>(const Tid&, const Tid&) = default;
};

struct SpatialTuple {
  Tid tid;
  std::string relation;
  std::vector<Value> thematic;
  geom::Region region;
};

using TuplePtr = std::shared_ptr<const SpatialTuple>;

/// An input row before tids are assigned.
struct Row {
  std::string relation;
  std::vector<Value> thematic;
  geom::Region region;
};

class Instance {
 public:
  Instance(std::shared_ptr<const Schema> schema, geom::GeometryConfig cfg);

  /// Assigns tids 1..N in row order after collapsing exact duplicates.
  /// Throws SchemaError on arity/type mismatch and KeyViolation when two rows
  /// share a key but differ elsewhere.
  static Instance load(std::shared_ptr<const Schema> schema, const std::vector<Row>& rows,
                       geom::GeometryConfig cfg);

  const Schema& schema() const noexcept { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const noexcept { return schema_; }
  const geom::GeometryConfig& config() const noexcept { return cfg_; }

  /// Sorted by tid.
  const std::vector<TuplePtr>& tuples() const noexcept { return tuples_; }
  std::size_t size() const noexcept { return tuples_.size(); }
  bool empty() const noexcept { return tuples_.empty(); }
  const SpatialTuple* find(Tid tid) const;
  /// Throws Error for an unknown tid.
  const SpatialTuple& at(Tid tid) const;
  std::vector<TuplePtr> relation(std::string_view name) const;
  std::vector<Value> key_of(const SpatialTuple& t) const;

  /// Copy with one region replaced; every other tuple is shared.
  Instance with_region(Tid tid, geom::Region region) const;
  /// Copy with the given tuples; tids must be unique.
  Instance with_tuples(std::vector<TuplePtr> tuples) const;

  double total_area() const;
  /// Bounding box of all non-empty regions, if any.
  std::optional<geom::Box> extent() const;

 private:
  std::shared_ptr<const Schema> schema_;
  geom::GeometryConfig cfg_;
  std::vector<TuplePtr> tuples_;
};

/// Area of the symmetric difference.
double delta_regions(const geom::Region& a, const geom::Region& b,
                     const geom::GeometryConfig& cfg = geom::default_config());

using Correlation = std::map<Tid, Tid>;

Correlation identity_correlation(const Instance& d);
/// Throws Error unless f is a bijection from d's tids onto d2's tids that
/// preserves relation names and thematic values.
void check_correlation(const Instance& d, const Instance& d2, const Correlation& f);
/// Sum of delta_regions over correlated tuples.
double delta_instances(const Instance& d, const Instance& d2, const Correlation& f);
/// Delta under the identity correlation.
double delta_instances(const Instance& d, const Instance& d2);

}  // namespace scqa

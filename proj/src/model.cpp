#include "scqa/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace scqa {

std::string to_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[32];
          auto res = std::to_chars(buf, buf + sizeof buf, x);
          return std::string(buf, res.ptr);
        } else {
          return std::to_string(x);
        }
      },
      v);
}

std::partial_ordering compare_values(const Value& a, const Value& b) {
  const bool sa = std::holds_alternative<std::string>(a);
  const bool sb = std::holds_alternative<std::string>(b);
  if (sa != sb) throw SchemaError("cannot compare a string with a number");
  if (sa) return std::get<std::string>(a) <=> std::get<std::string>(b);
  if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b))
    return std::get<std::int64_t>(a) <=> std::get<std::int64_t>(b);
  auto as_double = [](const Value& v) {
    return std::holds_alternative<double>(v) ? std::get<double>(v)
                                             : static_cast<double>(std::get<std::int64_t>(v));
  };
  return as_double(a) <=> as_double(b);
}

AttrType parse_attr_type(std::string_view name) {
  if (name == "string" || name == "text") return AttrType::String;
  if (name == "integer" || name == "int") return AttrType::Integer;
  if (name == "real" || name == "double" || name == "float") return AttrType::Real;
  throw SchemaError("unknown attribute type '" + std::string(name) + "'");
}

std::string_view attr_type_name(AttrType t) {
  switch (t) {
    case AttrType::String: return "string";
    case AttrType::Integer: return "integer";
    case AttrType::Real: return "real";
  }
  return "string";
}

Value parse_value(std::string_view text, AttrType type) {
  switch (type) {
    case AttrType::String: return std::string(text);
    case AttrType::Integer: {
      std::int64_t v = 0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ParseError("not an integer: '" + std::string(text) + "'");
      return v;
    }
    case AttrType::Real: {
      double v = 0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ParseError("not a real number: '" + std::string(text) + "'");
      return v;
    }
  }
  return std::string(text);
}

std::optional<std::size_t> RelationSchema::find(std::string_view attribute) const {
  for (std::size_t i = 0; i < attributes.size(); ++i)
    if (attributes[i].name == attribute) return i;
  return std::nullopt;
}

std::size_t RelationSchema::index_of(std::string_view attribute) const {
  if (auto i = find(attribute)) return *i;
  throw SchemaError("relation " + name + " has no attribute '" + std::string(attribute) + "'");
}

std::vector<std::size_t> RelationSchema::key_indices() const {
  std::vector<std::size_t> out;
  for (const auto& k : key) out.push_back(index_of(k));
  return out;
}

void RelationSchema::validate() const {
  if (name.empty()) throw SchemaError("relation name must not be empty");
  if (key.empty()) throw SchemaError("relation " + name + " needs a non-empty key");
  std::set<std::string> seen;
  for (const auto& a : attributes) {
    if (!seen.insert(a.name).second)
      throw SchemaError("relation " + name + " repeats attribute '" + a.name + "'");
    if (a.name == geometry)
      throw SchemaError("relation " + name + " uses '" + a.name + "' as both thematic and spatial");
  }
  std::set<std::string> keys;
  for (const auto& k : key) {
    index_of(k);
    if (!keys.insert(k).second)
      throw SchemaError("relation " + name + " repeats key attribute '" + k + "'");
  }
}

void Schema::add(RelationSchema relation) {
  relation.validate();
  const std::string name = relation.name;
  if (!relations_.emplace(name, std::move(relation)).second)
    throw SchemaError("duplicate relation '" + name + "'");
}

bool Schema::has(std::string_view name) const { return relations_.find(name) != relations_.end(); }

const RelationSchema& Schema::relation(std::string_view name) const {
  auto it = relations_.find(name);
  if (it == relations_.end()) throw SchemaError("unknown relation '" + std::string(name) + "'");
  return it->second;
}

Instance::Instance(std::shared_ptr<const Schema> schema, geom::GeometryConfig cfg)
    : schema_(std::move(schema)), cfg_(cfg) {
  if (!schema_) throw SchemaError("instance requires a schema");
  cfg_.validate();
}

namespace {

void check_row(const Schema& schema, const Row& row, std::size_t index) {
  const auto& rel = schema.relation(row.relation);
  if (row.thematic.size() != rel.arity())
    throw SchemaError("row " + std::to_string(index + 1) + " of " + rel.name + " has " +
                      std::to_string(row.thematic.size()) + " values, expected " +
                      std::to_string(rel.arity()));
  for (std::size_t i = 0; i < rel.arity(); ++i) {
    const Value& v = row.thematic[i];
    const bool ok = [&] {
      switch (rel.attributes[i].type) {
        case AttrType::String: return std::holds_alternative<std::string>(v);
        case AttrType::Integer: return std::holds_alternative<std::int64_t>(v);
        case AttrType::Real: return std::holds_alternative<double>(v);
      }
      return false;
    }();
    if (!ok)
      throw SchemaError("row " + std::to_string(index + 1) + " of " + rel.name +
                        ": attribute '" + rel.attributes[i].name + "' expects " +
                        std::string(attr_type_name(rel.attributes[i].type)));
  }
}

}  // namespace

Instance Instance::load(std::shared_ptr<const Schema> schema, const std::vector<Row>& rows,
                        geom::GeometryConfig cfg) {
  Instance out(std::move(schema), cfg);
  // (relation, key) -> index into accepted rows
  std::map<std::pair<std::string, std::vector<Value>>, std::size_t> by_key;
  std::vector<const Row*> accepted;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    check_row(*out.schema_, row, i);
    const auto& rel = out.schema_->relation(row.relation);
    std::vector<Value> key;
    for (auto k : rel.key_indices()) key.push_back(row.thematic[k]);
    auto [it, inserted] = by_key.emplace(std::make_pair(row.relation, key), accepted.size());
    if (inserted) {
      accepted.push_back(&row);
      continue;
    }
    const Row& prev = *accepted[it->second];
    if (prev.thematic == row.thematic && geom::approx_equal(prev.region, row.region, cfg))
      continue;
    std::string key_text;
    for (const auto& v : key) key_text += (key_text.empty() ? "" : ",") + to_string(v);
    throw KeyViolation("relation " + row.relation + ": rows share key (" + key_text +
                       ") but differ in other attributes or geometry");
  }
  out.tuples_.reserve(accepted.size());
  std::uint64_t next = 1;
  for (const Row* row : accepted) {
    out.tuples_.push_back(std::make_shared<const SpatialTuple>(
        SpatialTuple{Tid{next++}, row->relation, row->thematic, row->region}));
  }
  return out;
}

const SpatialTuple* Instance::find(Tid tid) const {
  auto it = std::lower_bound(tuples_.begin(), tuples_.end(), tid,
                             [](const TuplePtr& t, Tid id) { return t->tid < id; });
  if (it == tuples_.end() || (*it)->tid != tid) return nullptr;
  return it->get();
}

const SpatialTuple& Instance::at(Tid tid) const {
  if (const auto* t = find(tid)) return *t;
  throw Error("unknown tid " + std::to_string(tid.value));
}

std::vector<TuplePtr> Instance::relation(std::string_view name) const {
  std::vector<TuplePtr> out;
  for (const auto& t : tuples_)
    if (t->relation == name) out.push_back(t);
  return out;
}

std::vector<Value> Instance::key_of(const SpatialTuple& t) const {
  std::vector<Value> out;
  for (auto k : schema_->relation(t.relation).key_indices()) out.push_back(t.thematic[k]);
  return out;
}

Instance Instance::with_region(Tid tid, geom::Region region) const {
  auto it = std::lower_bound(tuples_.begin(), tuples_.end(), tid,
                             [](const TuplePtr& t, Tid id) { return t->tid < id; });
  if (it == tuples_.end() || (*it)->tid != tid)
    throw Error("unknown tid " + std::to_string(tid.value));
  Instance out = *this;
  SpatialTuple copy = **it;
  copy.region = std::move(region);
  out.tuples_[static_cast<std::size_t>(it - tuples_.begin())] =
      std::make_shared<const SpatialTuple>(std::move(copy));
  return out;
}

Instance Instance::with_tuples(std::vector<TuplePtr> tuples) const {
  std::sort(tuples.begin(), tuples.end(),
            [](const TuplePtr& a, const TuplePtr& b) { return a->tid < b->tid; });
  for (std::size_t i = 1; i < tuples.size(); ++i)
    if (tuples[i - 1]->tid == tuples[i]->tid)
      throw Error("duplicate tid " + std::to_string(tuples[i]->tid.value));
  Instance out(schema_, cfg_);
  out.tuples_ = std::move(tuples);
  return out;
}

double Instance::total_area() const {
  double sum = 0;
  for (const auto& t : tuples_) sum += geom::area(t->region);
  return sum;
}

std::optional<geom::Box> Instance::extent() const {
  std::optional<geom::Box> box;
  for (const auto& t : tuples_) {
    if (t->region.empty()) continue;
    if (!box)
      box = t->region.bbox();
    else
      boost::geometry::expand(*box, t->region.bbox());
  }
  return box;
}

double delta_regions(const geom::Region& a, const geom::Region& b,
                     const geom::GeometryConfig& cfg) {
  if (a == b) return 0.0;
  return geom::symmetric_difference_area(a, b, cfg);
}

Correlation identity_correlation(const Instance& d) {
  Correlation f;
  for (const auto& t : d.tuples()) f.emplace(t->tid, t->tid);
  return f;
}

void check_correlation(const Instance& d, const Instance& d2, const Correlation& f) {
  if (f.size() != d.size() || d.size() != d2.size())
    throw Error("correlation is not a bijection between the instances");
  std::set<Tid> images;
  for (const auto& t : d.tuples()) {
    auto it = f.find(t->tid);
    if (it == f.end()) throw Error("correlation misses tid " + std::to_string(t->tid.value));
    const SpatialTuple* u = d2.find(it->second);
    if (!u || !images.insert(it->second).second)
      throw Error("correlation is not a bijection between the instances");
    if (u->relation != t->relation || u->thematic != t->thematic)
      throw Error("correlation does not preserve thematic values of tid " +
                  std::to_string(t->tid.value));
  }
}

double delta_instances(const Instance& d, const Instance& d2, const Correlation& f) {
  check_correlation(d, d2, f);
  double sum = 0;
  for (const auto& t : d.tuples())
    sum += delta_regions(t->region, d2.at(f.at(t->tid)).region, d.config());
  return sum;
}

double delta_instances(const Instance& d, const Instance& d2) {
  return delta_instances(d, d2, identity_correlation(d));
}

}  // namespace scqa

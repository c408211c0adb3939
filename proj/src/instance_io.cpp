#include "scqa/instance_io.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace scqa::io {

namespace {

nlohmann::json value_to_json(const Value& v) {
  return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

Value value_from_json(const nlohmann::json& j, AttrType type, const std::string& where) {
  switch (type) {
    case AttrType::String:
      if (j.is_string()) return j.get<std::string>();
      if (j.is_number()) return j.dump();
      break;
    case AttrType::Integer:
      if (j.is_number_integer()) return j.get<std::int64_t>();
      if (j.is_string()) return parse_value(j.get<std::string>(), type);
      break;
    case AttrType::Real:
      if (j.is_number()) return j.get<double>();
      if (j.is_string()) return parse_value(j.get<std::string>(), type);
      break;
  }
  throw ParseError(where + ": value " + j.dump() + " does not match type " +
                   std::string(attr_type_name(type)));
}

}  // namespace

Schema schema_from_json(const nlohmann::json& j) {
  try {
    Schema schema;
    for (const auto& r : j.at("relations")) {
      RelationSchema rel;
      rel.name = r.at("name").get<std::string>();
      for (const auto& a : r.at("attributes")) {
        if (a.is_string()) {
          rel.attributes.push_back({a.get<std::string>(), AttrType::String});
        } else {
          rel.attributes.push_back({a.at("name").get<std::string>(),
                                    parse_attr_type(a.value("type", std::string("string")))});
        }
      }
      rel.key = r.at("key").get<std::vector<std::string>>();
      rel.geometry = r.value("geometry", std::string("geometry"));
      schema.add(std::move(rel));
    }
    return schema;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed schema: ") + e.what());
  }
}

nlohmann::json schema_to_json(const Schema& schema) {
  nlohmann::json rels = nlohmann::json::array();
  for (const auto& [name, rel] : schema.relations()) {
    nlohmann::json attrs = nlohmann::json::array();
    for (const auto& a : rel.attributes)
      attrs.push_back({{"name", a.name}, {"type", attr_type_name(a.type)}});
    rels.push_back({{"name", name}, {"attributes", attrs}, {"key", rel.key},
                    {"geometry", rel.geometry}});
  }
  return {{"relations", rels}};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

Schema load_schema(const std::filesystem::path& path) {
  return schema_from_json(read_json_file(path));
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  char c;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<Row> rows_from_csv(std::istream& in, const RelationSchema& rel,
                               const geom::GeometryConfig& cfg) {
  auto records = parse_csv(in);
  if (records.empty()) return {};
  const auto& header = records.front();
  std::vector<std::ptrdiff_t> column_of(rel.arity(), -1);
  std::ptrdiff_t geom_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == rel.geometry) {
      geom_col = static_cast<std::ptrdiff_t>(c);
    } else if (auto i = rel.find(header[c])) {
      column_of[*i] = static_cast<std::ptrdiff_t>(c);
    } else {
      throw ParseError(rel.name + " CSV: unknown column '" + header[c] + "'");
    }
  }
  if (geom_col < 0) throw ParseError(rel.name + " CSV: missing geometry column '" + rel.geometry + "'");
  for (std::size_t i = 0; i < rel.arity(); ++i)
    if (column_of[i] < 0)
      throw ParseError(rel.name + " CSV: missing column '" + rel.attributes[i].name + "'");

  std::vector<Row> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = rel.name + " CSV row " + std::to_string(r);
    if (rec.size() != header.size())
      throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(rec.size()));
    Row row;
    row.relation = rel.name;
    try {
      for (std::size_t i = 0; i < rel.arity(); ++i)
        row.thematic.push_back(parse_value(rec[static_cast<std::size_t>(column_of[i])],
                                           rel.attributes[i].type));
      row.region = geom::parse_wkt(rec[static_cast<std::size_t>(geom_col)], cfg);
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Row> rows_from_geojson(const nlohmann::json& collection, const RelationSchema& rel,
                                   const geom::GeometryConfig& cfg) {
  if (collection.value("type", std::string()) != "FeatureCollection")
    throw ParseError(rel.name + " GeoJSON: expected a FeatureCollection");
  std::vector<Row> rows;
  std::size_t n = 0;
  for (const auto& f : collection.at("features")) {
    ++n;
    const std::string where = rel.name + " GeoJSON feature " + std::to_string(n);
    if (f.contains("relation") && f.at("relation").is_string() &&
        f.at("relation").get<std::string>() != rel.name)
      continue;
    Row row;
    row.relation = rel.name;
    try {
      const auto& props = f.at("properties");
      for (const auto& a : rel.attributes) {
        if (!props.contains(a.name)) throw ParseError("missing property '" + a.name + "'");
        row.thematic.push_back(value_from_json(props.at(a.name), a.type, where));
      }
      row.region = geom::from_geojson(f.value("geometry", nlohmann::json()), cfg);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Row> read_rows(const std::filesystem::path& path, const RelationSchema& rel,
                           const geom::GeometryConfig& cfg) {
  const auto ext = path.extension().string();
  if (ext == ".csv") {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return rows_from_csv(in, rel, cfg);
  }
  if (ext == ".geojson" || ext == ".json") return rows_from_geojson(read_json_file(path), rel, cfg);
  throw Error("unsupported data file extension '" + ext + "' (expected .csv or .geojson)");
}

namespace {

nlohmann::json feature_of(const Instance& d, const SpatialTuple& t) {
  const auto& rel = d.schema().relation(t.relation);
  nlohmann::json props = nlohmann::json::object();
  for (std::size_t i = 0; i < rel.arity(); ++i)
    props[rel.attributes[i].name] = value_to_json(t.thematic[i]);
  return {{"type", "Feature"},
          {"id", t.tid.value},
          {"relation", t.relation},
          {"properties", props},
          {"geometry", geom::to_geojson(t.region)}};
}

}  // namespace

nlohmann::json instance_to_geojson(const Instance& d) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& t : d.tuples()) features.push_back(feature_of(d, *t));
  return {{"type", "FeatureCollection"}, {"features", features}};
}

nlohmann::json relation_to_geojson(const Instance& d, std::string_view relation) {
  d.schema().relation(relation);
  nlohmann::json features = nlohmann::json::array();
  for (const auto& t : d.tuples())
    if (t->relation == relation) features.push_back(feature_of(d, *t));
  return {{"type", "FeatureCollection"}, {"features", features}};
}

std::string relation_to_csv(const Instance& d, std::string_view relation) {
  const auto& rel = d.schema().relation(relation);
  std::ostringstream out;
  for (const auto& a : rel.attributes) out << csv_escape(a.name) << ',';
  out << csv_escape(rel.geometry) << '\n';
  for (const auto& t : d.tuples()) {
    if (t->relation != relation) continue;
    for (const auto& v : t->thematic) out << csv_escape(to_string(v)) << ',';
    out << csv_escape(geom::to_wkt(t->region)) << '\n';
  }
  return out.str();
}

}  // namespace scqa::io

#pragma once

// Schema and instance file formats.
//
// Schema JSON:
//   {"relations":[{"name":"LandP",
//                  "attributes":[{"name":"idl","type":"string"}, ...],
//                  "key":["idl"], "geometry":"geometry"}]}
// CSV: a header row naming the thematic attributes and the geometry column
// (WKT); extra columns are rejected, missing ones are an error.
// GeoJSON: a FeatureCollection whose feature properties hold the thematic
// attributes.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "scqa/model.hpp"

namespace scqa::io {

Schema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const Schema& schema);
Schema load_schema(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// RFC 4180 records; quoted fields may contain commas, quotes and newlines.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);
std::string csv_escape(std::string_view field);

/// Errors name the 1-based data row that failed.
std::vector<Row> rows_from_csv(std::istream& in, const RelationSchema& rel,
                               const geom::GeometryConfig& cfg = geom::default_config());
std::vector<Row> rows_from_geojson(const nlohmann::json& collection, const RelationSchema& rel,
                                   const geom::GeometryConfig& cfg = geom::default_config());
/// Dispatches on the .csv / .geojson / .json extension.
std::vector<Row> read_rows(const std::filesystem::path& path, const RelationSchema& rel,
                           const geom::GeometryConfig& cfg = geom::default_config());

/// Features carry the tid as "id" and the relation as a foreign member.
nlohmann::json instance_to_geojson(const Instance& d);
nlohmann::json relation_to_geojson(const Instance& d, std::string_view relation);
std::string relation_to_csv(const Instance& d, std::string_view relation);

}  // namespace scqa::io

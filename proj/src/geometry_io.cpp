#include <cctype>
#include <charconv>
#include <string>

#include "scqa/geometry.hpp"

namespace bg = boost::geometry;

namespace scqa::geom {

namespace {

std::string upper_trimmed(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

void append_number(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_ring(std::string& out, const Ring& r) {
  out.push_back('(');
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) out.append(", ");
    append_number(out, r[i].x());
    out.push_back(' ');
    append_number(out, r[i].y());
  }
  out.push_back(')');
}

void append_polygon(std::string& out, const Polygon& p) {
  out.push_back('(');
  append_ring(out, p.outer());
  for (const auto& h : p.inners()) {
    out.append(", ");
    append_ring(out, h);
  }
  out.push_back(')');
}

Ring ring_from_json(const nlohmann::json& coords) {
  if (!coords.is_array()) throw ParseError("GeoJSON ring must be an array");
  Ring r;
  for (const auto& pt : coords) {
    if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number())
      throw ParseError("GeoJSON position must be [x, y]");
    r.push_back(Point(pt[0].get<double>(), pt[1].get<double>()));
  }
  if (!r.empty() && !bg::equals(r.front(), r.back())) r.push_back(r.front());
  return r;
}

Polygon polygon_from_json(const nlohmann::json& rings) {
  if (!rings.is_array()) throw ParseError("GeoJSON polygon must be an array of rings");
  Polygon p;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    if (i == 0)
      p.outer() = ring_from_json(rings[i]);
    else
      p.inners().push_back(ring_from_json(rings[i]));
  }
  return p;
}

nlohmann::json ring_to_json(const Ring& r) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& pt : r) out.push_back({pt.x(), pt.y()});
  return out;
}

nlohmann::json polygon_to_json(const Polygon& p) {
  nlohmann::json out = nlohmann::json::array();
  out.push_back(ring_to_json(p.outer()));
  for (const auto& h : p.inners()) out.push_back(ring_to_json(h));
  return out;
}

}  // namespace

Region parse_wkt(std::string_view wkt, const GeometryConfig& cfg) {
  const std::string norm = upper_trimmed(wkt);
  if (norm == "POLYGON EMPTY" || norm == "MULTIPOLYGON EMPTY" ||
      norm == "GEOMETRYCOLLECTION EMPTY" || norm.empty())
    return {};
  MultiPolygon mp;
  try {
    if (norm.rfind("MULTIPOLYGON", 0) == 0) {
      bg::read_wkt(std::string(wkt), mp);
    } else if (norm.rfind("POLYGON", 0) == 0) {
      Polygon p;
      bg::read_wkt(std::string(wkt), p);
      mp.push_back(std::move(p));
    } else {
      throw ParseError("unsupported WKT geometry (expected POLYGON or MULTIPOLYGON)");
    }
  } catch (const bg::read_wkt_exception& e) {
    throw ParseError(std::string("malformed WKT: ") + e.what());
  }
  return Region::from_polygons(std::move(mp), cfg);
}

std::string to_wkt(const Region& g) {
  if (g.empty()) return "POLYGON EMPTY";
  std::string out;
  if (g.polygon_count() == 1) {
    out = "POLYGON ";
    append_polygon(out, g.polygons().front());
    return out;
  }
  out = "MULTIPOLYGON (";
  for (std::size_t i = 0; i < g.polygon_count(); ++i) {
    if (i) out.append(", ");
    append_polygon(out, g.polygons()[i]);
  }
  out.push_back(')');
  return out;
}

Region from_geojson(const nlohmann::json& geometry, const GeometryConfig& cfg) {
  if (geometry.is_null()) return {};
  if (!geometry.is_object() || !geometry.contains("type"))
    throw ParseError("GeoJSON geometry must be an object with a type");
  const std::string type = geometry.at("type").get<std::string>();
  const auto coords = geometry.value("coordinates", nlohmann::json::array());
  MultiPolygon mp;
  if (type == "Polygon") {
    if (coords.empty()) return {};
    mp.push_back(polygon_from_json(coords));
  } else if (type == "MultiPolygon") {
    if (!coords.is_array()) throw ParseError("MultiPolygon coordinates must be an array");
    for (const auto& poly : coords)
      if (!poly.empty()) mp.push_back(polygon_from_json(poly));
    if (mp.empty()) return {};
  } else {
    throw ParseError("unsupported GeoJSON geometry type '" + type + "'");
  }
  return Region::from_polygons(std::move(mp), cfg);
}

nlohmann::json to_geojson(const Region& g) {
  if (g.polygon_count() <= 1) {
    nlohmann::json coords = nlohmann::json::array();
    if (!g.empty()) coords = polygon_to_json(g.polygons().front());
    return {{"type", "Polygon"}, {"coordinates", coords}};
  }
  nlohmann::json coords = nlohmann::json::array();
  for (const auto& p : g.polygons()) coords.push_back(polygon_to_json(p));
  return {{"type", "MultiPolygon"}, {"coordinates", coords}};
}

}  // namespace scqa::geom

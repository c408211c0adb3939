#include <charconv>
#include <sstream>

#include "scqa/core.hpp"

namespace scqa {

namespace {

std::string number(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string key_inequality(const RelationSchema& rel) {
  if (rel.key.size() == 1) return "r1." + rel.key[0] + " <> r2." + rel.key[0];
  std::string l = "(", r = "(";
  for (std::size_t i = 0; i < rel.key.size(); ++i) {
    if (i) {
      l += ", ";
      r += ", ";
    }
    l += "r1." + rel.key[i];
    r += "r2." + rel.key[i];
  }
  return l + ") <> " + r + ")";
}

std::string conflict_condition(geom::Predicate p, const std::string& g) {
  const std::string args = "(r1." + g + ", r2." + g + ")";
  switch (p) {
    case geom::Predicate::Intersects: return "Intersects" + args;
    case geom::Predicate::IIntersects: return "Intersects" + args + " AND NOT Touches" + args;
    case geom::Predicate::Equals: return "Equals" + args;
    default: throw SchemaError("no core view for predicate " + std::string(geom::short_name(p)));
  }
}

}  // namespace

std::string emit_core_sql(const CoreSIC& sic, const Schema& schema, const SqlDialect& dialect) {
  const auto& rel = schema.relation(sic.relation);
  const std::string g = dialect.geometry_column.empty() ? rel.geometry : dialect.geometry_column;
  const std::string view = dialect.view_prefix + std::string(geom::long_name(sic.pred));
  const std::string cond = conflict_condition(sic.pred, g);
  const std::string keys = key_inequality(rel);

  std::string select_attrs, group_attrs;
  for (const auto& a : rel.attributes) {
    select_attrs += "r1." + a.name + " AS " + a.name + ", ";
    group_attrs += "r1." + a.name + ", ";
  }
  const std::string r2_cols = [&] {
    std::string s;
    for (const auto& k : rel.key) s += "r2." + k + ", ";
    return s + "r2." + g;
  }();

  std::ostringstream out;
  out << "CREATE VIEW " << view << "\n";
  if (sic.pred != geom::Predicate::Equals) {
    const std::string removed = sic.pred == geom::Predicate::Intersects
                                    ? "Buffer(geomunion(r2." + g + "), " + number(dialect.d) + ")"
                                    : "geomunion(r2." + g + ")";
    out << "AS (SELECT " << select_attrs << "difference(r1." << g << ", " << removed << ") AS "
        << g << "\n"
        << "    FROM " << rel.name << " AS r1, " << rel.name << " AS r2\n"
        << "    WHERE " << keys << " AND " << cond << "\n"
        << "    GROUP BY " << group_attrs << "r1." << g << "\n"
        << "    UNION\n"
        << "    SELECT " << select_attrs << "r1." << g << " AS " << g << "\n";
  } else {
    out << "AS (SELECT " << select_attrs << "r1." << g << " AS " << g << "\n";
  }
  out << "    FROM " << rel.name << " AS r1\n"
      << "    WHERE NOT EXISTS (SELECT " << r2_cols << "\n"
      << "                      FROM " << rel.name << " AS r2\n"
      << "                      WHERE " << keys << " AND " << cond << "));\n";
  return out.str();
}

}  // namespace scqa

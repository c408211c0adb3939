#include "scqa/constraints.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "scqa/grid_index.hpp"

namespace scqa {

using geom::Predicate;

std::string_view cmp_op_name(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

namespace {

bool is_anonymous(const std::string& v) { return v == "_"; }

bool compare(const Value& a, CmpOp op, const Value& b) {
  const auto c = compare_values(a, b);
  switch (op) {
    case CmpOp::Eq: return c == 0;
    case CmpOp::Ne: return c != 0;
    case CmpOp::Lt: return c < 0;
    case CmpOp::Le: return c <= 0;
    case CmpOp::Gt: return c > 0;
    case CmpOp::Ge: return c >= 0;
  }
  return false;
}

// Where each variable is bound: first (atom, position) occurrence.
struct VarSite {
  std::size_t atom;
  std::size_t pos;
};

// Precomputed evaluation plan for one SIC.
struct Plan {
  const DenialSIC* sic;
  std::map<std::string, VarSite, std::less<>> thematic;
  std::map<std::string, std::size_t, std::less<>> spatial;
  // Checks to run once atom k is bound.
  std::vector<std::vector<std::pair<VarSite, VarSite>>> equalities;
  std::vector<std::vector<const Comparison*>> comparisons;
  std::vector<std::vector<const TopoAtom*>> topos;
  // For atom k > 0: an earlier atom linked to it by a topological atom.
  std::vector<std::optional<std::size_t>> anchor;
};

std::size_t site_atom(const Plan& plan, const Term& t) {
  return t.is_var ? plan.thematic.at(t.var).atom : 0;
}

Plan make_plan(const DenialSIC& sic) {
  Plan plan;
  plan.sic = &sic;
  const std::size_t n = sic.atoms.size();
  plan.equalities.resize(n);
  plan.comparisons.resize(n);
  plan.topos.resize(n);
  plan.anchor.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto& atom = sic.atoms[a];
    plan.spatial.emplace(atom.spatial_var, a);
    for (std::size_t p = 0; p < atom.thematic_vars.size(); ++p) {
      const auto& v = atom.thematic_vars[p];
      if (is_anonymous(v)) continue;
      auto [it, inserted] = plan.thematic.emplace(v, VarSite{a, p});
      if (!inserted) plan.equalities[a].push_back({it->second, VarSite{a, p}});
    }
  }
  for (const auto& c : sic.where) {
    std::size_t last = 0;
    for (const auto& t : c.lhs) last = std::max(last, site_atom(plan, t));
    for (const auto& t : c.rhs) last = std::max(last, site_atom(plan, t));
    plan.comparisons[last].push_back(&c);
  }
  for (const auto& t : sic.topo) {
    const std::size_t a = plan.spatial.at(t.s1), b = plan.spatial.at(t.s2);
    plan.topos[std::max(a, b)].push_back(&t);
    const std::size_t hi = std::max(a, b), lo = std::min(a, b);
    if (hi != lo && !plan.anchor[hi]) plan.anchor[hi] = lo;
  }
  return plan;
}

const Value& term_value(const Plan& plan, const Term& t, const std::vector<const SpatialTuple*>& bound) {
  if (!t.is_var) return t.constant;
  const auto& site = plan.thematic.at(t.var);
  return bound[site.atom]->thematic[site.pos];
}

bool comparison_holds(const Plan& plan, const Comparison& c,
                      const std::vector<const SpatialTuple*>& bound) {
  if (c.lhs.size() == 1)
    return compare(term_value(plan, c.lhs[0], bound), c.op, term_value(plan, c.rhs[0], bound));
  bool all_equal = true;
  for (std::size_t i = 0; i < c.lhs.size() && all_equal; ++i)
    all_equal = compare(term_value(plan, c.lhs[i], bound), CmpOp::Eq,
                        term_value(plan, c.rhs[i], bound));
  return c.op == CmpOp::Eq ? all_equal : !all_equal;
}

// Runs the checks that become decidable once atom k is bound.
bool checks_hold(const Plan& plan, std::size_t k, const std::vector<const SpatialTuple*>& bound,
                 const geom::GeometryConfig& cfg) {
  for (const auto& [a, b] : plan.equalities[k])
    if (compare_values(bound[a.atom]->thematic[a.pos], bound[b.atom]->thematic[b.pos]) != 0)
      return false;
  for (const auto* c : plan.comparisons[k])
    if (!comparison_holds(plan, *c, bound)) return false;
  for (const auto* t : plan.topos[k]) {
    const auto& g1 = bound[plan.spatial.at(t->s1)]->region;
    const auto& g2 = bound[plan.spatial.at(t->s2)]->region;
    if (!geom::topo(t->pred, g1, g2, cfg)) return false;
  }
  return true;
}

struct RelationData {
  std::vector<const SpatialTuple*> tuples;  // non-empty regions, by tid
  GridIndex index;
};

Term parse_term(std::string_view s) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return v;
  };
  s = trim(s);
  if (s.empty()) throw ParseError("empty term in comparison");
  Term t;
  if ((s.front() == '\'' || s.front() == '"') && s.size() >= 2 && s.back() == s.front()) {
    t.is_var = false;
    t.constant = std::string(s.substr(1, s.size() - 2));
    return t;
  }
  if (std::isdigit(static_cast<unsigned char>(s.front())) || s.front() == '-' || s.front() == '+') {
    t.is_var = false;
    if (s.find_first_of(".eE") == std::string_view::npos)
      t.constant = parse_value(s.front() == '+' ? s.substr(1) : s, AttrType::Integer);
    else
      t.constant = parse_value(s.front() == '+' ? s.substr(1) : s, AttrType::Real);
    return t;
  }
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
      throw ParseError("invalid variable name '" + std::string(s) + "'");
  t.var = std::string(s);
  return t;
}

std::vector<Term> parse_side(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::vector<Term> out;
  if (!s.empty() && s.front() == '(' && s.back() == ')') {
    s = s.substr(1, s.size() - 2);
    std::size_t start = 0;
    char quote = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      if (i < s.size() && quote) {
        if (s[i] == quote) quote = 0;
        continue;
      }
      if (i < s.size() && (s[i] == '\'' || s[i] == '"')) {
        quote = s[i];
        continue;
      }
      if (i == s.size() || s[i] == ',') {
        out.push_back(parse_term(s.substr(start, i - start)));
        start = i + 1;
      }
    }
    return out;
  }
  out.push_back(parse_term(s));
  return out;
}

CmpOp parse_op(std::string_view op) {
  if (op == "!=" || op == "<>") return CmpOp::Ne;
  if (op == "=" || op == "==") return CmpOp::Eq;
  if (op == "<") return CmpOp::Lt;
  if (op == "<=") return CmpOp::Le;
  if (op == ">") return CmpOp::Gt;
  if (op == ">=") return CmpOp::Ge;
  throw ParseError("unknown comparison operator '" + std::string(op) + "'");
}

std::vector<Term> side_from_json(const nlohmann::json& j) {
  if (j.is_string()) return {parse_term(j.get<std::string>())};
  if (j.is_array()) {
    std::vector<Term> out;
    for (const auto& e : j) {
      auto part = side_from_json(e);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (j.is_object() && j.contains("value")) {
    Term t;
    t.is_var = false;
    const auto& v = j.at("value");
    if (v.is_string())
      t.constant = v.get<std::string>();
    else if (v.is_number_integer())
      t.constant = v.get<std::int64_t>();
    else if (v.is_number())
      t.constant = v.get<double>();
    else
      throw ParseError("unsupported constant " + v.dump());
    return {t};
  }
  throw ParseError("unsupported comparison operand " + j.dump());
}

nlohmann::json term_to_json(const Term& t) {
  if (t.is_var) return t.var;
  return {{"value", std::visit([](const auto& x) { return nlohmann::json(x); }, t.constant)}};
}

}  // namespace

Comparison parse_comparison(std::string_view text) {
  // Leftmost operator outside quotes and parentheses.
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quote) {
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      --depth;
    } else if (depth == 0 && (c == '!' || c == '<' || c == '>' || c == '=')) {
      std::size_t len = 1;
      if (i + 1 < text.size() && (text[i + 1] == '=' || (c == '<' && text[i + 1] == '>'))) len = 2;
      Comparison cmp;
      cmp.op = parse_op(text.substr(i, len));
      cmp.lhs = parse_side(text.substr(0, i));
      cmp.rhs = parse_side(text.substr(i + len));
      return cmp;
    }
  }
  throw ParseError("no comparison operator in '" + std::string(text) + "'");
}

std::size_t DenialSIC::atom_of(std::string_view spatial_var) const {
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (atoms[i].spatial_var == spatial_var) return i;
  throw SchemaError("SIC " + id + ": unbound spatial variable '" + std::string(spatial_var) + "'");
}

void DenialSIC::validate(const Schema& schema) const {
  const std::string who = "SIC " + id;
  if (atoms.empty()) throw SchemaError(who + " has no relational atoms");
  if (topo.empty()) throw SchemaError(who + " has no topological atoms");
  std::set<std::string> spatial, thematic;
  for (const auto& a : atoms) {
    const auto& rel = schema.relation(a.relation);
    if (a.thematic_vars.size() != rel.arity())
      throw SchemaError(who + ": atom over " + a.relation + " binds " +
                        std::to_string(a.thematic_vars.size()) + " thematic variables, expected " +
                        std::to_string(rel.arity()));
    if (a.spatial_var.empty() || is_anonymous(a.spatial_var))
      throw SchemaError(who + ": atom over " + a.relation + " needs a named spatial variable");
    if (!spatial.insert(a.spatial_var).second)
      throw SchemaError(who + ": spatial variable '" + a.spatial_var + "' is bound twice");
    for (const auto& v : a.thematic_vars)
      if (!is_anonymous(v)) thematic.insert(v);
  }
  for (const auto& v : thematic)
    if (spatial.count(v)) throw SchemaError(who + ": '" + v + "' is both thematic and spatial");
  for (const auto& t : topo) {
    if (t.pred == Predicate::Disjoint)
      throw UnsupportedPredicate(who + ": Disjoint is not allowed in SICs");
    if (!spatial.count(t.s1) || !spatial.count(t.s2))
      throw SchemaError(who + ": topological atom uses an unbound spatial variable");
  }
  for (const auto& c : where) {
    if (c.lhs.empty() || c.lhs.size() != c.rhs.size())
      throw SchemaError(who + ": comparison sides differ in arity");
    if (c.lhs.size() > 1 && c.op != CmpOp::Eq && c.op != CmpOp::Ne)
      throw SchemaError(who + ": tuple comparisons support only = and !=");
    for (const auto* side : {&c.lhs, &c.rhs})
      for (const auto& t : *side)
        if (t.is_var && !thematic.count(t.var))
          throw SchemaError(who + ": comparison uses unbound thematic variable '" + t.var + "'");
  }
}

bool is_core_predicate(Predicate p) {
  return p == Predicate::IIntersects || p == Predicate::Intersects || p == Predicate::Equals;
}

DenialSIC CoreSIC::to_denial(const Schema& schema) const {
  const auto& rel = schema.relation(relation);
  if (!is_core_predicate(pred))
    throw SchemaError("core SIC " + id + ": predicate must be II, IT or EQ");
  DenialSIC sic;
  sic.id = id;
  Comparison keys;
  keys.op = CmpOp::Ne;
  for (int side = 1; side <= 2; ++side) {
    Atom a;
    a.relation = relation;
    for (const auto& attr : rel.attributes) a.thematic_vars.push_back(attr.name + std::to_string(side));
    a.spatial_var = "s" + std::to_string(side);
    sic.atoms.push_back(std::move(a));
  }
  for (const auto& k : rel.key) {
    keys.lhs.push_back(Term{true, k + "1", {}});
    keys.rhs.push_back(Term{true, k + "2", {}});
  }
  sic.where.push_back(std::move(keys));
  sic.topo.push_back({pred, "s1", "s2"});
  return sic;
}

std::optional<CoreSIC> as_core(const DenialSIC& sic, const Schema& schema) {
  if (sic.atoms.size() != 2 || sic.topo.size() != 1 || sic.where.size() != 1) return std::nullopt;
  const auto& a1 = sic.atoms[0];
  const auto& a2 = sic.atoms[1];
  if (a1.relation != a2.relation || !schema.has(a1.relation)) return std::nullopt;
  const auto& t = sic.topo[0];
  if (!is_core_predicate(t.pred) || t.s1 == t.s2) return std::nullopt;
  const std::set<std::string> svars{t.s1, t.s2};
  if (svars != std::set<std::string>{a1.spatial_var, a2.spatial_var}) return std::nullopt;
  // No extra joins: thematic variables occur once.
  std::set<std::string> seen;
  for (const auto* a : {&a1, &a2})
    for (const auto& v : a->thematic_vars)
      if (!is_anonymous(v) && !seen.insert(v).second) return std::nullopt;
  const auto& c = sic.where[0];
  if (c.op != CmpOp::Ne) return std::nullopt;
  const auto& rel = schema.relation(a1.relation);
  const auto key_idx = rel.key_indices();
  const std::set<std::size_t> key_set(key_idx.begin(), key_idx.end());
  auto position = [](const Atom& a, const Term& term) -> std::optional<std::size_t> {
    if (!term.is_var) return std::nullopt;
    for (std::size_t p = 0; p < a.thematic_vars.size(); ++p)
      if (a.thematic_vars[p] == term.var) return p;
    return std::nullopt;
  };
  auto matches = [&](const Atom& left, const Atom& right) {
    if (c.lhs.size() != key_idx.size()) return false;
    std::set<std::size_t> covered;
    for (std::size_t i = 0; i < c.lhs.size(); ++i) {
      auto p = position(left, c.lhs[i]);
      auto q = position(right, c.rhs[i]);
      if (!p || !q || *p != *q || !key_set.count(*p)) return false;
      covered.insert(*p);
    }
    return covered == key_set;
  };
  if (!matches(a1, a2) && !matches(a2, a1)) return std::nullopt;
  return CoreSIC{sic.id, a1.relation, t.pred};
}

bool all_core(const std::vector<DenialSIC>& sics, const Schema& schema) {
  return std::all_of(sics.begin(), sics.end(),
                     [&](const DenialSIC& s) { return as_core(s, schema).has_value(); });
}

std::vector<CoreSIC> normalize_core_sics(const std::vector<CoreSIC>& sics) {
  auto rank = [](Predicate p) {
    switch (p) {
      case Predicate::Intersects: return 0;
      case Predicate::IIntersects: return 1;
      case Predicate::Equals: return 2;
      default: throw SchemaError("not a core predicate: " + std::string(geom::short_name(p)));
    }
  };
  std::vector<CoreSIC> out;
  for (const auto& s : sics) {
    rank(s.pred);
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const CoreSIC& o) { return o.relation == s.relation; });
    if (it == out.end())
      out.push_back(s);
    else if (rank(s.pred) < rank(it->pred))
      *it = s;
  }
  return out;
}

std::vector<Tid> Violation::tid_set() const {
  std::vector<Tid> out = witness;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Violation> find_violations(const Instance& d, const DenialSIC& sic,
                                       std::size_t sic_index) {
  sic.validate(d.schema());
  const Plan plan = make_plan(sic);
  const auto& cfg = d.config();
  const std::size_t n = sic.atoms.size();

  std::map<std::string, RelationData, std::less<>> data;
  for (const auto& a : sic.atoms) {
    if (data.count(a.relation)) continue;
    RelationData rd;
    std::vector<geom::Box> boxes;
    for (const auto& t : d.tuples()) {
      if (t->relation != a.relation || t->region.empty()) continue;
      rd.tuples.push_back(t.get());
      boxes.push_back(t->region.bbox());
    }
    rd.index = GridIndex(boxes);
    data.emplace(a.relation, std::move(rd));
  }

  std::vector<Violation> out;
  std::set<std::vector<Tid>> seen;
  std::vector<const SpatialTuple*> bound(n, nullptr);
  std::vector<std::size_t> all_ids;

  auto recurse = [&](auto&& self, std::size_t k) -> void {
    if (k == n) {
      Violation v;
      v.sic_index = sic_index;
      v.sic_id = sic.id;
      for (const auto* t : bound) v.witness.push_back(t->tid);
      if (seen.insert(v.tid_set()).second) out.push_back(std::move(v));
      return;
    }
    const auto& rd = data.at(sic.atoms[k].relation);
    auto try_bind = [&](const SpatialTuple* t) {
      bound[k] = t;
      if (checks_hold(plan, k, bound, cfg)) self(self, k + 1);
    };
    if (plan.anchor[k]) {
      const auto& anchor_region = bound[*plan.anchor[k]]->region;
      for (std::size_t i : rd.index.query(anchor_region.bbox(), cfg.eps_len)) try_bind(rd.tuples[i]);
    } else {
      for (const auto* t : rd.tuples) try_bind(t);
    }
    bound[k] = nullptr;
  };
  recurse(recurse, 0);

  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return a.tid_set() < b.tid_set();
  });
  return out;
}

std::vector<Violation> find_violations(const Instance& d, const std::vector<DenialSIC>& sics) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < sics.size(); ++i) {
    auto v = find_violations(d, sics[i], i);
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  return out;
}

bool is_consistent(const Instance& d, const std::vector<DenialSIC>& sics) {
  for (std::size_t i = 0; i < sics.size(); ++i)
    if (!find_violations(d, sics[i], i).empty()) return false;
  return true;
}

bool body_holds(const Instance& d, const DenialSIC& sic, const std::vector<Tid>& witness) {
  if (witness.size() != sic.atoms.size()) return false;
  const Plan plan = make_plan(sic);
  std::vector<const SpatialTuple*> bound(witness.size(), nullptr);
  for (std::size_t k = 0; k < witness.size(); ++k) {
    const auto* t = d.find(witness[k]);
    if (!t || t->relation != sic.atoms[k].relation || t->region.empty()) return false;
    bound[k] = t;
    if (!checks_hold(plan, k, bound, d.config())) return false;
  }
  return true;
}

DenialSIC sic_from_json(const nlohmann::json& j, const Schema& schema) {
  try {
    if (!j.is_object()) throw ParseError("SIC must be a JSON object");
    if (!j.contains("atoms")) {
      CoreSIC core;
      core.id = j.value("id", std::string());
      core.relation = j.at("relation").get<std::string>();
      core.pred = geom::parse_predicate(j.at("pred").get<std::string>());
      const auto& rel = schema.relation(core.relation);
      if (j.contains("key")) {
        auto key = j.at("key").get<std::vector<std::string>>();
        if (std::set<std::string>(key.begin(), key.end()) !=
            std::set<std::string>(rel.key.begin(), rel.key.end()))
          throw SchemaError("core SIC on " + core.relation + " must use the relation key");
      }
      if (!is_core_predicate(core.pred))
        throw SchemaError("core SIC shorthand requires II, IT or EQ");
      DenialSIC sic = core.to_denial(schema);
      sic.validate(schema);
      return sic;
    }
    DenialSIC sic;
    sic.id = j.value("id", std::string());
    for (const auto& a : j.at("atoms")) {
      Atom atom;
      atom.relation = a.at("relation").get<std::string>();
      auto vars = a.at("vars").get<std::vector<std::string>>();
      if (vars.empty()) throw SchemaError("atom over " + atom.relation + " has no variables");
      atom.spatial_var = vars.back();
      vars.pop_back();
      atom.thematic_vars = std::move(vars);
      sic.atoms.push_back(std::move(atom));
    }
    for (const auto& w : j.value("where", nlohmann::json::array())) {
      if (w.is_string()) {
        sic.where.push_back(parse_comparison(w.get<std::string>()));
      } else {
        Comparison c;
        c.lhs = side_from_json(w.at("left"));
        c.op = parse_op(w.at("op").get<std::string>());
        c.rhs = side_from_json(w.at("right"));
        sic.where.push_back(std::move(c));
      }
    }
    for (const auto& t : j.at("topo")) {
      const auto args = t.at("args").get<std::vector<std::string>>();
      if (args.size() != 2) throw SchemaError("topological atom needs two arguments");
      sic.topo.push_back({geom::parse_predicate(t.at("pred").get<std::string>()), args[0], args[1]});
    }
    sic.validate(schema);
    return sic;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed SIC: ") + e.what());
  }
}

std::vector<DenialSIC> sics_from_json(const nlohmann::json& j, const Schema& schema) {
  const nlohmann::json& list = j.is_object() && j.contains("sics") ? j.at("sics") : j;
  if (!list.is_array()) throw ParseError("expected an array of SICs");
  std::vector<DenialSIC> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list.size(); ++i) {
    DenialSIC sic = sic_from_json(list[i], schema);
    if (sic.id.empty()) sic.id = "sic" + std::to_string(i + 1);
    if (!ids.insert(sic.id).second) throw SchemaError("duplicate SIC id '" + sic.id + "'");
    out.push_back(std::move(sic));
  }
  return out;
}

nlohmann::json sic_to_json(const DenialSIC& sic) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : sic.atoms) {
    auto vars = a.thematic_vars;
    vars.push_back(a.spatial_var);
    atoms.push_back({{"relation", a.relation}, {"vars", vars}});
  }
  nlohmann::json where = nlohmann::json::array();
  for (const auto& c : sic.where) {
    nlohmann::json l = nlohmann::json::array(), r = nlohmann::json::array();
    for (const auto& t : c.lhs) l.push_back(term_to_json(t));
    for (const auto& t : c.rhs) r.push_back(term_to_json(t));
    where.push_back({{"left", l}, {"op", cmp_op_name(c.op)}, {"right", r}});
  }
  nlohmann::json topo = nlohmann::json::array();
  for (const auto& t : sic.topo)
    topo.push_back({{"pred", geom::short_name(t.pred)}, {"args", {t.s1, t.s2}}});
  return {{"id", sic.id}, {"atoms", atoms}, {"where", where}, {"topo", topo}};
}

}  // namespace scqa

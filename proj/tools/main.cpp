// spatial-cqa: command-line front end of the spatial CQA library.
//
// Exit codes: 0 success (for `check`, a consistent instance), 1 `check`
// found violations, 2 input or usage error, 3 internal invariant failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "scqa/bench.hpp"
#include "scqa/constraints.hpp"
#include "scqa/core.hpp"
#include "scqa/instance_io.hpp"
#include "scqa/query.hpp"
#include "scqa/repair.hpp"
#include "scqa/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scqa;

namespace {

struct Inputs {
  std::string schema;
  std::vector<std::string> data;  // Rel=path
  std::string sics;
  std::string query;
  std::optional<double> d;
  std::optional<double> epsilon;
  unsigned threads = 1;
  std::string format = "geojson";
  std::string out;
};

struct Loaded {
  std::shared_ptr<const Schema> schema;
  Instance instance;
  std::vector<DenialSIC> sics;
};

Loaded load_inputs(const Inputs& in, bool need_sics) {
  if (in.schema.empty()) throw Error("--schema is required");
  auto schema = std::make_shared<Schema>(io::load_schema(in.schema));
  std::vector<Row> rows;
  for (const auto& spec : in.data) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error("--data expects Relation=path, got '" + spec + "'");
    const std::string rel = spec.substr(0, eq);
    auto part = io::read_rows(spec.substr(eq + 1), schema->relation(rel));
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  std::optional<geom::Box> extent;
  for (const auto& r : rows) {
    if (r.region.empty()) continue;
    if (!extent) {
      extent = r.region.bbox();
    } else {
      boost::geometry::expand(*extent, r.region.bbox());
    }
  }
  geom::GeometryConfig cfg = extent ? geom::GeometryConfig::for_extent(*extent, in.d) : geom::default_config();
  if (!extent && in.d) cfg.d = *in.d;
  if (in.epsilon) cfg.eps_area = *in.epsilon;
  cfg.validate();
  Loaded out{schema, Instance::load(schema, rows, cfg), {}};
  if (need_sics) {
    if (in.sics.empty()) throw Error("--sics is required");
    out.sics = sics_from_json(io::read_json_file(in.sics), *schema);
  }
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    io::write_text_file(path, text);
  }
}

std::string join_tids(const std::vector<Tid>& tids) {
  std::string s;
  for (const auto& t : tids) s += (s.empty() ? "" : ",") + std::to_string(t.value);
  return s;
}

std::string describe(const Instance& d, Tid tid) {
  const auto& t = d.at(tid);
  std::string s = t.relation + "(";
  const auto key = d.key_of(t);
  for (std::size_t i = 0; i < key.size(); ++i) s += (i ? "," : "") + to_string(key[i]);
  return s + ")";
}

int cmd_check(const Inputs& in) {
  const auto l = load_inputs(in, true);
  const auto violations = find_violations(l.instance, l.sics);
  json report = json::array();
  for (const auto& v : violations) {
    json tuples = json::array();
    std::cout << v.sic_id << ':';
    for (const auto& tid : v.witness) {
      std::cout << ' ' << describe(l.instance, tid);
      tuples.push_back({{"tid", tid.value}, {"tuple", describe(l.instance, tid)}});
    }
    std::cout << '\n';
    report.push_back({{"sic", v.sic_id}, {"witness", tuples}});
  }
  std::cout << violations.size() << " violation(s)\n";
  if (!in.out.empty()) io::write_text_file(in.out, json{{"violations", report}}.dump(2) + "\n");
  return violations.empty() ? 0 : 1;
}

json steps_to_json(const std::vector<Step>& steps) {
  json out = json::array();
  for (const auto& s : steps)
    out.push_back({{"sic", s.sic_id},
                   {"pred", geom::short_name(s.pred)},
                   {"side", s.side == Side::First ? "first" : "second"},
                   {"target", s.target.value},
                   {"other", s.other.value},
                   {"witness", join_tids(s.witness)}});
  return out;
}

std::string instance_text(const Instance& d, const std::string& format, const std::string& relation = {}) {
  if (format == "csv") {
    if (relation.empty()) throw Error("csv output needs a single relation");
    return io::relation_to_csv(d, relation);
  }
  return io::instance_to_geojson(d).dump(2) + "\n";
}

int cmd_repair(const Inputs& in, std::size_t limit_nodes, bool full_ordering, bool all_leaves) {
  if (in.out.empty()) throw Error("repair needs --out DIR");
  const auto l = load_inputs(in, true);
  RepairOptions opt;
  opt.limits.max_nodes = limit_nodes;
  opt.full_ordering = full_ordering;
  opt.threads = in.threads;
  const auto set = enumerate_repairs(l.instance, l.sics, opt);
  fs::create_directories(in.out);
  json files = json::array();
  std::size_t n = 0;
  for (const auto& r : set.repairs) {
    if (!r.minimal && !all_leaves) continue;
    if (!validate_shrink_repair(l.instance, r.instance, identity_correlation(l.instance), l.sics))
      throw InvariantFailure("repair leaf fails the shrink-repair check");
    std::ostringstream name;
    name << "repair_" << std::setw(3) << std::setfill('0') << ++n << ".geojson";
    io::write_text_file(fs::path(in.out) / name.str(), io::instance_to_geojson(r.instance).dump(2) + "\n");
    files.push_back({{"file", name.str()},
                     {"delta", r.delta},
                     {"minimal", r.minimal},
                     {"steps", steps_to_json(r.provenance)}});
  }
  const json manifest = {{"repairs", files},
                         {"leaves", set.repairs.size()},
                         {"minimal", set.minimal_count()},
                         {"min_delta", set.min_delta},
                         {"nodes_expanded", set.nodes_expanded},
                         {"max_depth", set.max_depth_reached},
                         {"full_ordering", full_ordering}};
  io::write_text_file(fs::path(in.out) / "manifest.json", manifest.dump(2) + "\n");
  std::cout << set.minimal_count() << " minimal repair(s) of " << set.repairs.size() << " leaves, min delta "
            << set.min_delta << '\n';
  return 0;
}

int cmd_core(const Inputs& in, const std::string& method, std::size_t limit_nodes) {
  const auto l = load_inputs(in, true);
  CoreInstance core = [&] {
    if (method == "repairs") {
      RepairOptions opt;
      opt.limits.max_nodes = limit_nodes;
      opt.threads = in.threads;
      return core_via_repairs(l.instance, l.sics, opt);
    }
    if (method != "direct") throw Error("--method must be direct or repairs");
    return core_direct(l.instance, l.sics, in.threads);
  }();
  if (in.format == "csv") {
    if (in.out.empty()) throw Error("csv core output needs --out DIR");
    fs::create_directories(in.out);
    for (const auto& [name, rel] : core.instance.schema().relations())
      io::write_text_file(fs::path(in.out) / (name + ".csv"), io::relation_to_csv(core.instance, name));
  } else {
    emit(in.out, instance_text(core.instance, in.format));
  }
  return 0;
}

int cmd_cqa(const Inputs& in, bool materialize, bool explain, std::size_t limit_nodes,
            const std::string& manifest_path) {
  const auto l = load_inputs(in, true);
  if (in.query.empty()) throw Error("--query is required");
  const Query q = query_from_json(io::read_json_file(in.query), *l.schema, l.instance.config());
  const bool core_path = is_basic(q) && all_core(l.sics, *l.schema);
  std::string path;
  AnswerSet answers;
  if (core_path && materialize) {
    path = "core-materialized";
    answers = cqa_on_core(q, core_direct(l.instance, l.sics, in.threads));
  } else if (core_path) {
    path = "core";
    answers = cqa_via_core(q, l.instance, l.sics, in.threads);
  } else {
    path = "repairs";
    RepairOptions opt;
    opt.limits.max_nodes = limit_nodes;
    opt.threads = in.threads;
    answers = cqa_via_repairs(q, l.instance, l.sics, opt);
  }
  const Instance* original = explain ? &l.instance : nullptr;
  emit(in.out, in.format == "csv" ? answers_to_csv(answers, original)
                                  : answers_to_geojson(answers, original).dump(2) + "\n");
  const json manifest = {{"path", path},
                         {"basic_query", is_basic(q)},
                         {"core_sics", all_core(l.sics, *l.schema)},
                         {"predicate", geom::short_name(query_predicate(q))},
                         {"answers", answers.size()}};
  if (!manifest_path.empty()) {
    io::write_text_file(manifest_path, manifest.dump(2) + "\n");
  } else if (!in.out.empty() && in.out != "-") {
    io::write_text_file(in.out + ".manifest.json", manifest.dump(2) + "\n");
  } else {
    std::cerr << manifest.dump() << '\n';
  }
  return 0;
}

int cmd_sqlgen(const Inputs& in) {
  if (in.schema.empty() || in.sics.empty()) throw Error("sqlgen needs --schema and --sics");
  const Schema schema = io::load_schema(in.schema);
  const auto sics = sics_from_json(io::read_json_file(in.sics), schema);
  SqlDialect dialect;
  if (in.d) dialect.d = *in.d;
  std::string text;
  for (const auto& c : core_sics(sics, schema)) text += emit_core_sql(c, schema, dialect) + "\n";
  emit(in.out, text);
  return 0;
}

std::uint64_t effective_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("SPATIAL_CQA_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(std::string("SPATIAL_CQA_SEED is not an unsigned integer: ") + env);
    }
  }
  return seed;
}

int cmd_gen(const Inputs& in, std::size_t n, double pct, const std::string& mode, std::uint64_t seed) {
  if (in.out.empty()) throw Error("gen needs --out DIR");
  SyntheticOptions o;
  o.n = n;
  o.conflict_pct = pct;
  o.mode = parse_conflict_mode(mode);
  o.seed = effective_seed(seed);
  o.d = in.d;
  const auto data = gen_synthetic(o);
  fs::create_directories(in.out);
  const fs::path dir(in.out);
  io::write_text_file(dir / "schema.json", io::schema_to_json(data.instance.schema()).dump(2) + "\n");
  json sics = json::array();
  for (const auto& s : data.sics) sics.push_back(sic_to_json(s));
  io::write_text_file(dir / "sics.json", json{{"sics", sics}}.dump(2) + "\n");
  if (in.format == "csv")
    io::write_text_file(dir / "R.csv", io::relation_to_csv(data.instance, "R"));
  else
    io::write_text_file(dir / "R.geojson", io::relation_to_geojson(data.instance, "R").dump(2) + "\n");
  std::cout << data.instance.size() << " tuples, " << data.conflicted << " in conflicts, seed " << o.seed
            << '\n';
  return 0;
}

int cmd_bench(const Inputs& in, bool quick, std::size_t repeats, std::uint64_t seed) {
  BenchConfig c;
  c.seed = effective_seed(seed);
  c.repeats = repeats;
  c.threads = in.threads;
  if (quick) {
    c.sizes = {250, 500, 1000, 2000};
    c.equals_n = 2000;
    c.query_n = 1000;
    c.windows_per_size = 20;
  }
  emit(in.out, run_bench(c).to_csv());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistent query answering over spatial databases"};
  app.require_subcommand(1);
  Inputs in;

  auto add_d = [&](CLI::App* sub) {
    sub->add_option("--d", in.d, "Buffer distance separating touching geometries");
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", in.threads, "Worker threads; 1 is the sequential reference mode, 0 all cores");
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", in.out, "Output file or directory"); };
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--schema", in.schema, "Schema JSON file");
    sub->add_option("--data", in.data, "Relation data as Relation=path (.csv or .geojson)");
    sub->add_option("--sics", in.sics, "SIC JSON file");
    add_d(sub);
    sub->add_option("--epsilon", in.epsilon, "Area tolerance for emptiness and equality");
    add_threads(sub);
    add_out(sub);
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", in.format, "Output format")->check(CLI::IsMember({"geojson", "csv"}));
  };

  auto* check = app.add_subcommand("check", "List SIC violations");
  add_inputs(check);

  std::size_t limit_nodes = 1'000'000;
  bool full_ordering = false, all_leaves = false;
  auto* repair = app.add_subcommand("repair", "Enumerate repairs into numbered GeoJSON files");
  add_inputs(repair);
  repair->add_option("--limit-nodes", limit_nodes, "Abort the search after this many expanded nodes");
  repair->add_flag("--full-ordering", full_ordering, "Branch on every violation, not only the first");
  repair->add_flag("--all-leaves", all_leaves, "Also write non-minimal consistent leaves");

  std::string method = "direct";
  auto* core = app.add_subcommand("core", "Compute the core instance");
  add_inputs(core);
  add_format(core);
  core->add_option("--method", method, "direct or repairs")->check(CLI::IsMember({"direct", "repairs"}));
  core->add_option("--limit-nodes", limit_nodes, "Repair search node limit for --method repairs");

  bool materialize = false, explain = false;
  std::string manifest;
  auto* cqa = app.add_subcommand("cqa", "Consistent answers to a range or join query");
  add_inputs(cqa);
  add_format(cqa);
  cqa->add_option("--query", in.query, "Query JSON file");
  cqa->add_flag("--materialize", materialize, "Compute the whole core first and query it");
  cqa->add_flag("--explain", explain, "Add the relative area change of each answer geometry");
  cqa->add_option("--limit-nodes", limit_nodes, "Repair search node limit");
  cqa->add_option("--manifest", manifest, "Where to write the run manifest");

  auto* sqlgen = app.add_subcommand("sqlgen", "Emit SQL view definitions of the core");
  sqlgen->add_option("--schema", in.schema, "Schema JSON file");
  sqlgen->add_option("--sics", in.sics, "SIC JSON file");
  add_d(sqlgen);
  add_out(sqlgen);

  std::size_t gen_n = 1000;
  double gen_pct = 10;
  std::string gen_mode = "iintersects";
  std::uint64_t seed = 1;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  add_d(gen);
  add_out(gen);
  add_format(gen);
  gen->add_option("--n", gen_n, "Tuple count");
  gen->add_option("--pct", gen_pct, "Percentage of tuples in conflict");
  gen->add_option("--mode", gen_mode, "equals, iintersects or intersects");
  gen->add_option("--seed", seed, "Random seed (SPATIAL_CQA_SEED overrides)");

  bool quick = false;
  std::size_t repeats = 5;
  auto* bench = app.add_subcommand("bench", "Run the timing sweeps and print CSV");
  add_threads(bench);
  add_out(bench);
  bench->add_option("--seed", seed, "Random seed (SPATIAL_CQA_SEED overrides)");
  bench->add_option("--repeats", repeats, "Runs per timing; the median is reported");
  bench->add_flag("--quick", quick, "Smaller sweep sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmd_check(in);
    if (*repair) return cmd_repair(in, limit_nodes, full_ordering, all_leaves);
    if (*core) return cmd_core(in, method, limit_nodes);
    if (*cqa) return cmd_cqa(in, materialize, explain, limit_nodes, manifest);
    if (*sqlgen) return cmd_sqlgen(in);
    if (*gen) return cmd_gen(in, gen_n, gen_pct, gen_mode, seed);
    if (*bench) return cmd_bench(in, quick, repeats, seed);
  } catch (const InvariantFailure& e) {
    std::cerr << "invariant failure: " << e.what() << '\n';
    return 3;
  } catch (const SearchLimitExceeded& e) {
    std::cerr << "error: " << e.what() << " (" << e.nodes_expanded << " nodes, " << e.leaves_found
              << " leaves)\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

#include "scqa/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

#include "scqa/core.hpp"
#include "scqa/instance_io.hpp"

namespace scqa {

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out << "sweep,operation,mode,tuples,conflict_pct,window_frac,seconds,answers\n";
  for (const auto& r : rows)
    out << r.sweep << ',' << r.operation << ',' << r.mode << ',' << r.tuples << ','
        << r.conflict_pct << ',' << r.window_frac << ',' << r.seconds << ',' << r.answers << '\n';
  return out.str();
}

std::vector<BenchRow> BenchReport::select(std::string_view sweep, std::string_view operation,
                                          std::string_view mode) const {
  std::vector<BenchRow> out;
  for (const auto& r : rows)
    if (r.sweep == sweep && r.operation == operation && (mode.empty() || r.mode == mode))
      out.push_back(r);
  return out;
}

double median_seconds(const std::function<void()>& fn, std::size_t repeats) {
  std::vector<double> times;
  for (std::size_t i = 0; i < std::max<std::size_t>(1, repeats); ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t m = times.size();
  return m % 2 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
}

namespace {

std::vector<RangeQuery> random_windows(const Instance& d, double frac, std::size_t count,
                                       geom::Predicate pred, std::uint64_t seed) {
  const auto box = *d.extent();
  const double w = box.max_corner().x() - box.min_corner().x();
  const double h = box.max_corner().y() - box.min_corner().y();
  const double sw = frac * w, sh = frac * h;
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<RangeQuery> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = box.min_corner().x() + unit() * (w - sw);
    const double y = box.min_corner().y() + unit() * (h - sh);
    out.push_back({"R", pred, geom::Region::rectangle(x, y, x + sw, y + sh), {}});
  }
  return out;
}

// The core as a materialized view: one GeoJSON feature per row that keeps
// a geometry. Returns the number of rows.
std::size_t materialize_core(const Instance& core) {
  auto features = nlohmann::json::array();
  for (const auto& t : core.tuples()) {
    if (t->region.empty()) continue;
    const auto& rel = core.schema().relation(t->relation);
    nlohmann::json props = nlohmann::json::object();
    for (std::size_t i = 0; i < rel.attributes.size(); ++i)
      props[rel.attributes[i].name] = to_string(t->thematic[i]);
    features.push_back({{"type", "Feature"}, {"properties", std::move(props)},
                        {"geometry", geom::to_geojson(t->region)}});
  }
  const std::size_t rows = features.size();
  const std::string text =
      nlohmann::json{{"type", "FeatureCollection"}, {"features", std::move(features)}}.dump();
  if (text.empty()) throw InvariantFailure("empty core export");
  return rows;
}

// Median core time per data set. Repeats are interleaved across the sets
// after one untimed pass, so drift in machine load hits every point of a
// sweep alike instead of bending the trend.
std::vector<std::pair<double, std::size_t>> time_cores(const std::vector<SyntheticData>& sets,
                                                       const BenchConfig& c) {
  std::vector<std::vector<double>> samples(sets.size());
  std::vector<std::size_t> rows(sets.size(), 0);
  const std::size_t repeats = std::max<std::size_t>(1, c.repeats);
  for (std::size_t r = 0; r <= repeats; ++r) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto start = std::chrono::steady_clock::now();
      rows[i] = materialize_core(core_direct(sets[i].instance, sets[i].sics, c.threads).instance);
      const auto stop = std::chrono::steady_clock::now();
      if (r > 0) samples[i].push_back(std::chrono::duration<double>(stop - start).count());
    }
  }
  std::vector<std::pair<double, std::size_t>> out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    auto& t = samples[i];
    std::sort(t.begin(), t.end());
    const std::size_t m = t.size();
    out.push_back({m % 2 ? t[m / 2] : 0.5 * (t[m / 2 - 1] + t[m / 2]), rows[i]});
  }
  return out;
}

}  // namespace

BenchReport run_bench(const BenchConfig& c) {
  BenchReport report;

  if (c.run_sizes) {
    for (ConflictMode mode : c.size_sweep_modes) {
      std::vector<SyntheticData> sets;
      for (std::size_t n : c.sizes)
        sets.push_back(gen_synthetic({n, c.size_sweep_pct, mode, c.seed, std::nullopt}));
      const auto times = time_cores(sets, c);
      for (std::size_t i = 0; i < sets.size(); ++i)
        report.rows.push_back({"sizes", "core", std::string(conflict_mode_name(mode)), c.sizes[i],
                               c.size_sweep_pct, 0, times[i].first, times[i].second});
    }
  }

  if (c.run_equals) {
    std::vector<SyntheticData> sets;
    for (double pct : c.equals_pcts)
      sets.push_back(gen_synthetic({c.equals_n, pct, ConflictMode::Equals, c.seed, std::nullopt}));
    const auto times = time_cores(sets, c);
    for (std::size_t i = 0; i < sets.size(); ++i)
      report.rows.push_back({"equals", "core", "equals", c.equals_n, c.equals_pcts[i], 0,
                             times[i].first, times[i].second});
  }

  if (c.run_queries) {
    const auto data =
        gen_synthetic({c.query_n, c.query_pct, ConflictMode::IIntersects, c.seed, std::nullopt});
    const auto core_sic = core_sics(data.sics, data.instance.schema());
    for (double frac : c.window_fracs) {
      const auto windows = random_windows(data.instance, frac, c.windows_per_size,
                                          geom::Predicate::Intersects, c.seed + 1);
      std::size_t simple = 0, consistent = 0;
      const double t_range = median_seconds(
          [&] {
            simple = 0;
            for (const auto& q : windows) simple += eval_range(q, data.instance).size();
          },
          c.repeats);
      const double t_cqa = median_seconds(
          [&] {
            consistent = 0;
            for (const auto& q : windows)
              consistent += cqa_via_core(Query{q}, data.instance, core_sic, c.threads).size();
          },
          c.repeats);
      report.rows.push_back({"queries", "range", "iintersects", c.query_n, c.query_pct, frac,
                             t_range, simple});
      report.rows.push_back({"queries", "range_cqa", "iintersects", c.query_n, c.query_pct, frac,
                             t_cqa, consistent});
    }
    const JoinQuery join{"R", "R", geom::Predicate::IIntersects, {}, {}};
    std::size_t simple = 0, consistent = 0;
    const double t_join =
        median_seconds([&] { simple = eval_join(join, data.instance).size(); }, c.repeats);
    const double t_cqa = median_seconds(
        [&] { consistent = cqa_via_core(Query{join}, data.instance, core_sic, c.threads).size(); },
        c.repeats);
    report.rows.push_back(
        {"queries", "join", "iintersects", c.query_n, c.query_pct, 0, t_join, simple});
    report.rows.push_back(
        {"queries", "join_cqa", "iintersects", c.query_n, c.query_pct, 0, t_cqa, consistent});
  }
  return report;
}

}  // namespace scqa

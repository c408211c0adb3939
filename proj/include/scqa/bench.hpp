#pragma once

// Timing harness over synthetic instances. Every figure is the median of
// `repeats` runs on a monotonic clock. Core timings of one sweep interleave
// their repeats after an untimed warm-up pass.
//
// Operations:
//   core       core_direct plus writing the rows that keep a geometry as
//              GeoJSON (a materialized view has to produce its rows);
//   range      simple range queries over random windows;
//   range_cqa  the same windows answered consistently through the core;
//   join       simple self-join;
//   join_cqa   the self-join answered consistently through the core.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scqa/synthetic.hpp"

namespace scqa {

struct BenchRow {
  std::string sweep;
  std::string operation;
  std::string mode;
  std::size_t tuples = 0;
  double conflict_pct = 0;
  double window_frac = 0;
  double seconds = 0;
  std::size_t answers = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  std::string to_csv() const;
  /// Rows of one sweep and operation, in insertion order.
  std::vector<BenchRow> select(std::string_view sweep, std::string_view operation,
                               std::string_view mode = {}) const;
};

struct BenchConfig {
  std::vector<std::size_t> sizes = {1000, 2000, 4000, 8000};
  double size_sweep_pct = 10;
  std::vector<ConflictMode> size_sweep_modes = {ConflictMode::IIntersects, ConflictMode::Intersects};
  std::size_t equals_n = 8000;
  std::vector<double> equals_pcts = {0, 20, 40, 60};
  std::size_t query_n = 4000;
  double query_pct = 10;
  std::vector<double> window_fracs = {0.01, 0.02, 0.03, 0.04, 0.05};
  std::size_t windows_per_size = 50;
  std::size_t repeats = 5;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  bool run_sizes = true;
  bool run_equals = true;
  bool run_queries = true;
};

/// Median wall time in seconds of `repeats` calls.
double median_seconds(const std::function<void()>& fn, std::size_t repeats);

BenchReport run_bench(const BenchConfig& config);

}  // namespace scqa

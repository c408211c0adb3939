#pragma once

// Synthetic instances of homogeneously placed rectangles with injected
// conflicts.
//
// Tuple i sits in cell (i mod side, i div side) of a side x side grid of
// 10-unit cells, side = ceil(sqrt(n)). Each rectangle has five ring points
// and stays inside its cell with a gap of at least 1.5 units to its
// neighbours. Conflicts join horizontally adjacent tuples of one row:
//   equals      the second tuple takes a copy of the first's rectangle;
//   iintersects the first rectangle is widened past the second's left edge;
//   intersects  the first rectangle's right edge is snapped onto the
//               second's left edge.
// An odd conflict count uses one chain of three tuples.

#include <cstdint>
#include <string>
#include <vector>

#include "scqa/constraints.hpp"

namespace scqa {

enum class ConflictMode { Equals, IIntersects, Intersects };

ConflictMode parse_conflict_mode(std::string_view name);
std::string_view conflict_mode_name(ConflictMode m);
/// EQ, II and IT respectively.
geom::Predicate conflict_predicate(ConflictMode m);

struct SyntheticOptions {
  std::size_t n = 1000;
  double conflict_pct = 0;
  ConflictMode mode = ConflictMode::IIntersects;
  std::uint64_t seed = 1;
  /// Buffer distance; defaults to 1e-3 of the layout diagonal.
  std::optional<double> d;
};

struct SyntheticData {
  Instance instance;
  std::vector<DenialSIC> sics;  // the single core SIC of the mode
  std::size_t conflicted = 0;   // tuples participating in a conflict
};

/// Relation R(id integer, name string; geometry) keyed by id.
std::shared_ptr<const Schema> synthetic_schema();

/// Exactly floor(n * pct / 100) tuples take part in conflicts. Throws Error
/// if that count is 1, or if the grid has too few adjacent slots.
SyntheticData gen_synthetic(const SyntheticOptions& options);

}  // namespace scqa

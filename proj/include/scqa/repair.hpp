#pragma once

// Admissible transformations and the search over accessible instances.
//
// A step picks a violation and one of its topological atoms T(s1, s2) and
// either shrinks the region bound to s1 with tr^T or the region bound to s2
// with the converse transformation. Every step strictly decreases the total
// area, so the search terminates.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "scqa/constraints.hpp"

namespace scqa {

/// Makes a true atom T(g1, g2) false by shrinking g1; returns g1 when the
/// atom is already false. Throws UnsupportedPredicate for Disjoint.
geom::Region tr(geom::Predicate t, const geom::Region& g1, const geom::Region& g2,
                const geom::GeometryConfig& cfg = geom::default_config());
/// tr with the converse predicate, applied to the second argument of T.
geom::Region tr_converse(geom::Predicate t, const geom::Region& g2, const geom::Region& g1,
                         const geom::GeometryConfig& cfg = geom::default_config());

enum class Side { First, Second };

struct Step {
  std::size_t sic_index = 0;
  std::string sic_id;
  std::vector<Tid> witness;
  std::size_t topo_index = 0;
  geom::Predicate pred = geom::Predicate::IIntersects;
  Side side = Side::First;
  Tid target;  // tid whose region was replaced
  Tid other;
};

struct RepairNode {
  Instance instance;
  std::vector<Step> applied;
  double total_area = 0;

  static RepairNode root(const Instance& d);
};

/// Applies one Def.-style step. Throws StaleViolation if the violation does
/// not hold in the node, InvariantFailure if the area fails to decrease by
/// more than eps_area.
RepairNode apply_step(const RepairNode& node, const DenialSIC& sic, const Violation& v,
                      std::size_t topo_index, Side side);

struct SearchLimits {
  std::size_t max_nodes = 1'000'000;
  std::size_t max_depth = 1'000;
};

struct RepairOptions {
  SearchLimits limits;
  /// Branch on every violation instead of only the first in canonical order.
  bool full_ordering = false;
  /// 0 = hardware concurrency; 1 = sequential reference mode.
  unsigned threads = 1;
  /// Two leaves are Δ-tied when their distances differ by at most this;
  /// defaults to eps_area * (1 + tuple count).
  std::optional<double> delta_tolerance;
};

struct Repair {
  Instance instance;
  double delta = 0;
  bool minimal = false;
  /// Steps of the first path that reached this leaf.
  std::vector<Step> provenance;
};

struct RepairSet {
  Instance original;
  /// Every distinct consistent leaf, in discovery order.
  std::vector<Repair> repairs;
  double min_delta = 0;
  std::size_t nodes_expanded = 0;
  std::size_t max_depth_reached = 0;

  std::vector<const Repair*> minimal() const;
  std::size_t minimal_count() const;
};

class SearchLimitExceeded : public Error {
 public:
  SearchLimitExceeded(const std::string& what, std::size_t nodes, std::size_t leaves)
      : Error(what), nodes_expanded(nodes), leaves_found(leaves) {}
  std::size_t nodes_expanded;
  std::size_t leaves_found;
};

/// Exhaustive search with memoization of geometrically equal instances.
/// Throws SearchLimitExceeded rather than returning a truncated set.
RepairSet enumerate_repairs(const Instance& d, const std::vector<DenialSIC>& sics,
                            const RepairOptions& options = {});

struct VersionSet {
  Tid tid;
  /// Distinct regions of the tid across minimal repairs.
  std::vector<geom::Region> versions;

  /// The version contained in all others, if one exists.
  std::optional<geom::Region> minimum(const geom::GeometryConfig& cfg) const;
};

/// Throws Error for an unknown tid.
VersionSet versions(const RepairSet& repairs, Tid tid);

/// d2 consistent, correlated to d by f, and every region shrinks.
bool validate_shrink_repair(const Instance& d, const Instance& d2, const Correlation& f,
                            const std::vector<DenialSIC>& sics);

}  // namespace scqa

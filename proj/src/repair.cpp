#include "scqa/repair.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "scqa/parallel.hpp"

namespace scqa {

using geom::Predicate;
using geom::Region;

Region tr(Predicate t, const Region& g1, const Region& g2, const geom::GeometryConfig& cfg) {
  if (t == Predicate::Disjoint)
    throw UnsupportedPredicate("no admissible transformation for Disjoint");
  if (!geom::topo(t, g1, g2, cfg)) return g1;
  switch (t) {
    case Predicate::Overlaps:
    case Predicate::Includes:
    case Predicate::Covers: {
      Region diff = geom::difference(g1, g2, cfg);
      const double inter = geom::area(geom::intersection(g1, g2, cfg));
      if (inter <= geom::area(diff)) return diff;
      return geom::difference(g1, diff, cfg);
    }
    case Predicate::Inside:
    case Predicate::CoveredBy:
    case Predicate::IIntersects:
    case Predicate::Within:
    case Predicate::Contains:
      return geom::difference(g1, g2, cfg);
    case Predicate::Touches:
    case Predicate::Intersects:
      return geom::difference(g1, geom::buffer(g2, cfg.d, cfg), cfg);
    case Predicate::Equals:
      return {};
    case Predicate::Disjoint:
      break;
  }
  throw UnsupportedPredicate("no admissible transformation for " +
                             std::string(geom::short_name(t)));
}

Region tr_converse(Predicate t, const Region& g2, const Region& g1,
                   const geom::GeometryConfig& cfg) {
  return tr(geom::converse(t), g2, g1, cfg);
}

RepairNode RepairNode::root(const Instance& d) { return RepairNode{d, {}, d.total_area()}; }

RepairNode apply_step(const RepairNode& node, const DenialSIC& sic, const Violation& v,
                      std::size_t topo_index, Side side) {
  const Instance& d = node.instance;
  const auto& cfg = d.config();
  if (topo_index >= sic.topo.size()) throw Error("topological atom index out of range");
  if (!body_holds(d, sic, v.witness))
    throw StaleViolation("violation of " + sic.id + " does not hold in this instance");
  const auto& atom = sic.topo[topo_index];
  const Tid t1 = v.witness[sic.atom_of(atom.s1)];
  const Tid t2 = v.witness[sic.atom_of(atom.s2)];
  const Region& g1 = d.at(t1).region;
  const Region& g2 = d.at(t2).region;

  Step step{v.sic_index, sic.id, v.witness, topo_index, atom.pred, side, t1, t2};
  Region updated;
  if (side == Side::First) {
    updated = tr(atom.pred, g1, g2, cfg);
  } else {
    updated = tr_converse(atom.pred, g2, g1, cfg);
    std::swap(step.target, step.other);
  }
  const double before = geom::area(d.at(step.target).region);
  const double after = geom::area(updated);
  if (!(after < before - cfg.eps_area))
    throw InvariantFailure("repair step on tid " + std::to_string(step.target.value) +
                           " did not decrease the area");

  RepairNode child{d.with_region(step.target, std::move(updated)), node.applied,
                   node.total_area - before + after};
  child.applied.push_back(std::move(step));
  return child;
}

std::vector<const Repair*> RepairSet::minimal() const {
  std::vector<const Repair*> out;
  for (const auto& r : repairs)
    if (r.minimal) out.push_back(&r);
  return out;
}

std::size_t RepairSet::minimal_count() const {
  return static_cast<std::size_t>(
      std::count_if(repairs.begin(), repairs.end(), [](const Repair& r) { return r.minimal; }));
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

std::uint64_t tuple_hash(const SpatialTuple& t, double quantum) {
  return mix(t.tid.value * 0x9e3779b97f4a7c15ULL ^ geom::region_hash(t.region, quantum));
}

// Order-independent sum of per-tuple hashes so a step updates it in O(1).
std::uint64_t instance_hash(const Instance& d, double quantum) {
  std::uint64_t h = 0;
  for (const auto& t : d.tuples()) h += tuple_hash(*t, quantum);
  return h;
}

bool same_instance(const Instance& a, const Instance& b) {
  const auto& ta = a.tuples();
  const auto& tb = b.tuples();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i] == tb[i]) continue;
    if (ta[i]->tid != tb[i]->tid) return false;
    if (!geom::approx_equal(ta[i]->region, tb[i]->region, a.config())) return false;
  }
  return true;
}

double delta_from(const Instance& original, const Instance& d) {
  double sum = 0;
  const auto& to = original.tuples();
  const auto& td = d.tuples();
  for (std::size_t i = 0; i < to.size(); ++i)
    if (to[i] != td[i]) sum += delta_regions(to[i]->region, td[i]->region, original.config());
  return sum;
}

struct SearchNode {
  RepairNode node;
  std::uint64_t hash = 0;
};

struct Expansion {
  bool leaf = false;
  std::vector<SearchNode> children;
};

using ConflictKey = std::pair<std::size_t, std::vector<Tid>>;

}  // namespace

RepairSet enumerate_repairs(const Instance& d, const std::vector<DenialSIC>& sics,
                            const RepairOptions& options) {
  const auto& cfg = d.config();
  for (const auto& s : sics) s.validate(d.schema());
  const double tol = options.delta_tolerance.value_or(cfg.eps_area * (1.0 + d.size()));
  const double quantum = std::sqrt(cfg.eps_area);
  const bool core_only = all_core(sics, d.schema());

  std::set<ConflictKey> original_conflicts;
  for (const auto& v : find_violations(d, sics))
    original_conflicts.insert({v.sic_index, v.tid_set()});

  RepairSet result{d, {}, 0, 0, 0};
  std::unordered_map<std::uint64_t, std::vector<Instance>> memo;
  std::vector<SearchNode> frontier;
  {
    SearchNode root{RepairNode::root(d), instance_hash(d, quantum)};
    memo[root.hash].push_back(root.node.instance);
    frontier.push_back(std::move(root));
  }

  auto expand = [&](const SearchNode& sn, Expansion& out) {
    const Instance& inst = sn.node.instance;
    const auto violations = find_violations(inst, sics);
    if (violations.empty()) {
      out.leaf = true;
      return;
    }
    if (core_only) {
      for (const auto& v : violations)
        if (!original_conflicts.count({v.sic_index, v.tid_set()}))
          throw InvariantFailure("a repair step introduced a new conflict for " + v.sic_id);
    }
    const std::size_t branch_on = options.full_ordering ? violations.size() : 1;
    for (std::size_t vi = 0; vi < branch_on; ++vi) {
      const auto& v = violations[vi];
      const auto& sic = sics[v.sic_index];
      for (std::size_t ti = 0; ti < sic.topo.size(); ++ti) {
        for (Side side : {Side::First, Side::Second}) {
          RepairNode child = apply_step(sn.node, sic, v, ti, side);
          const Tid target = child.applied.back().target;
          const std::uint64_t h = sn.hash - tuple_hash(inst.at(target), quantum) +
                                  tuple_hash(child.instance.at(target), quantum);
          out.children.push_back({std::move(child), h});
        }
      }
    }
  };

  std::size_t depth = 0;
  while (!frontier.empty()) {
    if (depth > options.limits.max_depth)
      throw SearchLimitExceeded("repair search exceeded depth limit " +
                                    std::to_string(options.limits.max_depth),
                                result.nodes_expanded, result.repairs.size());
    if (result.nodes_expanded + frontier.size() > options.limits.max_nodes)
      throw SearchLimitExceeded("repair search exceeded node limit " +
                                    std::to_string(options.limits.max_nodes) + " after " +
                                    std::to_string(result.nodes_expanded) + " nodes and " +
                                    std::to_string(result.repairs.size()) + " leaves",
                                result.nodes_expanded, result.repairs.size());
    std::vector<Expansion> expansions(frontier.size());
    parallel_for(frontier.size(), options.threads,
                 [&](std::size_t i) { expand(frontier[i], expansions[i]); });
    result.nodes_expanded += frontier.size();
    result.max_depth_reached = depth;

    std::vector<SearchNode> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      if (expansions[i].leaf) {
        const Instance& inst = frontier[i].node.instance;
        const bool duplicate = std::any_of(
            result.repairs.begin(), result.repairs.end(),
            [&](const Repair& r) { return same_instance(r.instance, inst); });
        if (!duplicate)
          result.repairs.push_back(
              Repair{inst, delta_from(d, inst), false, frontier[i].node.applied});
        continue;
      }
      for (auto& child : expansions[i].children) {
        auto& bucket = memo[child.hash];
        const bool seen = std::any_of(bucket.begin(), bucket.end(), [&](const Instance& m) {
          return same_instance(m, child.node.instance);
        });
        if (seen) continue;
        bucket.push_back(child.node.instance);
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
    ++depth;
  }

  if (result.repairs.empty()) throw InvariantFailure("repair search produced no consistent leaf");
  result.min_delta = result.repairs.front().delta;
  for (const auto& r : result.repairs) result.min_delta = std::min(result.min_delta, r.delta);
  for (auto& r : result.repairs) {
    r.minimal = r.delta <= result.min_delta + tol;
    if (!is_consistent(r.instance, sics))
      throw InvariantFailure("repair leaf is not consistent");
  }
  return result;
}

std::optional<Region> VersionSet::minimum(const geom::GeometryConfig& cfg) const {
  for (const auto& v : versions) {
    const bool below_all = std::all_of(versions.begin(), versions.end(), [&](const Region& w) {
      return geom::is_subset(v, w, cfg);
    });
    if (below_all) return v;
  }
  return std::nullopt;
}

VersionSet versions(const RepairSet& repairs, Tid tid) {
  if (!repairs.original.find(tid)) throw Error("unknown tid " + std::to_string(tid.value));
  const auto& cfg = repairs.original.config();
  VersionSet out{tid, {}};
  for (const auto* r : repairs.minimal()) {
    const Region& g = r->instance.at(tid).region;
    const bool known = std::any_of(out.versions.begin(), out.versions.end(),
                                   [&](const Region& v) { return geom::approx_equal(v, g, cfg); });
    if (!known) out.versions.push_back(g);
  }
  return out;
}

bool validate_shrink_repair(const Instance& d, const Instance& d2, const Correlation& f,
                            const std::vector<DenialSIC>& sics) {
  try {
    check_correlation(d, d2, f);
  } catch (const Error&) {
    return false;
  }
  if (!is_consistent(d2, sics)) return false;
  for (const auto& t : d.tuples())
    if (!geom::is_subset(d2.at(f.at(t->tid)).region, t->region, d.config())) return false;
  return true;
}

}  // namespace scqa

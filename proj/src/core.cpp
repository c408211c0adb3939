#include "scqa/core.hpp"

#include <algorithm>

#include "scqa/grid_index.hpp"
#include "scqa/parallel.hpp"

namespace scqa {

using geom::Predicate;
using geom::Region;

const std::vector<Tid>& ConflictSet::of(Predicate p, Tid tid) const {
  static const std::vector<Tid> none;
  auto it = conflicts.find(p);
  if (it == conflicts.end()) return none;
  auto jt = it->second.find(tid);
  return jt == it->second.end() ? none : jt->second;
}

ConflictSet build_conflicts(const Instance& d, const std::vector<CoreSIC>& sics,
                            unsigned threads, const std::vector<bool>* wanted) {
  ConflictSet out;
  const auto& cfg = d.config();
  for (const auto& sic : sics) {
    std::vector<const SpatialTuple*> tuples;
    std::vector<bool> active;
    std::vector<geom::Box> boxes;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto& t = d.tuples()[i];
      if (t->relation != sic.relation || t->region.empty()) continue;
      tuples.push_back(t.get());
      active.push_back(!wanted || (*wanted)[i]);
      boxes.push_back(t->region.bbox());
    }
    const GridIndex index(boxes);
    // Core predicates are symmetric: without a mask each unordered pair is
    // tested once, from its lower index.
    std::vector<std::vector<std::size_t>> found(tuples.size());
    parallel_for(tuples.size(), threads, [&](std::size_t i) {
      if (!active[i]) return;
      const auto* t = tuples[i];
      const auto key = d.key_of(*t);
      for (std::size_t j : index.query(t->region.bbox(), cfg.eps_len)) {
        if (j == i || (!wanted && j < i)) continue;
        const auto* u = tuples[j];
        if (d.key_of(*u) == key) continue;
        if (geom::topo(sic.pred, t->region, u->region, cfg)) found[i].push_back(j);
      }
    });
    auto& table = out.conflicts[sic.pred];
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      for (std::size_t j : found[i]) {
        table[tuples[i]->tid].push_back(tuples[j]->tid);
        if (!wanted) table[tuples[j]->tid].push_back(tuples[i]->tid);
      }
    }
    for (auto& [tid, list] : table) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }
  return out;
}

CoreInstance core_via_repairs(const RepairSet& repairs) {
  const auto minimal = repairs.minimal();
  if (minimal.empty()) throw InvariantFailure("repair set has no minimal repair");
  const Instance& d = repairs.original;
  std::vector<TuplePtr> tuples;
  for (const auto& t : d.tuples()) {
    Region g = minimal.front()->instance.at(t->tid).region;
    for (std::size_t r = 1; r < minimal.size() && !g.empty(); ++r) {
      const Region& other = minimal[r]->instance.at(t->tid).region;
      if (!(other == g)) g = geom::intersection(g, other, d.config());
    }
    if (g == t->region) {
      tuples.push_back(t);
    } else {
      SpatialTuple copy = *t;
      copy.region = std::move(g);
      tuples.push_back(std::make_shared<const SpatialTuple>(std::move(copy)));
    }
  }
  return {d.with_tuples(std::move(tuples)), "repairs"};
}

CoreInstance core_via_repairs(const Instance& d, const std::vector<DenialSIC>& sics,
                              const RepairOptions& options) {
  return core_via_repairs(enumerate_repairs(d, sics, options));
}

std::vector<CoreSIC> core_sics(const std::vector<DenialSIC>& sics, const Schema& schema) {
  std::vector<CoreSIC> out;
  for (const auto& s : sics) {
    auto c = as_core(s, schema);
    if (!c) throw SchemaError("SIC " + s.id + " is not a core SIC");
    out.push_back(*c);
  }
  return out;
}

namespace {

// Core region of one tuple given the conflict table.
Region core_region(const Instance& d, const SpatialTuple& t, const std::vector<CoreSIC>& sics,
                   const ConflictSet& conflicts) {
  const auto& cfg = d.config();
  Region result = t.region;
  for (const auto& sic : sics) {
    if (sic.relation != t.relation || result.empty()) continue;
    const auto& others = conflicts.of(sic.pred, t.tid);
    if (others.empty()) continue;
    Region part;
    if (sic.pred == Predicate::Equals) {
      part = Region{};
    } else {
      std::vector<Region> removed;
      for (Tid o : others) {
        const Region& g = d.at(o).region;
        removed.push_back(sic.pred == Predicate::Intersects ? geom::buffer(g, cfg.d, cfg) : g);
      }
      part = geom::difference(t.region, geom::geom_union(removed, cfg), cfg);
    }
    result = (result == t.region) ? part : geom::intersection(result, part, cfg);
  }
  return result;
}

Instance core_for(const Instance& d, const std::vector<CoreSIC>& sics,
                  const std::vector<bool>& wanted, unsigned threads) {
  const ConflictSet conflicts =
      build_conflicts(d, sics, threads, wanted.empty() ? nullptr : &wanted);
  const auto& src = d.tuples();
  std::vector<TuplePtr> tuples(src.size());
  parallel_for(src.size(), threads, [&](std::size_t i) {
    const auto& t = src[i];
    if (!wanted.empty() && !wanted[i]) {
      tuples[i] = t;
      return;
    }
    Region g = core_region(d, *t, sics, conflicts);
    if (g == t->region) {
      tuples[i] = t;
      return;
    }
    SpatialTuple copy = *t;
    copy.region = std::move(g);
    tuples[i] = std::make_shared<const SpatialTuple>(std::move(copy));
  });
  return d.with_tuples(std::move(tuples));
}

}  // namespace

CoreInstance core_direct(const Instance& d, const std::vector<CoreSIC>& sics, unsigned threads) {
  for (const auto& s : sics) {
    d.schema().relation(s.relation);
    if (!is_core_predicate(s.pred))
      throw SchemaError("core SIC " + s.id + " must use II, IT or EQ");
  }
  return {core_for(d, sics, {}, threads), "direct"};
}

CoreInstance core_direct(const Instance& d, const std::vector<DenialSIC>& sics, unsigned threads) {
  return core_direct(d, core_sics(sics, d.schema()), threads);
}

AnswerSet cqa_via_core(const Query& q, const Instance& d, const std::vector<CoreSIC>& sics,
                       unsigned threads) {
  if (!is_basic(q))
    throw NonBasicQuery("core-based answering needs Intersects or IIntersects, got " +
                        std::string(geom::short_name(query_predicate(q))));
  validate_query(q, d.schema());
  std::vector<bool> wanted;
  if (const auto* range = std::get_if<RangeQuery>(&q)) {
    // Core regions shrink and both predicates are monotone, so tuples that
    // miss the window originally cannot answer on the core.
    wanted.resize(d.size(), false);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto& t = d.tuples()[i];
      wanted[i] = t->relation == range->relation &&
                  geom::topo(range->pred, t->region, range->window, d.config());
    }
  }
  return eval(q, core_for(d, sics, wanted, threads));
}

AnswerSet cqa_via_core(const Query& q, const Instance& d, const std::vector<DenialSIC>& sics,
                       unsigned threads) {
  return cqa_via_core(q, d, core_sics(sics, d.schema()), threads);
}

AnswerSet cqa_on_core(const Query& q, const CoreInstance& core) {
  if (!is_basic(q))
    throw NonBasicQuery("core-based answering needs Intersects or IIntersects, got " +
                        std::string(geom::short_name(query_predicate(q))));
  return eval(q, core.instance);
}

}  // namespace scqa

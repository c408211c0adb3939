#pragma once

// Independent check of the topological predicates by rasterization.
//
// Each region is sampled on a grid over the padded union of both bounding
// boxes. A cell is boundary if some edge touches the closed cell, interior
// if its center lies inside the region and it is not boundary, exterior
// otherwise. The four intersections are read from cell co-occurrence.
// Only the ring coordinates are used; no boolean-operation code is shared
// with the symbolic predicates.

#include "scqa/geometry.hpp"

namespace scqa::geom {

/// Throws GeometryError if either region spans fewer than four cells in
/// some direction, or if either region is empty.
FourIntersection four_intersection_oracle(const Region& g1, const Region& g2,
                                          int resolution = 512);

/// False whenever either argument is empty.
bool topo_oracle(Predicate t, const Region& g1, const Region& g2,
                 int resolution = 512);

}  // namespace scqa::geom

#pragma once

#include <array>
#include <utility>
#include <vector>

#include "selfsim/geometry.hpp"

namespace selfsim {

/// Vertex indices of a counterclockwise triangle, smallest index first.
using Tri = std::array<int, 3>;

/// Delaunay triangulation of the convex hull. Cocircular ties are broken by
/// the perturbed incircle predicate, so the output is unique. Triangles come
/// out sorted. Throws std::invalid_argument for fewer than 3 points,
/// duplicates, or all-collinear input.
std::vector<Tri> delaunay(const std::vector<Vec2>& points);

/// Constrained Delaunay triangulation: the segments (index pairs) become
/// edges. Segments must not cross each other or pass through other points.
std::vector<Tri> constrained_delaunay(const std::vector<Vec2>& points,
                                      const std::vector<std::pair<int, int>>& segments);

/// Rotates to smallest-index-first form (orientation kept).
Tri canonical(Tri t);

}  // namespace selfsim

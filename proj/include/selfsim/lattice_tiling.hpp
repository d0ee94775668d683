#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/delaunay.hpp"
#include "selfsim/number_field.hpp"
#include "selfsim/tiling_render.hpp"

namespace selfsim {

/// Triangle with vertices in the lattice A, counterclockwise in the plane.
struct LatticeTriangle {
    std::array<LatticeCoords, 3> v;
    friend bool operator==(const LatticeTriangle& a, const LatticeTriangle& b) { return a.v == b.v; }
};

/// Rotate so the lexicographically smallest coordinate vector comes first.
LatticeTriangle canonical(const LatticeTriangle& t, const FieldContext& ctx);
LatticeTriangle scale_lambda(const FieldContext& ctx, const LatticeTriangle& t, int power);
std::array<Vec2, 3> planar(const FieldContext& ctx, const LatticeTriangle& t);

/// |v_i - v_j| < 3M and |||v_i - v_j||| < 3M for all pairs, noncollinear.
bool in_triangle_set(const FieldContext& ctx, const LatticeTriangle& t, double M);

struct Surrounding {
    LatticeTriangle center;
    std::vector<LatticeTriangle> ring;
};

struct ConstructionConstants {
    int M = 0;
    double theta = 0;
    double r1 = 0;
    double r2 = 0;
    int n = 0;

    // Diagnostics: the quantities each condition was checked against.
    double cond1 = 0;  // 2|lambda|^2 max |||v1 - v2||| over annulus edges
    double cond2 = 0;  // |lambda|^2 max |v1 - v2| over annulus edges
    double cond3 = 0;  // 2|lambda| covering radius bound
    int n_flat = 0;
    int n_inradius = 0;
    double flat_ratio = 0;  // max |||v|||/|v| over the difference set
    std::size_t difference_set_size = 0;
    /// The difference set was too large; n_flat was raised per realized triangle instead.
    bool flat_per_triangle = false;

    int exponent() const { return n + 2; }
};

/// Convex polygon with vertices in A, origin strictly inside, lambda T0
/// strictly containing T0 (exact tests on planar images in degree 2,
/// filtered floating tests otherwise). With symmetric_order m the polygon
/// is invariant under multiplication by zeta_m, which must lie in Z[lambda].
/// Throws MathRefusal if zeta_m is not available, ConstructionError if the
/// search fails.
std::vector<LatticeCoords> build_T0(const FieldContext& ctx, std::optional<int> symmetric_order = std::nullopt);

/// Triangulation of lambda T0 - T0 with lattice vertices: constrained Delaunay
/// of both boundaries, keeping triangles between them.
std::vector<LatticeTriangle> triangulate_annulus(const FieldContext& ctx, const std::vector<LatticeCoords>& T0);

/// If the difference set enumeration exceeds the budget, flatness is checked
/// on the realized triangles only (flat_per_triangle).
ConstructionConstants compute_constants(const FieldContext& ctx, const std::vector<LatticeCoords>& T0,
                                        const std::vector<LatticeTriangle>& annulus,
                                        std::size_t budget = 5'000'000);

/// Piecewise affine surface in W over planar triangles. Points outside every
/// triangle use the affine extension of the nearest one. An empty surface
/// is the plane V_lambda.
class ReferenceSurface {
public:
    ReferenceSurface() = default;
    ReferenceSurface(const FieldContext& ctx, const std::vector<LatticeTriangle>& triangles);
    /// Vertical distance from sigma(y) to the surface above pi(sigma(y)).
    double vertical_distance(const FieldContext& ctx, const Eigen::VectorXd& w) const;
    /// Vertical part of the surface above p (empty vector for degree 2).
    Eigen::VectorXd height(const FieldContext& ctx, Vec2 p) const;
    bool empty() const { return tris_.empty(); }

private:
    struct Piece {
        std::array<Vec2, 3> p;
        std::array<Eigen::VectorXd, 3> vert;
    };
    std::vector<Piece> tris_;
};

struct PlanarRegion {
    Vec2 lo, hi;  // bounding box
    std::function<bool(Vec2)> contains;
};

/// Lattice points whose planar image lies in the region and whose vertical
/// distance to the surface is strictly below the bound. Enumeration is a
/// Fincke-Pohst search over an LLL-reduced basis of the scaled box.
std::vector<LatticeCoords> lattice_points_in_region(const FieldContext& ctx, const PlanarRegion& region,
                                                    double vertical_bound, const ReferenceSurface& surface,
                                                    std::size_t budget = 20'000'000);

enum class SubdivisionMode {
    /// Zones Y_v, Y_e, Y_t; Delaunay triangles whose circumdisk lies in N_r2(lambda^N t).
    Neighborhood,
    /// Lattice points of lambda^N t only, with its edges as constraints, so
    /// the output tiles lambda^N t exactly. Degree 2 only.
    Clipped,
};

struct SubdivisionResult {
    /// Absolute coordinates (the surrounding scaled by lambda^N, N = n + 2).
    std::vector<LatticeTriangle> triangles;
    /// Triangles in the annulus around the central tile (not plain Delaunay).
    std::vector<char> gap;
    std::optional<LatticeCoords> central_offset;  // C = lambda T0 + offset
    std::vector<LatticeCoords> central_vertices;

    std::size_t zone_vertex_points = 0;
    std::size_t zone_edge_points = 0;
    std::size_t zone_triangle_points = 0;

    double max_edge = 0;         // over all triangles
    double max_edge_regular = 0; // over non-gap triangles
    double max_vertical_edge = 0;
    bool all_in_T = true;
    bool all_scaled_in_T = true;  // lambda t' in the triangle set
    /// Exact doubled area of lambda^N t minus the output triangles and the
    /// central tile, each clipped to lambda^N t, in coefficient coordinates
    /// (degree 2 only).
    std::optional<mpq_class> cover_residual;
    bool overlap_free = true;
    bool covers_center = true;
};

/// Subdivision of lambda^(n+2) X. Throws ConstructionError when a bound the
/// construction relies on fails.
SubdivisionResult subdivide_surrounding(const FieldContext& ctx, const ConstructionConstants& consts,
                                        const std::vector<LatticeCoords>& T0, const Surrounding& X,
                                        bool with_central_tile, SubdivisionMode mode = SubdivisionMode::Neighborhood);

/// Same, with the center already in absolute coordinates (lambda^N t) and the
/// reference surface given directly.
SubdivisionResult subdivide_absolute(const FieldContext& ctx, const ConstructionConstants& consts,
                                     const std::vector<LatticeCoords>& T0, const LatticeTriangle& center,
                                     const ReferenceSurface& surface, bool with_central_tile, SubdivisionMode mode);

struct OverlapReport {
    bool pass = true;
    bool vacuous = false;
    std::size_t compared = 0;    // triangles in the overlap zone of the first subdivision
    std::size_t mismatched = 0;  // symmetric difference
};

OverlapReport overlap_agreement(const FieldContext& ctx, const ConstructionConstants& consts,
                                const std::vector<LatticeCoords>& T0, const Surrounding& X1, const Surrounding& X2);

/// Size-labeled patch. Triangles are absolute; label in 1..n+2.
struct PatchTiling {
    struct Tile {
        std::array<std::int32_t, 3> v;  // indices into vertices
        int label = 1;
    };
    std::vector<LatticeCoords> vertices;
    std::vector<Tile> triangles;
    /// Offsets of placed T0 copies (T0 + offset).
    std::vector<LatticeCoords> central_tiles;
    int generation = 0;
    int n = 0;
    std::size_t subdivided = 0;  // triangles split so far

    LatticeTriangle triangle(std::size_t i) const;
};

struct GrowthReport {
    bool labels_ok = true;      // edge-adjacent labels equal or differ by 1 mod n+2
    bool overlap_free = true;
    std::optional<std::int64_t> cover_residual;  // exact, degree 2
    std::vector<std::size_t> label_histogram;    // index 0: T0 copies, k: label k
};

/// Grows the patch from T0 for the given number of generations. Subdivisions
/// use SubdivisionMode::Clipped. Throws MathRefusal for real lambda or degree
/// > 2 and ResourceError when the triangle count exceeds the cap.
PatchTiling grow_tiling(const FieldContext& ctx, const ConstructionConstants& consts,
                        const std::vector<LatticeCoords>& T0, const std::vector<LatticeTriangle>& annulus,
                        int generations, std::size_t max_triangles = 8'000'000, int jobs = 1);

GrowthReport check_patch(const FieldContext& ctx, const PatchTiling& patch, const std::vector<LatticeCoords>& T0);

/// Polygonal arc along triangulation edges from a to b inside N_r2(segment
/// ab): shortest path, ties broken by lexicographic vertex order.
/// Throws ConstructionError if the zone graph is disconnected.
std::vector<LatticeCoords> edge_arc(const FieldContext& ctx, const ConstructionConstants& consts,
                                    const std::vector<LatticeTriangle>& triangulation, const LatticeCoords& a,
                                    const LatticeCoords& b);

struct BoundaryRefinement {
    std::vector<Polyline> curves;     // gamma^1 .. gamma^k in the coordinates of t
    std::vector<double> hausdorff;    // between consecutive curves
    double fitted_constant = 0;       // c with d_k <= c |lambda|^(-k(n+2))
    bool simple = true;
};

/// gamma_t^k for k levels. The arc of each edge is computed from the
/// Clipped-free Neighborhood subdivision of a surrounding of that edge.
/// Degree 2 nonreal only; levels above 2 are refused as a resource limit.
BoundaryRefinement refine_boundary(const FieldContext& ctx, const ConstructionConstants& consts,
                                   const std::vector<LatticeCoords>& T0, const LatticeTriangle& t, int k);

std::string patch_to_json(const FieldContext& ctx, const PatchTiling& patch);
std::string constants_to_json(const ConstructionConstants& c);

}  // namespace selfsim

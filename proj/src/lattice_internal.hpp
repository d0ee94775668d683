#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "selfsim/lattice_tiling.hpp"

namespace selfsim::detail {

inline LatticeCoords add(const LatticeCoords& a, const LatticeCoords& b) {
    LatticeCoords r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline LatticeCoords sub(const LatticeCoords& a, const LatticeCoords& b) {
    LatticeCoords r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

struct CoordsHash {
    std::size_t operator()(const LatticeCoords& c) const {
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        for (auto v : c) h ^= std::hash<std::int64_t>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

/// Degree 2 nonreal: coefficient coordinates are an orientation-preserving
/// affine image of the plane, so exact integer geometry can run there.
inline bool exact_plane(const FieldContext& ctx) { return ctx.degree() == 2 && !ctx.is_real_lambda(); }

/// Twice the signed area in coefficient coordinates (degree 2 only), with the
/// sign of the planar orientation.
inline std::int64_t cross2(const FieldContext& ctx, const LatticeCoords& a, const LatticeCoords& b,
                           const LatticeCoords& c) {
    std::int64_t v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    return ctx.lambda().imag() > 0 ? v : -v;
}

/// Orientation of three lattice points in the plane; exact in degree 2.
inline int orient_lattice(const FieldContext& ctx, const LatticeCoords& a, const LatticeCoords& b,
                          const LatticeCoords& c) {
    if (exact_plane(ctx)) {
        auto v = cross2(ctx, a, b, c);
        return (v > 0) - (v < 0);
    }
    return orient2d(ctx.planar(a), ctx.planar(b), ctx.planar(c));
}

std::array<int, 2> planar_indices(const FieldContext& ctx);

/// LLL-reduced basis of a scaled copy of sigma(A), for Babai rounding and
/// Fincke-Pohst enumeration.
class ReducedLattice {
public:
    /// scale[i] multiplies coordinate i of W.
    ReducedLattice(const FieldContext& ctx, const Eigen::VectorXd& scale);
    /// Lattice point whose scaled image is close to the scaled target (nearest plane).
    LatticeCoords babai(const Eigen::VectorXd& target) const;
    /// Every lattice point with |scale * (sigma(c) - target)| <= radius.
    /// Returns false if the budget was exhausted.
    bool enumerate(const Eigen::VectorXd& target, double radius, std::size_t budget,
                   const std::function<void(const LatticeCoords&)>& visit) const;

private:
    Eigen::VectorXd scale_;
    Eigen::MatrixXd B_;   // reduced basis, columns, scaled W coordinates
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> U_;  // coefficient vectors of the columns
    Eigen::MatrixXd Q_, R_;
};

double distance_to_triangle(Vec2 p, const std::array<Vec2, 3>& t);

/// No two triangles (counterclockwise) have overlapping interiors; uniform grid.
bool overlap_free(const std::vector<std::array<Vec2, 3>>& tris);

}  // namespace selfsim::detail

#include "selfsim/lattice_tiling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include "lattice_internal.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/lll.hpp"

namespace selfsim {

using detail::exact_plane;
using detail::orient_lattice;
using detail::planar_indices;

namespace detail {

ReducedLattice::ReducedLattice(const FieldContext& ctx, const Eigen::VectorXd& scale) : scale_(scale) {
    Eigen::MatrixXd S = scale.asDiagonal() * ctx.sigma_matrix();
    const int D = static_cast<int>(S.rows()), k = static_cast<int>(S.cols());
    if (D != k) throw DimensionError("lattice embedding is not square");
    std::vector<std::vector<double>> rows(k, std::vector<double>(D));
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < D; ++i) rows[j][i] = S(i, j);
    lll_reduce(rows);
    B_.resize(D, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < D; ++i) B_(i, j) = rows[j][i];
    Eigen::MatrixXd Uf = S.fullPivLu().solve(B_);
    U_.resize(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) U_(i, j) = static_cast<std::int64_t>(std::llround(Uf(i, j)));
    // Recompute the basis from the rounded transform so B_ is exactly S U_.
    B_ = S * U_.cast<double>();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B_);
    Q_ = qr.householderQ();
    R_ = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < k; ++i)
        if (R_(i, i) < 0) {
            R_.row(i) *= -1;
            Q_.col(i) *= -1;
        }
}

LatticeCoords ReducedLattice::babai(const Eigen::VectorXd& target) const {
    const int k = static_cast<int>(R_.cols());
    Eigen::VectorXd y = Q_.transpose() * scale_.cwiseProduct(target);
    Eigen::VectorXd c(k);
    for (int i = k - 1; i >= 0; --i) {
        double s = y(i);
        for (int j = i + 1; j < k; ++j) s -= R_(i, j) * c(j);
        c(i) = std::round(s / R_(i, i));
    }
    LatticeCoords out(k, 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) out[i] += U_(i, j) * static_cast<std::int64_t>(c(j));
    return out;
}

bool ReducedLattice::enumerate(const Eigen::VectorXd& target, double radius, std::size_t budget,
                               const std::function<void(const LatticeCoords&)>& visit) const {
    const int k = static_cast<int>(R_.cols());
    Eigen::VectorXd y = Q_.transpose() * scale_.cwiseProduct(target);
    std::vector<std::int64_t> c(k, 0);
    LatticeCoords out(k);
    std::size_t visited = 0;
    bool ok = true;
    std::function<void(int, double)> rec = [&](int i, double rem) {
        if (!ok) return;
        double s = y(i);
        for (int j = i + 1; j < k; ++j) s -= R_(i, j) * static_cast<double>(c[j]);
        double center = s / R_(i, i);
        double half = std::sqrt(std::max(0.0, rem)) / R_(i, i);
        auto lo = static_cast<std::int64_t>(std::ceil(center - half - 1e-12));
        auto hi = static_cast<std::int64_t>(std::floor(center + half + 1e-12));
        for (std::int64_t v = lo; v <= hi && ok; ++v) {
            double d = R_(i, i) * (static_cast<double>(v) - center);
            double r2 = rem - d * d;
            if (r2 < -1e-12 * radius * radius) continue;
            c[i] = v;
            if (i == 0) {
                if (++visited > budget) {
                    ok = false;
                    return;
                }
                for (int a = 0; a < k; ++a) {
                    std::int64_t acc = 0;
                    for (int b = 0; b < k; ++b) acc += U_(a, b) * c[b];
                    out[a] = acc;
                }
                visit(out);
            } else {
                rec(i - 1, r2);
            }
        }
    };
    rec(k - 1, radius * radius);
    return ok;
}

double distance_to_triangle(Vec2 p, const std::array<Vec2, 3>& t) {
    int inside = 0;
    for (int i = 0; i < 3; ++i) inside += orient2d(t[i], t[(i + 1) % 3], p) >= 0;
    if (inside == 3) return 0;
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) d = std::min(d, distance_to_segment(p, t[i], t[(i + 1) % 3]));
    return d;
}

std::array<int, 2> planar_indices(const FieldContext& ctx) {
    std::vector<char> vertical(ctx.embed_dim(), 0);
    for (int i : ctx.vertical_indices()) vertical[i] = 1;
    std::array<int, 2> out{-1, -1};
    int k = 0;
    for (int i = 0; i < ctx.embed_dim(); ++i)
        if (!vertical[i]) out[k++] = i;
    return out;
}

}  // namespace detail

namespace {

/// Strictly convex hull, counterclockwise, starting at the lexicographically
/// smallest coefficient vector.
std::vector<LatticeCoords> strict_hull(const FieldContext& ctx, std::vector<LatticeCoords> pts) {
    std::sort(pts.begin(), pts.end(), [&](const LatticeCoords& a, const LatticeCoords& b) {
        return ctx.planar(a) < ctx.planar(b);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<LatticeCoords> h;
    for (int pass = 0; pass < 2; ++pass) {
        std::size_t base = h.size();
        for (auto& p : pts) {
            while (h.size() >= base + 2 && orient_lattice(ctx, h[h.size() - 2], h.back(), p) <= 0) h.pop_back();
            h.push_back(p);
        }
        h.pop_back();
        std::reverse(pts.begin(), pts.end());
    }
    auto first = std::min_element(h.begin(), h.end());
    std::rotate(h.begin(), first, h.end());
    return h;
}

bool strictly_inside_convex(const FieldContext& ctx, const LatticeCoords& p, const std::vector<LatticeCoords>& poly) {
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (orient_lattice(ctx, poly[i], poly[(i + 1) % poly.size()], p) <= 0) return false;
    return true;
}

}  // namespace

LatticeTriangle canonical(const LatticeTriangle& t, const FieldContext& ctx) {
    (void)ctx;
    int m = 0;
    if (t.v[1] < t.v[m]) m = 1;
    if (t.v[2] < t.v[m]) m = 2;
    return {{t.v[m], t.v[(m + 1) % 3], t.v[(m + 2) % 3]}};
}

LatticeTriangle scale_lambda(const FieldContext& ctx, const LatticeTriangle& t, int power) {
    LatticeTriangle out = t;
    for (auto& v : out.v) v = ctx.mul_lambda_pow(v, power);
    return out;
}

std::array<Vec2, 3> planar(const FieldContext& ctx, const LatticeTriangle& t) {
    return {ctx.planar(t.v[0]), ctx.planar(t.v[1]), ctx.planar(t.v[2])};
}

bool in_triangle_set(const FieldContext& ctx, const LatticeTriangle& t, double M) {
    if (orient_lattice(ctx, t.v[0], t.v[1], t.v[2]) == 0) return false;
    for (int i = 0; i < 3; ++i) {
        auto d = detail::sub(t.v[(i + 1) % 3], t.v[i]);
        if (norm(ctx.planar(d)) >= 3 * M) return false;
        if (ctx.vertical_norm(d) >= 3 * M) return false;
    }
    return true;
}

ReferenceSurface::ReferenceSurface(const FieldContext& ctx, const std::vector<LatticeTriangle>& triangles) {
    for (auto& t : triangles) {
        Piece p;
        for (int i = 0; i < 3; ++i) {
            Eigen::VectorXd w = ctx.sigma(t.v[i]);
            p.p[i] = ctx.pi_project(w);
            p.vert[i] = ctx.vertical_part(w);
        }
        if (orient2d(p.p[0], p.p[1], p.p[2]) < 0) {
            std::swap(p.p[1], p.p[2]);
            std::swap(p.vert[1], p.vert[2]);
        }
        tris_.push_back(std::move(p));
    }
}

Eigen::VectorXd ReferenceSurface::height(const FieldContext& ctx, Vec2 p) const {
    const auto dv = static_cast<Eigen::Index>(ctx.vertical_indices().size());
    if (tris_.empty() || dv == 0) return Eigen::VectorXd::Zero(dv);
    const Piece* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (auto& t : tris_) {
        double d = detail::distance_to_triangle(p, t.p);
        if (d < best_d) {
            best_d = d;
            best = &t;
        }
        if (d == 0) break;
    }
    const auto& q = best->p;
    double area = cross(q[1] - q[0], q[2] - q[0]);
    double b1 = cross(p - q[0], q[2] - q[0]) / area;
    double b2 = cross(q[1] - q[0], p - q[0]) / area;
    return (1 - b1 - b2) * best->vert[0] + b1 * best->vert[1] + b2 * best->vert[2];
}

double ReferenceSurface::vertical_distance(const FieldContext& ctx, const Eigen::VectorXd& w) const {
    Eigen::VectorXd v = ctx.vertical_part(w);
    if (v.size() == 0) return 0;
    return (v - height(ctx, ctx.pi_project(w))).norm();
}

std::vector<LatticeCoords> lattice_points_in_region(const FieldContext& ctx, const PlanarRegion& region,
                                                    double vertical_bound, const ReferenceSurface& surface,
                                                    std::size_t budget) {
    if (!std::isfinite(region.lo.x) || !std::isfinite(region.hi.x) || !std::isfinite(region.lo.y) ||
        !std::isfinite(region.hi.y))
        throw std::invalid_argument("region must be bounded");
    std::vector<LatticeCoords> out;
    if (region.hi.x < region.lo.x || region.hi.y < region.lo.y || !(vertical_bound > 0)) return out;
    const int D = ctx.embed_dim();
    auto pi = planar_indices(ctx);
    Eigen::VectorXd center = Eigen::VectorXd::Zero(D), half = Eigen::VectorXd::Zero(D);
    center(pi[0]) = 0.5 * (region.lo.x + region.hi.x);
    center(pi[1]) = 0.5 * (region.lo.y + region.hi.y);
    half(pi[0]) = std::max(0.5 * (region.hi.x - region.lo.x), 1e-9);
    half(pi[1]) = std::max(0.5 * (region.hi.y - region.lo.y), 1e-9);
    const auto& vidx = ctx.vertical_indices();
    if (!vidx.empty()) {
        // Range of the surface over the box, widened by the bound.
        Eigen::VectorXd lo = Eigen::VectorXd::Constant(vidx.size(), 0.0), hi = lo;
        if (!surface.empty()) {
            lo.setConstant(std::numeric_limits<double>::infinity());
            hi.setConstant(-std::numeric_limits<double>::infinity());
            for (Vec2 corner : {region.lo, region.hi, Vec2{region.lo.x, region.hi.y}, Vec2{region.hi.x, region.lo.y}}) {
                Eigen::VectorXd h = surface.height(ctx, corner);
                lo = lo.cwiseMin(h);
                hi = hi.cwiseMax(h);
            }
        }
        for (std::size_t a = 0; a < vidx.size(); ++a) {
            center(vidx[a]) = 0.5 * (lo(a) + hi(a));
            half(vidx[a]) = 0.5 * (hi(a) - lo(a)) + vertical_bound;
        }
    }
    Eigen::VectorXd scale = half.cwiseInverse();
    detail::ReducedLattice lat(ctx, scale);
    bool ok = lat.enumerate(center, std::sqrt(static_cast<double>(D)) * (1 + 1e-9), budget,
                            [&](const LatticeCoords& c) {
                                Eigen::VectorXd w = ctx.sigma(c);
                                Vec2 p = ctx.pi_project(w);
                                if (p.x < region.lo.x || p.x > region.hi.x || p.y < region.lo.y || p.y > region.hi.y)
                                    return;
                                if (!region.contains(p)) return;
                                if (!(surface.vertical_distance(ctx, w) < vertical_bound)) return;
                                out.push_back(c);
                            });
    if (!ok) throw ResourceError("lattice enumeration budget of " + std::to_string(budget) + " points exceeded");
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<LatticeCoords> build_T0(const FieldContext& ctx, std::optional<int> symmetric_order) {
    std::optional<FieldElement> zeta;
    int m = 1;
    if (symmetric_order) {
        m = *symmetric_order;
        if (m < 1) throw std::invalid_argument("symmetric order must be positive");
        if (m > 1) {
            zeta = cyclotomic_in_field(ctx, m);
            if (!zeta) throw MathRefusal("zeta_" + std::to_string(m) + " is not in Q[lambda]");
            if (!zeta->is_integral()) throw MathRefusal("zeta_" + std::to_string(m) + " is not in Z[lambda]");
        }
    }
    const int D = ctx.embed_dim();
    auto pi = planar_indices(ctx);
    detail::ReducedLattice lat(ctx, Eigen::VectorXd::Ones(D));
    auto rotate = [&](const LatticeCoords& v) {
        if (ctx.is_real_lambda()) {
            // Only -1 is available for real lambda.
            LatticeCoords r = v;
            for (auto& x : r) x = -x;
            return r;
        }
        return ctx.multiply(*zeta, FieldElement::from_ints(v)).to_ints();
    };
    std::vector<int> sides;
    for (int k : {8, 12, 16, 24, 6})
        if (k % m == 0) sides.push_back(k);
    if (sides.empty()) sides = {m, 2 * m};
    const LatticeCoords origin(ctx.coeff_dim(), 0);
    for (int k : sides)
        for (double R = 1.0; R <= 256.0; R += 0.5) {
            std::vector<LatticeCoords> pts;
            const int base = k / m;
            for (int j = 0; j < base; ++j) {
                double ang = 2 * std::numbers::pi * j / k;
                Eigen::VectorXd w = Eigen::VectorXd::Zero(D);
                w(pi[0]) = R * std::cos(ang);
                w(pi[1]) = R * std::sin(ang);
                LatticeCoords v = lat.babai(w);
                for (int s = 0; s < m; ++s) {
                    pts.push_back(v);
                    if (s + 1 < m) v = rotate(v);
                }
            }
            auto hull = strict_hull(ctx, pts);
            if (hull.size() < 3) continue;
            if (!strictly_inside_convex(ctx, origin, hull)) continue;
            std::vector<LatticeCoords> outer;
            for (auto& v : hull) outer.push_back(ctx.mul_lambda(v));
            bool inside = true;
            for (auto& v : hull) inside = inside && strictly_inside_convex(ctx, v, outer);
            if (inside) return hull;
        }
    throw ConstructionError("no T0 found: lambda T0 never strictly contained T0 up to radius 256");
}

std::vector<LatticeTriangle> triangulate_annulus(const FieldContext& ctx, const std::vector<LatticeCoords>& T0) {
    const std::size_t k = T0.size();
    std::vector<LatticeCoords> pts = T0;
    for (auto& v : T0) pts.push_back(ctx.mul_lambda(v));
    std::vector<Vec2> planar_pts;
    for (auto& p : pts) planar_pts.push_back(ctx.planar(p));
    std::vector<std::pair<int, int>> seg;
    for (std::size_t i = 0; i < k; ++i) {
        seg.push_back({static_cast<int>(i), static_cast<int>((i + 1) % k)});
        seg.push_back({static_cast<int>(k + i), static_cast<int>(k + (i + 1) % k)});
    }
    std::vector<Vec2> inner(planar_pts.begin(), planar_pts.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<LatticeTriangle> out;
    for (auto& t : constrained_delaunay(planar_pts, seg)) {
        // A triangle is inside T0 iff all its vertices are T0 vertices and its
        // centroid is inside.
        bool all_inner = t[0] < static_cast<int>(k) && t[1] < static_cast<int>(k) && t[2] < static_cast<int>(k);
        if (all_inner) {
            Vec2 c = (1.0 / 3) * (planar_pts[t[0]] + planar_pts[t[1]] + planar_pts[t[2]]);
            if (point_in_polygon(c, inner) > 0) continue;
        }
        out.push_back({{pts[t[0]], pts[t[1]], pts[t[2]]}});
    }
    return out;
}

ConstructionConstants compute_constants(const FieldContext& ctx, const std::vector<LatticeCoords>& T0,
                                        const std::vector<LatticeTriangle>& annulus, std::size_t budget) {
    if (annulus.empty()) throw std::invalid_argument("empty annulus triangulation");
    ConstructionConstants c;
    const double l = ctx.lambda_abs(), l2 = l * l;
    double max_vert = 0, max_len = 0, min_inr = std::numeric_limits<double>::infinity();
    double theta = std::numbers::pi;
    for (auto& t : annulus) {
        auto p = planar(ctx, t);
        for (int i = 0; i < 3; ++i) {
            auto d = detail::sub(t.v[(i + 1) % 3], t.v[i]);
            max_vert = std::max(max_vert, ctx.vertical_norm(d));
            max_len = std::max(max_len, norm(ctx.planar(d)));
        }
        theta = std::min(theta, min_angle(p[0], p[1], p[2]));
        min_inr = std::min(min_inr, inradius(p[0], p[1], p[2]));
    }
    c.cond1 = 2 * l2 * max_vert;
    c.cond2 = l2 * max_len;
    c.cond3 = 2 * l * covering_radius_bound(ctx);
    // Conditions 1 and 2 are strict, condition 3 is not.
    double strict = std::max(c.cond1, c.cond2);
    c.M = std::max({1, static_cast<int>(std::floor(strict)) + 1, static_cast<int>(std::ceil(c.cond3 - 1e-12))});
    c.theta = theta;
    c.r2 = 2.0 * c.M;
    c.r1 = c.r2 / std::sin(theta / 2);

    // Inradius condition.
    double diam = 0;
    std::vector<Vec2> outer;
    for (auto& v : T0) outer.push_back(ctx.planar(ctx.mul_lambda(v)));
    for (auto& a : outer)
        for (auto& b : outer) diam = std::max(diam, norm(a - b));
    const double need = 2 * diam + 2 * c.r2;
    c.n_inradius = 0;
    while (std::pow(l, c.n_inradius) * min_inr < need) ++c.n_inradius;

    // Flatness: (rho/|lambda|)^n * max |||v|||/|v| over the difference set,
    // divided by sin(theta/2), must stay below sqrt(5)/2.
    c.n_flat = 0;
    if (!ctx.vertical_indices().empty()) {
        const double R = 3.0 * c.M;
        PlanarRegion disk{{-R, -R}, {R, R}, [R](Vec2 p) { return norm(p) < R; }};
        std::vector<LatticeCoords> diffs;
        try {
            diffs = lattice_points_in_region(ctx, disk, R, ReferenceSurface(), budget);
        } catch (const ResourceError&) {
            c.flat_per_triangle = true;
        }
        for (auto& v : diffs) {
            double len = norm(ctx.planar(v));
            if (len == 0) continue;
            c.flat_ratio = std::max(c.flat_ratio, ctx.vertical_norm(v) / len);
        }
        c.difference_set_size = diffs.size();
        if (!c.flat_per_triangle) {
            const double gap = ctx.max_vertical_modulus() / l;
            const double target = std::sqrt(5.0) / 2 * std::sin(theta / 2);
            while (std::pow(gap, c.n_flat) * c.flat_ratio >= target) ++c.n_flat;
        }
        // Direct check on the realized triangles.
        for (auto& t : annulus)
            while (bilipschitz_constant(ctx, t.v, c.n_flat) >= 1.5) ++c.n_flat;
    }
    c.n = std::max(c.n_flat, c.n_inradius);
    return c;
}

}  // namespace selfsim

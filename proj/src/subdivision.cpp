#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "lattice_internal.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/lattice_tiling.hpp"

namespace selfsim {

using detail::CoordsHash;
using detail::exact_plane;
using detail::orient_lattice;

namespace {

struct Point2Q {
    mpq_class x, y;
};

mpq_class cross_q(const Point2Q& a, const Point2Q& b, const Point2Q& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Doubled area of the triangle clipped to the convex polygon, exact, in
/// coefficient coordinates (orientation sign applied by the caller).
mpq_class clipped_area2(const std::array<LatticeCoords, 3>& tri, const std::vector<LatticeCoords>& poly, int sign) {
    auto q = [](const LatticeCoords& v) { return Point2Q{mpq_class(static_cast<long>(v[0])), mpq_class(static_cast<long>(v[1]))}; };
    std::vector<Point2Q> cur;
    for (auto& v : tri) cur.push_back(q(v));
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m && !cur.empty(); ++i) {
        Point2Q a = q(poly[i]), b = q(poly[(i + 1) % m]);
        std::vector<Point2Q> next;
        for (std::size_t j = 0; j < cur.size(); ++j) {
            const Point2Q& p = cur[j];
            const Point2Q& r = cur[(j + 1) % cur.size()];
            mpq_class sp = sign * cross_q(a, b, p), sr = sign * cross_q(a, b, r);
            if (sp >= 0) next.push_back(p);
            if ((sp > 0 && sr < 0) || (sp < 0 && sr > 0)) {
                mpq_class t = sp / (sp - sr);
                next.push_back({p.x + t * (r.x - p.x), p.y + t * (r.y - p.y)});
            }
        }
        cur = std::move(next);
    }
    mpq_class area = 0;
    for (std::size_t j = 0; j < cur.size(); ++j) {
        const Point2Q& p = cur[j];
        const Point2Q& r = cur[(j + 1) % cur.size()];
        area += p.x * r.y - p.y * r.x;
    }
    return sign * area;
}

std::int64_t polygon_area2(const FieldContext& ctx, const std::vector<LatticeCoords>& poly) {
    std::int64_t s = 0;
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) s += detail::cross2(ctx, poly[0], poly[i], poly[i + 1]);
    return s;
}

bool strictly_inside(const FieldContext& ctx, const LatticeCoords& p, const std::vector<LatticeCoords>& poly) {
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (orient_lattice(ctx, poly[i], poly[(i + 1) % poly.size()], p) <= 0) return false;
    return true;
}

bool inside_closed(const FieldContext& ctx, const LatticeCoords& p, const std::vector<LatticeCoords>& poly) {
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (orient_lattice(ctx, poly[i], poly[(i + 1) % poly.size()], p) < 0) return false;
    return true;
}

bool on_segment(const FieldContext& ctx, const LatticeCoords& p, const LatticeCoords& a, const LatticeCoords& b) {
    if (orient_lattice(ctx, a, b, p) != 0) return false;
    Vec2 pa = ctx.planar(a), pb = ctx.planar(b), pp = ctx.planar(p);
    return dot(pp - pa, pb - pa) >= 0 && dot(pp - pb, pa - pb) >= 0;
}

/// Constraint chain along the polygon boundary through every point lying on it.
void boundary_constraints(const FieldContext& ctx, const std::vector<LatticeCoords>& poly,
                          const std::vector<LatticeCoords>& pts,
                          const std::unordered_map<LatticeCoords, int, CoordsHash>& index,
                          std::vector<std::pair<int, int>>& seg) {
    const std::size_t m = poly.size();
    std::vector<Vec2> pl;
    for (auto& v : poly) pl.push_back(ctx.planar(v));
    double lox = pl[0].x, hix = pl[0].x, loy = pl[0].y, hiy = pl[0].y;
    for (auto& p : pl) {
        lox = std::min(lox, p.x);
        hix = std::max(hix, p.x);
        loy = std::min(loy, p.y);
        hiy = std::max(hiy, p.y);
    }
    std::vector<std::vector<std::pair<double, int>>> on(m);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        Vec2 p = ctx.planar(pts[k]);
        if (p.x < lox - 1e-9 || p.x > hix + 1e-9 || p.y < loy - 1e-9 || p.y > hiy + 1e-9) continue;
        for (std::size_t i = 0; i < m; ++i)
            if (on_segment(ctx, pts[k], poly[i], poly[(i + 1) % m]))
                on[i].push_back({dot(p - pl[i], pl[(i + 1) % m] - pl[i]), static_cast<int>(k)});
    }
    for (std::size_t i = 0; i < m; ++i) {
        auto& v = on[i];
        std::sort(v.begin(), v.end());
        if (v.empty() || v.front().second != index.at(poly[i]) || v.back().second != index.at(poly[(i + 1) % m]))
            throw ConstructionError("polygon vertex missing from the point set");
        for (std::size_t j = 0; j + 1 < v.size(); ++j) seg.push_back({v[j].second, v[j + 1].second});
    }
}

bool circumdisk_within(Vec2 c, double radius, const std::array<Vec2, 3>& T, double r) {
    return detail::distance_to_triangle(c, T) + radius < r;
}

}  // namespace

namespace detail {

bool overlap_free(const std::vector<std::array<Vec2, 3>>& tris) {
    if (tris.empty()) return true;
    // Cells of the mean edge length; large triangles are entered in every cell they cover.
    double cell = 0;
    double lox = std::numeric_limits<double>::infinity(), loy = lox;
    for (auto& t : tris)
        for (int i = 0; i < 3; ++i) {
            cell += norm(t[(i + 1) % 3] - t[i]);
            lox = std::min(lox, t[i].x);
            loy = std::min(loy, t[i].y);
        }
    cell = std::max(cell / (3.0 * static_cast<double>(tris.size())), 1e-9);
    auto cell_of = [&](double v, double lo) { return static_cast<std::int64_t>(std::floor((v - lo) / cell)); };
    auto key = [](std::int64_t a, std::int64_t b) { return (static_cast<std::uint64_t>(a) << 32) ^ static_cast<std::uint64_t>(b); };
    struct Box {
        std::int64_t x0, x1, y0, y1;
    };
    std::vector<Box> boxes(tris.size());
    std::unordered_map<std::uint64_t, std::vector<int>> grid;
    for (std::size_t i = 0; i < tris.size(); ++i) {
        auto& t = tris[i];
        Box b{cell_of(std::min({t[0].x, t[1].x, t[2].x}), lox), cell_of(std::max({t[0].x, t[1].x, t[2].x}), lox),
              cell_of(std::min({t[0].y, t[1].y, t[2].y}), loy), cell_of(std::max({t[0].y, t[1].y, t[2].y}), loy)};
        boxes[i] = b;
        for (auto x = b.x0; x <= b.x1; ++x)
            for (auto y = b.y0; y <= b.y1; ++y) grid[key(x, y)].push_back(static_cast<int>(i));
    }
    for (auto& [k, ids] : grid) {
        for (std::size_t a = 0; a < ids.size(); ++a)
            for (std::size_t b = a + 1; b < ids.size(); ++b) {
                const Box &ba = boxes[ids[a]], &bb = boxes[ids[b]];
                // Test each pair once, in the lowest shared cell.
                if (key(std::max(ba.x0, bb.x0), std::max(ba.y0, bb.y0)) != k) continue;
                const Vec2 t1[3] = {tris[ids[a]][0], tris[ids[a]][1], tris[ids[a]][2]};
                const Vec2 t2[3] = {tris[ids[b]][0], tris[ids[b]][1], tris[ids[b]][2]};
                if (triangles_overlap(t1, t2)) return false;
            }
    }
    return true;
}

}  // namespace detail

SubdivisionResult subdivide_absolute(const FieldContext& ctx, const ConstructionConstants& consts,
                                     const std::vector<LatticeCoords>& T0, const LatticeTriangle& center_in,
                                     const ReferenceSurface& surface, bool with_central_tile, SubdivisionMode mode) {
    if (mode == SubdivisionMode::Clipped && !exact_plane(ctx))
        throw MathRefusal("clipped subdivision needs a degree 2 field with nonreal lambda");
    LatticeTriangle center = center_in;
    if (orient_lattice(ctx, center.v[0], center.v[1], center.v[2]) < 0) std::swap(center.v[1], center.v[2]);
    const std::array<Vec2, 3> P = planar(ctx, center);
    const std::vector<LatticeCoords> Tpoly(center.v.begin(), center.v.end());
    const double l = ctx.lambda_abs();
    const double vbound = consts.M / l;
    SubdivisionResult res;

    PlanarRegion region;
    const double pad = mode == SubdivisionMode::Neighborhood ? consts.r1 : 0.0;
    region.lo = {std::min({P[0].x, P[1].x, P[2].x}) - pad, std::min({P[0].y, P[1].y, P[2].y}) - pad};
    region.hi = {std::max({P[0].x, P[1].x, P[2].x}) + pad, std::max({P[0].y, P[1].y, P[2].y}) + pad};
    if (mode == SubdivisionMode::Neighborhood) {
        region.contains = [&](Vec2 p) {
            for (auto& v : P)
                if (norm(p - v) < consts.r1) return true;
            return detail::distance_to_triangle(p, P) < consts.r2;
        };
    } else {
        // Loose test here; boundary points are settled exactly below.
        region.contains = [&](Vec2 p) { return detail::distance_to_triangle(p, P) < 1e-6; };
    }
    std::vector<LatticeCoords> pts = lattice_points_in_region(ctx, region, vbound, surface);
    if (mode == SubdivisionMode::Clipped) {
        std::erase_if(pts, [&](const LatticeCoords& c) { return !inside_closed(ctx, c, Tpoly); });
        for (auto& v : center.v)
            if (!std::binary_search(pts.begin(), pts.end(), v)) pts.insert(std::lower_bound(pts.begin(), pts.end(), v), v);
    }
    for (auto& c : pts) {
        Vec2 p = ctx.planar(c);
        bool zv = false;
        for (auto& v : P) zv = zv || norm(p - v) < consts.r1;
        double dt = detail::distance_to_triangle(p, P);
        bool zt = dt == 0;
        bool ze = false;
        for (int i = 0; i < 3; ++i) ze = ze || distance_to_segment(p, P[i], P[(i + 1) % 3]) < consts.r2;
        res.zone_vertex_points += zv;
        res.zone_edge_points += ze;
        res.zone_triangle_points += zt;
    }

    std::vector<LatticeCoords> C;
    std::vector<Vec2> Cpl;
    if (with_central_tile) {
        Vec2 a = P[0], b = P[1], c = P[2];
        double la = norm(b - c), lb = norm(c - a), lc = norm(a - b);
        Vec2 inc = (1.0 / (la + lb + lc)) * (la * a + lb * b + lc * c);
        const int D = ctx.embed_dim();
        auto pi = detail::planar_indices(ctx);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(D);
        w(pi[0]) = inc.x;
        w(pi[1]) = inc.y;
        Eigen::VectorXd h = surface.height(ctx, inc);
        const auto& vidx = ctx.vertical_indices();
        for (std::size_t i = 0; i < vidx.size(); ++i) w(vidx[i]) = h(static_cast<Eigen::Index>(i));
        detail::ReducedLattice lat(ctx, Eigen::VectorXd::Ones(D));
        LatticeCoords off = lat.babai(w);
        if (!(surface.vertical_distance(ctx, ctx.sigma(off)) < consts.M))
            throw ConstructionError("central tile offset violates the vertical bound");
        for (auto& v : T0) C.push_back(detail::add(ctx.mul_lambda(v), off));
        for (auto& v : C) {
            Cpl.push_back(ctx.planar(v));
            if (!strictly_inside(ctx, v, Tpoly)) throw ConstructionError("central tile leaves the subdivided triangle");
            for (int i = 0; i < 3; ++i)
                if (!(distance_to_segment(Cpl.back(), P[i], P[(i + 1) % 3]) > consts.r2))
                    throw ConstructionError("central tile meets an edge zone");
        }
        res.central_offset = off;
        res.central_vertices = C;
        std::erase_if(pts, [&](const LatticeCoords& p) { return strictly_inside(ctx, p, C); });
        for (auto& v : C)
            if (!std::binary_search(pts.begin(), pts.end(), v)) pts.insert(std::lower_bound(pts.begin(), pts.end(), v), v);
    }

    std::unordered_map<LatticeCoords, int, CoordsHash> index;
    std::vector<Vec2> pl(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        index[pts[k]] = static_cast<int>(k);
        pl[k] = ctx.planar(pts[k]);
    }
    std::vector<std::pair<int, int>> seg;
    if (with_central_tile) boundary_constraints(ctx, C, pts, index, seg);
    if (mode == SubdivisionMode::Clipped) boundary_constraints(ctx, Tpoly, pts, index, seg);
    std::vector<char> on_c(pts.size(), 0);
    if (with_central_tile)
        for (std::size_t k = 0; k < pts.size(); ++k) on_c[k] = !strictly_inside(ctx, pts[k], C) && inside_closed(ctx, pts[k], C);

    const auto tris = seg.empty() ? delaunay(pl) : constrained_delaunay(pl, seg);
    std::vector<std::array<Vec2, 3>> kept_pl;
    for (auto& t : tris) {
        std::array<Vec2, 3> q{pl[t[0]], pl[t[1]], pl[t[2]]};
        if (with_central_tile && point_in_polygon((1.0 / 3) * (q[0] + q[1] + q[2]), Cpl) > 0) continue;
        bool gap = false;
        if (with_central_tile) {
            gap = on_c[t[0]] || on_c[t[1]] || on_c[t[2]];
            Circle cc = circumcircle(q[0], q[1], q[2]);
            gap = gap || distance_to_convex_polygon(cc.center, Cpl) < cc.radius;
        }
        if (mode == SubdivisionMode::Neighborhood && !gap) {
            Circle cc = circumcircle(q[0], q[1], q[2]);
            if (!circumdisk_within(cc.center, cc.radius, P, consts.r2)) continue;
        }
        res.triangles.push_back({{pts[t[0]], pts[t[1]], pts[t[2]]}});
        res.gap.push_back(gap);
        kept_pl.push_back(q);
    }

    // Bounds the construction relies on.
    for (std::size_t i = 0; i < res.triangles.size(); ++i) {
        const auto& t = res.triangles[i];
        double e = 0, ev = 0;
        for (int j = 0; j < 3; ++j) {
            auto d = detail::sub(t.v[(j + 1) % 3], t.v[j]);
            e = std::max(e, norm(ctx.planar(d)));
            ev = std::max(ev, ctx.vertical_norm(d));
        }
        res.max_edge = std::max(res.max_edge, e);
        if (!res.gap[i]) res.max_edge_regular = std::max(res.max_edge_regular, e);
        res.max_vertical_edge = std::max(res.max_vertical_edge, ev);
        res.all_in_T = res.all_in_T && in_triangle_set(ctx, t, consts.M);
        res.all_scaled_in_T = res.all_scaled_in_T && in_triangle_set(ctx, scale_lambda(ctx, t, 1), consts.M);
    }
    if (!res.all_in_T) throw ConstructionError("subdivision emitted a triangle outside the triangle set");
    if (mode == SubdivisionMode::Neighborhood) {
        if (!(res.max_edge_regular < consts.M / l)) throw ConstructionError("edge length bound |w_i - w_j| < M/|lambda| fails");
        if (!(res.max_edge < 3 * consts.M / l)) throw ConstructionError("central tile annulus edge exceeds 3M/|lambda|");
        if (!(res.max_vertical_edge < 2.5 * consts.M / l)) throw ConstructionError("vertical edge bound fails");
        if (!res.all_scaled_in_T) throw ConstructionError("lambda t' leaves the triangle set");
    }

    res.overlap_free = detail::overlap_free(kept_pl);

    if (exact_plane(ctx)) {
        const int sign = ctx.lambda().imag() > 0 ? 1 : -1;
        mpq_class r = polygon_area2(ctx, Tpoly);
        for (auto& t : res.triangles) {
            bool in = true;
            for (auto& v : t.v) in = in && inside_closed(ctx, v, Tpoly);
            if (in)
                r -= detail::cross2(ctx, t.v[0], t.v[1], t.v[2]);
            else
                r -= clipped_area2(t.v, Tpoly, sign);
        }
        if (with_central_tile) r -= polygon_area2(ctx, C);
        res.cover_residual = r;
    }

    // Every unpaired edge of the output, other than the boundary of C, must
    // stay off the interior of the triangle.
    {
        std::unordered_set<std::uint64_t> directed;
        auto key = [](int a, int b) { return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b); };
        std::vector<std::array<int, 3>> ids;
        for (auto& t : res.triangles) ids.push_back({index.at(t.v[0]), index.at(t.v[1]), index.at(t.v[2])});
        for (auto& t : ids)
            for (int j = 0; j < 3; ++j) directed.insert(key(t[j], t[(j + 1) % 3]));
        for (auto& t : ids)
            for (int j = 0; j < 3; ++j) {
                int a = t[j], b = t[(j + 1) % 3];
                if (directed.count(key(b, a))) continue;
                if (on_c[a] && on_c[b]) continue;
                Vec2 pa = pl[a], pb = pl[b];
                bool enters = point_in_polygon(pa, P) > 0 || point_in_polygon(pb, P) > 0;
                for (int i = 0; i < 3 && !enters; ++i) {
                    int o1 = orient2d(pa, pb, P[i]), o2 = orient2d(pa, pb, P[(i + 1) % 3]);
                    int o3 = orient2d(P[i], P[(i + 1) % 3], pa), o4 = orient2d(P[i], P[(i + 1) % 3], pb);
                    enters = o1 * o2 < 0 && o3 * o4 < 0;
                }
                if (enters) res.covers_center = false;
            }
    }

    std::vector<std::size_t> order(res.triangles.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        res.triangles[i] = canonical(res.triangles[i], ctx);
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return res.triangles[a].v < res.triangles[b].v; });
    SubdivisionResult sorted = res;
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.triangles[i] = res.triangles[order[i]];
        sorted.gap[i] = res.gap[order[i]];
    }
    return sorted;
}

namespace {

ReferenceSurface surface_of(const FieldContext& ctx, const Surrounding& X, int N) {
    std::vector<LatticeTriangle> all{scale_lambda(ctx, X.center, N)};
    for (auto& t : X.ring) all.push_back(scale_lambda(ctx, t, N));
    return ReferenceSurface(ctx, all);
}

bool contains_triangle(const Surrounding& X, const LatticeTriangle& t, const FieldContext& ctx) {
    auto c = canonical(t, ctx);
    if (canonical(X.center, ctx) == c) return true;
    for (auto& r : X.ring)
        if (canonical(r, ctx) == c) return true;
    return false;
}

}  // namespace

SubdivisionResult subdivide_surrounding(const FieldContext& ctx, const ConstructionConstants& consts,
                                        const std::vector<LatticeCoords>& T0, const Surrounding& X,
                                        bool with_central_tile, SubdivisionMode mode) {
    const int N = consts.exponent();
    if (!in_triangle_set(ctx, X.center, consts.M)) throw std::invalid_argument("surrounding center is not in the triangle set");
    ReferenceSurface surface = ctx.vertical_indices().empty() ? ReferenceSurface() : surface_of(ctx, X, N);
    return subdivide_absolute(ctx, consts, T0, scale_lambda(ctx, X.center, N), surface, with_central_tile, mode);
}

OverlapReport overlap_agreement(const FieldContext& ctx, const ConstructionConstants& consts,
                                const std::vector<LatticeCoords>& T0, const Surrounding& X1, const Surrounding& X2) {
    OverlapReport rep;
    std::vector<LatticeCoords> shared;
    for (auto& a : X1.center.v)
        for (auto& b : X2.center.v)
            if (a == b) shared.push_back(a);
    if (!contains_triangle(X1, X2.center, ctx) || !contains_triangle(X2, X1.center, ctx) || shared.empty()) {
        rep.vacuous = true;
        return rep;
    }
    const int N = consts.exponent();
    auto s1 = subdivide_surrounding(ctx, consts, T0, X1, false);
    auto s2 = subdivide_surrounding(ctx, consts, T0, X2, false);
    // Zone: N_r2 of the shared vertex, edge, or (identical centers) whole triangle.
    std::vector<Vec2> zone;
    for (auto& v : shared) zone.push_back(ctx.planar(ctx.mul_lambda_pow(v, N)));
    auto in_zone = [&](const LatticeTriangle& t) {
        auto q = planar(ctx, t);
        Circle cc = circumcircle(q[0], q[1], q[2]);
        double d;
        if (zone.size() == 1)
            d = norm(cc.center - zone[0]);
        else if (zone.size() == 2)
            d = distance_to_segment(cc.center, zone[0], zone[1]);
        else
            d = detail::distance_to_triangle(cc.center, {zone[0], zone[1], zone[2]});
        return d + cc.radius < consts.r2;
    };
    std::vector<std::array<LatticeCoords, 3>> a, b;
    for (auto& t : s1.triangles)
        if (in_zone(t)) a.push_back(t.v);
    for (auto& t : s2.triangles)
        if (in_zone(t)) b.push_back(t.v);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::array<LatticeCoords, 3>> diff;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
    rep.compared = a.size();
    rep.mismatched = diff.size();
    rep.pass = diff.empty() && !a.empty();
    return rep;
}

}  // namespace selfsim

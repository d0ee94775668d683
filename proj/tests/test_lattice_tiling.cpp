#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <set>

#include "json.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/lattice_tiling.hpp"

using namespace selfsim;

namespace {

// For lambda = 1 + i the coefficient vector (a, b) is the Gaussian integer a + b + bi.
using Gauss = std::pair<long, long>;
Gauss gauss(const LatticeCoords& c) { return {c[0] + c[1], c[1]}; }
long cross_g(Gauss a, Gauss b, Gauss c) {
    return (b.first - a.first) * (c.second - a.second) - (b.second - a.second) * (c.first - a.first);
}
Gauss times_lambda(Gauss z) { return {z.first - z.second, z.first + z.second}; }

struct Setup {
    FieldContext ctx;
    std::vector<LatticeCoords> T0;
    std::vector<LatticeTriangle> annulus;
    ConstructionConstants k;
};

const Setup& gaussian() {
    static Setup s = [] {
        auto ctx = FieldContext::build(IntPolynomial({2, -2, 1}));
        auto T0 = build_T0(ctx);
        auto A = triangulate_annulus(ctx, T0);
        auto k = compute_constants(ctx, T0, A);
        return Setup{ctx, T0, A, k};
    }();
    return s;
}

// Same M and theta with a small exponent and zone radius, so subdivisions stay
// at a few thousand triangles.
ConstructionConstants reduced(const ConstructionConstants& k, int n, double r2) {
    ConstructionConstants c = k;
    c.n = n;
    c.r2 = r2;
    c.r1 = r2 / std::sin(k.theta / 2);
    return c;
}

LatticeTriangle roundest(const Setup& s) {
    auto best = s.annulus[0];
    double r = 0;
    for (auto& t : s.annulus) {
        auto p = planar(s.ctx, t);
        if (inradius(p[0], p[1], p[2]) > r) {
            r = inradius(p[0], p[1], p[2]);
            best = t;
        }
    }
    return best;
}

// Brute force: every coefficient vector in a box large enough to contain the
// preimage of the search cylinder.
std::vector<LatticeCoords> lattice_bruteforce(const FieldContext& ctx, Vec2 c, double R, double bound) {
    const int k = ctx.coeff_dim();
    const auto& inv = ctx.sigma_inverse();
    double reach = std::sqrt((std::hypot(c.x, c.y) + R) * (std::hypot(c.x, c.y) + R) + bound * bound * k);
    long B = 0;
    for (int i = 0; i < k; ++i) B = std::max(B, static_cast<long>(std::ceil(inv.row(i).norm() * reach)) + 1);
    std::vector<LatticeCoords> out;
    LatticeCoords x(k, -B);
    while (true) {
        Eigen::VectorXd w = ctx.sigma(x);
        Vec2 p = ctx.pi_project(w);
        if (norm(p - c) < R && ctx.vertical_part(w).norm() < bound) out.push_back(x);
        int i = 0;
        while (i < k && x[i] == B) x[i++] = -B;
        if (i == k) break;
        ++x[i];
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("T0 for lambda = 1 + i is the octagon") {
    const auto& s = gaussian();
    std::set<Gauss> got;
    for (auto& v : s.T0) got.insert(gauss(v));
    std::set<Gauss> want{{3, 0}, {-3, 0}, {0, 3}, {0, -3}, {2, 2}, {2, -2}, {-2, 2}, {-2, -2}};
    CHECK(got == want);
    // Strict containment by half-planes of lambda T0, counterclockwise.
    std::vector<Gauss> poly;
    for (auto& v : s.T0) poly.push_back(times_lambda(gauss(v)));
    for (auto& v : s.T0)
        for (std::size_t i = 0; i < poly.size(); ++i) CHECK(cross_g(poly[i], poly[(i + 1) % poly.size()], gauss(v)) > 0);
}

TEST_CASE("symmetric T0") {
    const auto& s = gaussian();
    auto T2 = build_T0(s.ctx, 2);
    std::set<Gauss> g2;
    for (auto& v : T2) g2.insert(gauss(v));
    for (auto& z : g2) CHECK(g2.count({-z.first, -z.second}) == 1);
    auto T4 = build_T0(s.ctx, 4);
    std::set<Gauss> g4;
    for (auto& v : T4) g4.insert(gauss(v));
    for (auto& z : g4) CHECK(g4.count({-z.second, z.first}) == 1);
    CHECK_THROWS_AS(build_T0(s.ctx, 5), MathRefusal);

    auto cubic = FieldContext::build(IntPolynomial({1, 2, -1, 1}));
    auto C = build_T0(cubic, 2);
    std::set<LatticeCoords> cs(C.begin(), C.end());
    for (auto v : C) {
        for (auto& x : v) x = -x;
        CHECK(cs.count(v) == 1);
    }
}

TEST_CASE("annulus triangulation") {
    const auto& s = gaussian();
    long t0 = 0, outer = 0, sum = 0;
    const std::size_t m = s.T0.size();
    for (std::size_t i = 0; i < m; ++i) {
        t0 += cross_g({0, 0}, gauss(s.T0[i]), gauss(s.T0[(i + 1) % m]));
        outer += cross_g({0, 0}, times_lambda(gauss(s.T0[i])), times_lambda(gauss(s.T0[(i + 1) % m])));
    }
    for (auto& t : s.annulus) {
        long a = cross_g(gauss(t.v[0]), gauss(t.v[1]), gauss(t.v[2]));
        CHECK(a > 0);
        sum += a;
        CHECK(in_triangle_set(s.ctx, t, s.k.M));
    }
    CHECK(outer == 2 * t0);
    CHECK(sum == outer - t0);
    CHECK(s.annulus.size() >= 2 * m);
}

TEST_CASE("construction constants for lambda = 1 + i") {
    const auto& s = gaussian();
    const auto& k = s.k;
    double max_len = 0, min_inr = 1e300, theta = 10;
    for (auto& t : s.annulus) {
        auto p = planar(s.ctx, t);
        for (int i = 0; i < 3; ++i) max_len = std::max(max_len, norm(p[(i + 1) % 3] - p[i]));
        min_inr = std::min(min_inr, inradius(p[0], p[1], p[2]));
        theta = std::min(theta, min_angle(p[0], p[1], p[2]));
    }
    CHECK(k.cond1 == 0);
    CHECK(k.cond2 == doctest::Approx(2 * max_len));
    // Smallest integer above 2 max|edge| and at least 2|lambda| times the covering radius.
    CHECK(k.M > 2 * max_len);
    CHECK(k.M - 1 <= std::max(2 * max_len, k.cond3));
    CHECK(k.M >= k.cond3);
    CHECK(k.cond3 >= 2 * std::sqrt(2.0) * std::sqrt(0.5) - 1e-12);
    CHECK(k.M == 7);
    CHECK(k.theta == doctest::Approx(theta));
    CHECK(k.r2 == 2 * k.M);
    CHECK(k.r1 == doctest::Approx(k.r2 / std::sin(k.theta / 2)));
    CHECK(k.n_flat == 0);
    // Inradius condition holds at n and fails at n - 1.
    double need = 2 * 2 * std::sqrt(2.0) * 3 + 2 * k.r2;
    CHECK(std::pow(2.0, k.n / 2.0) * min_inr >= need);
    CHECK(std::pow(2.0, (k.n - 1) / 2.0) * min_inr < need);
    auto j = nlohmann::json::parse(constants_to_json(k));
    CHECK(j["M"] == 7);
    CHECK(j["exponent"] == k.n + 2);
}

TEST_CASE("constants on a cubic field") {
    auto ctx = FieldContext::build(IntPolynomial({1, 2, -1, 1}));
    auto T0 = build_T0(ctx);
    auto A = triangulate_annulus(ctx, T0);
    auto k = compute_constants(ctx, T0, A);
    CHECK(k.M > k.cond1);
    CHECK(k.M > k.cond2);
    CHECK(k.M >= k.cond3);
    CHECK(k.difference_set_size > 0);
    for (auto& t : A) {
        CHECK(in_triangle_set(ctx, t, k.M));
        CHECK(bilipschitz_constant(ctx, t.v, k.n) < 1.5);
    }
    // Enlarging T0 never lowers M.
    std::vector<LatticeCoords> big;
    for (auto& v : T0) big.push_back(ctx.mul_lambda(ctx.mul_lambda(v)));
    auto kb = compute_constants(ctx, big, triangulate_annulus(ctx, big));
    CHECK(kb.M >= k.M);
}

TEST_CASE("lattice points in a region") {
    const auto& s = gaussian();
    PlanarRegion unit{{-1, -1}, {1, 1}, [](Vec2 p) { return norm(p) < 1; }};
    auto pts = lattice_points_in_region(s.ctx, unit, 1.0, ReferenceSurface());
    CHECK(pts == std::vector<LatticeCoords>{{0, 0}});
    PlanarRegion closed{{-1, -1}, {1, 1}, [](Vec2 p) { return norm(p) <= 1; }};
    CHECK(lattice_points_in_region(s.ctx, closed, 1.0, ReferenceSurface()).size() == 5);
    PlanarRegion none{{0.2, 0.2}, {0.8, 0.8}, [](Vec2) { return true; }};
    CHECK(lattice_points_in_region(s.ctx, none, 1.0, ReferenceSurface()).empty());
    CHECK(lattice_points_in_region(s.ctx, unit, 0.0, ReferenceSurface()).empty());
    PlanarRegion inf{{-INFINITY, 0}, {1, 1}, [](Vec2) { return true; }};
    CHECK_THROWS_AS(lattice_points_in_region(s.ctx, inf, 1.0, ReferenceSurface()), std::invalid_argument);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-4, 4);
    for (auto poly : {std::vector<std::int64_t>{1, 2, -1, 1}, std::vector<std::int64_t>{2, -2, 1},
                      std::vector<std::int64_t>{-1, 1, 0, 1}}) {
        auto ctx = FieldContext::build(IntPolynomial(poly));
        for (int trial = 0; trial < 4; ++trial) {
            Vec2 c{u(rng), u(rng)};
            double R = 1.5 + trial, bound = 0.8 + 0.5 * trial;
            PlanarRegion disk{{c.x - R, c.y - R}, {c.x + R, c.y + R}, [&](Vec2 p) { return norm(p - c) < R; }};
            CHECK(lattice_points_in_region(ctx, disk, bound, ReferenceSurface()) == lattice_bruteforce(ctx, c, R, bound));
        }
    }
}

TEST_CASE("subdivision of a surrounding") {
    const auto& s = gaussian();
    auto k = reduced(s.k, 7, 2.0);
    auto t = roundest(s);
    const double l = std::sqrt(2.0);
    for (auto mode : {SubdivisionMode::Neighborhood, SubdivisionMode::Clipped}) {
        auto r = subdivide_surrounding(s.ctx, k, s.T0, Surrounding{t, {}}, true, mode);
        CHECK(r.max_edge < k.M / l);
        CHECK(r.all_in_T);
        CHECK(r.all_scaled_in_T);
        CHECK(r.overlap_free);
        CHECK(r.covers_center);
        REQUIRE(r.cover_residual);
        CHECK(*r.cover_residual == 0);
        REQUIRE(r.central_offset);
        // The central tile sits inside lambda^N t, away from the edge zones.
        auto T = planar(s.ctx, scale_lambda(s.ctx, t, k.exponent()));
        for (auto& v : r.central_vertices) {
            Vec2 p = s.ctx.planar(v);
            for (int i = 0; i < 3; ++i) {
                CHECK(cross(T[(i + 1) % 3] - T[i], p - T[i]) > 0);
                CHECK(distance_to_segment(p, T[i], T[(i + 1) % 3]) > k.r2);
            }
        }
        if (mode == SubdivisionMode::Clipped) continue;
        // Regular triangles are Delaunay: no lattice point inside their circumcircle.
        std::size_t checked = 0;
        for (std::size_t i = 0; i < r.triangles.size() && checked < 200; i += 17) {
            if (r.gap[i]) continue;
            auto q = planar(s.ctx, r.triangles[i]);
            Circle cc = circumcircle(q[0], q[1], q[2]);
            for (long x = std::floor(cc.center.x - cc.radius) - 1; x <= cc.center.x + cc.radius + 1; ++x)
                for (long y = std::floor(cc.center.y - cc.radius) - 1; y <= cc.center.y + cc.radius + 1; ++y) {
                    Vec2 d{double(x), double(y)};
                    if (d == q[0] || d == q[1] || d == q[2]) continue;
                    CHECK(incircle(q[0], q[1], q[2], d) < 0);
                }
            ++checked;
        }
        CHECK(checked > 0);
    }
    // Without the central tile, every triangle is regular.
    auto plain = subdivide_surrounding(s.ctx, k, s.T0, Surrounding{t, {}}, false);
    CHECK(std::count(plain.gap.begin(), plain.gap.end(), 1) == 0);
    CHECK(*plain.cover_residual == 0);
}

TEST_CASE("overlap agreement") {
    const auto& s = gaussian();
    auto k = reduced(s.k, 7, 2.0);
    // Two annulus triangles sharing an edge.
    std::optional<std::pair<LatticeTriangle, LatticeTriangle>> pair;
    for (std::size_t i = 0; i < s.annulus.size() && !pair; ++i)
        for (std::size_t j = i + 1; j < s.annulus.size() && !pair; ++j) {
            int shared = 0;
            for (auto& a : s.annulus[i].v)
                for (auto& b : s.annulus[j].v) shared += a == b;
            if (shared == 2) pair = {s.annulus[i], s.annulus[j]};
        }
    REQUIRE(pair);
    auto [t1, t2] = *pair;
    Surrounding X1{t1, {t2}}, X2{t2, {t1}};
    auto rep = overlap_agreement(s.ctx, k, s.T0, X1, X2);
    CHECK(rep.pass);
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.compared > 0);
    CHECK(rep.mismatched == 0);
    auto same = overlap_agreement(s.ctx, k, s.T0, X1, X1);
    CHECK(same.pass);
    CHECK(same.mismatched == 0);
    LatticeTriangle far = t2;
    for (auto& v : far.v) v[0] += 1000;
    auto disjoint = overlap_agreement(s.ctx, k, s.T0, X1, Surrounding{far, {}});
    CHECK(disjoint.pass);
    CHECK(disjoint.vacuous);
}

TEST_CASE("growth") {
    const auto& s = gaussian();
    auto k = reduced(s.k, 7, 1.0);
    const int top = k.n + 2;
    auto g0 = grow_tiling(s.ctx, k, s.T0, s.annulus, 0);
    CHECK(g0.triangles.empty());
    CHECK(g0.central_tiles.size() == 1);

    // Before the first subdivision the patch is the concentric annuli
    // lambda^j A, labelled by age.
    auto homothetic = grow_tiling(s.ctx, k, s.T0, s.annulus, top);
    std::set<std::pair<std::set<Gauss>, int>> got, want;
    for (std::size_t i = 0; i < homothetic.triangles.size(); ++i) {
        auto t = homothetic.triangle(i);
        got.insert({{gauss(t.v[0]), gauss(t.v[1]), gauss(t.v[2])}, homothetic.triangles[i].label});
    }
    for (int j = 0; j < top; ++j)
        for (auto& t : s.annulus) {
            std::set<Gauss> tri;
            for (auto& v : t.v) {
                Gauss z = gauss(v);
                for (int p = 0; p < top - 1 - j; ++p) z = times_lambda(z);
                tri.insert(z);
            }
            want.insert({tri, top - j});
        }
    CHECK(got == want);

    GrowthReport prev = check_patch(s.ctx, homothetic, s.T0);
    for (int g = top + 1; g <= top + 3; ++g) {
        auto p = grow_tiling(s.ctx, k, s.T0, s.annulus, g);
        auto r = check_patch(s.ctx, p, s.T0);
        CHECK(r.labels_ok);
        CHECK(r.overlap_free);
        CHECK(*r.cover_residual == 0);
        // Label shift: every label above 1 comes from the previous generation.
        for (int lab = 2; lab <= top; ++lab) CHECK(r.label_histogram[lab] == prev.label_histogram[lab - 1]);
        CHECK(r.label_histogram[0] == prev.label_histogram[0] + prev.label_histogram[top]);
        CHECK(r.label_histogram[1] > s.annulus.size() * r.label_histogram[0]);
        prev = r;
    }
    auto j = nlohmann::json::parse(patch_to_json(s.ctx, homothetic));
    CHECK(j["triangles"].size() == homothetic.triangles.size());

    auto cubic = FieldContext::build(IntPolynomial({1, 2, -1, 1}));
    CHECK_THROWS_AS(grow_tiling(cubic, k, s.T0, s.annulus, 1), MathRefusal);
    CHECK_THROWS_AS(grow_tiling(s.ctx, k, s.T0, s.annulus, top + 1, 100), ResourceError);
}

TEST_CASE("edge arcs") {
    const auto& s = gaussian();
    auto k = reduced(s.k, 7, 3.0);
    auto zone = [&](LatticeCoords shift) {
        std::vector<Vec2> pl;
        std::vector<LatticeCoords> pts;
        for (long x = -5; x <= 25; ++x)
            for (long y = -8; y <= 8; ++y) {
                LatticeCoords c{x - y + shift[0], y + shift[1]};
                pts.push_back(c);
                pl.push_back(s.ctx.planar(c));
            }
        std::vector<LatticeTriangle> tris;
        for (auto& t : delaunay(pl)) tris.push_back({{pts[t[0]], pts[t[1]], pts[t[2]]}});
        return tris;
    };
    // Straight corridor along the real axis: the geodesic is the straight edge path.
    auto arc = edge_arc(s.ctx, k, zone({0, 0}), {0, 0}, {20, 0});
    REQUIRE(arc.size() == 21);
    for (long i = 0; i <= 20; ++i) CHECK(arc[i] == LatticeCoords{i, 0});
    // A slanted edge, and the same edge translated by a lattice vector.
    LatticeCoords a{0, 0}, b{17, 5}, w{3, -2};
    auto base = edge_arc(s.ctx, k, zone({0, 0}), a, b);
    auto moved = edge_arc(s.ctx, k, zone(w), w, {b[0] + w[0], b[1] + w[1]});
    REQUIRE(base.size() == moved.size());
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(moved[i] == LatticeCoords{base[i][0] + w[0], base[i][1] + w[1]});
    double len = 0;
    for (std::size_t i = 0; i + 1 < base.size(); ++i) len += norm(s.ctx.planar(base[i + 1]) - s.ctx.planar(base[i]));
    CHECK(len >= norm(s.ctx.planar(b)) - 1e-9);
    // Arcs leaving a common vertex in different directions only share a prefix.
    auto other = edge_arc(s.ctx, k, zone({0, 0}), a, {14, -6});
    std::size_t common = 0;
    while (common < base.size() && common < other.size() && base[common] == other[common]) ++common;
    for (std::size_t i = common; i + 1 < base.size(); ++i)
        for (std::size_t j = common; j + 1 < other.size(); ++j)
            CHECK_FALSE(segments_intersect(s.ctx.planar(base[i]), s.ctx.planar(base[i + 1]), s.ctx.planar(other[j]),
                                           s.ctx.planar(other[j + 1])));
    CHECK_THROWS_AS(edge_arc(s.ctx, k, zone({0, 0}), a, {500, 0}), ConstructionError);
}

TEST_CASE("boundary refinement") {
    const auto& s = gaussian();
    auto t = s.annulus[0];
    auto r = refine_boundary(s.ctx, s.k, s.T0, t, 1);
    REQUIRE(r.curves.size() == 1);
    CHECK(r.simple);
    CHECK(r.curves[0].closed);
    // The curve stays within r2 |lambda|^-N of the triangle boundary.
    auto p = planar(s.ctx, t);
    const double tol = s.k.r2 * std::pow(std::sqrt(2.0), -s.k.exponent());
    for (auto& v : r.curves[0].vertices) {
        double d = 1e300;
        for (int i = 0; i < 3; ++i) d = std::min(d, distance_to_segment(v, p[i], p[(i + 1) % 3]));
        CHECK(d < tol);
    }
    // Near a corner of angle theta the curve may cut across up to r1 instead.
    CHECK(r.hausdorff[0] < s.k.r1 * std::pow(std::sqrt(2.0), -s.k.exponent()));
    CHECK(r.hausdorff[0] > 0);
    CHECK(r.fitted_constant == doctest::Approx(r.hausdorff[0] * std::pow(std::sqrt(2.0), s.k.exponent())));
    // Orientation is preserved.
    CHECK(signed_area(r.curves[0]) == doctest::Approx(0.5 * cross(p[1] - p[0], p[2] - p[0])).epsilon(0.05));
    CHECK_THROWS_AS(refine_boundary(s.ctx, s.k, s.T0, t, 3), ResourceError);
    auto cubic = FieldContext::build(IntPolynomial({1, 2, -1, 1}));
    CHECK_THROWS_AS(refine_boundary(cubic, s.k, s.T0, t, 1), MathRefusal);
}

#include "selfsim/geometry.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <limits>

namespace selfsim {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon() * 0.5;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;
constexpr double kIntLimit = 268435456.0;  // 2^28

bool small_integer(double v) { return std::fabs(v) < kIntLimit && v == std::floor(v); }

template <class... P>
bool all_small_integers(P... p) {
    return (... && (small_integer(p.x) && small_integer(p.y)));
}

template <class T>
int sign_of(const T& v) {
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

int orient_exact(Vec2 a, Vec2 b, Vec2 c) {
    if (all_small_integers(a, b, c)) {
        using I = __int128;
        I abx = static_cast<I>(b.x) - static_cast<I>(a.x), aby = static_cast<I>(b.y) - static_cast<I>(a.y);
        I acx = static_cast<I>(c.x) - static_cast<I>(a.x), acy = static_cast<I>(c.y) - static_cast<I>(a.y);
        return sign_of(abx * acy - aby * acx);
    }
    mpq_class ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    mpq_class v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    return sgn(v);
}

int incircle_exact(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (all_small_integers(a, b, c, d)) {
        using I = __int128;
        auto dx = [&](Vec2 p) { return static_cast<I>(p.x) - static_cast<I>(d.x); };
        auto dy = [&](Vec2 p) { return static_cast<I>(p.y) - static_cast<I>(d.y); };
        I adx = dx(a), ady = dy(a), bdx = dx(b), bdy = dy(b), cdx = dx(c), cdy = dy(c);
        I alift = adx * adx + ady * ady;
        I blift = bdx * bdx + bdy * bdy;
        I clift = cdx * cdx + cdy * cdy;
        I det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                clift * (adx * bdy - bdx * ady);
        return sign_of(det);
    }
    mpq_class dxq(d.x), dyq(d.y);
    mpq_class adx = mpq_class(a.x) - dxq, ady = mpq_class(a.y) - dyq;
    mpq_class bdx = mpq_class(b.x) - dxq, bdy = mpq_class(b.y) - dyq;
    mpq_class cdx = mpq_class(c.x) - dxq, cdy = mpq_class(c.y) - dyq;
    mpq_class alift = adx * adx + ady * ady;
    mpq_class blift = bdx * bdx + bdy * bdy;
    mpq_class clift = cdx * cdx + cdy * cdy;
    mpq_class det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                    clift * (adx * bdy - bdx * ady);
    return sgn(det);
}

}  // namespace

int orient2d(Vec2 a, Vec2 b, Vec2 c) {
    double detleft = (b.x - a.x) * (c.y - a.y);
    double detright = (b.y - a.y) * (c.x - a.x);
    double det = detleft - detright;
    double bound = kOrientBound * (std::fabs(detleft) + std::fabs(detright));
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return orient_exact(a, b, c);
}

int incircle_raw(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    double adx = a.x - d.x, ady = a.y - d.y;
    double bdx = b.x - d.x, bdy = b.y - d.y;
    double cdx = c.x - d.x, cdy = c.y - d.y;
    double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    double cdxady = cdx * ady, adxcdy = adx * cdy;
    double adxbdy = adx * bdy, bdxady = bdx * ady;
    double alift = adx * adx + ady * ady;
    double blift = bdx * bdx + bdy * bdy;
    double clift = cdx * cdx + cdy * cdy;
    double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                       (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                       (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    double bound = kIncircleBound * permanent;
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return incircle_exact(a, b, c, d);
}

int incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    int s = incircle_raw(a, b, c, d);
    if (s != 0) return s;
    // Coefficient of each point's lift perturbation in the determinant.
    std::array<std::pair<Vec2, int>, 4> terms = {{
        {a, orient2d(b, c, d)},
        {b, -orient2d(a, c, d)},
        {c, orient2d(a, b, d)},
        {d, -orient2d(a, b, c)},
    }};
    std::sort(terms.begin(), terms.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    for (auto& [p, coef] : terms)
        if (coef != 0) return coef;
    return 0;
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    int o1 = orient2d(p1, p2, q1), o2 = orient2d(p1, p2, q2);
    int o3 = orient2d(q1, q2, p1), o4 = orient2d(q1, q2, p2);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    auto on_segment = [](Vec2 a, Vec2 b, Vec2 p) {
        return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
               p.y <= std::max(a.y, b.y);
    };
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

bool triangles_overlap(const Vec2 (&t1)[3], const Vec2 (&t2)[3]) {
    auto separated = [](const Vec2 (&a)[3], const Vec2 (&b)[3]) {
        for (int e = 0; e < 3; ++e) {
            Vec2 p = a[e], q = a[(e + 1) % 3];
            bool all_out = true;
            for (int k = 0; k < 3 && all_out; ++k) all_out = orient2d(p, q, b[k]) <= 0;
            if (all_out) return true;
        }
        return false;
    };
    return !separated(t1, t2) && !separated(t2, t1);
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0) return norm(p - a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

double polygon_signed_area(std::span<const Vec2> poly) {
    double s = 0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * s;
}

int point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = poly[i], b = poly[(i + 1) % n];
        if (orient2d(a, b, p) == 0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
            std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y))
            return 0;
        if ((a.y > p.y) != (b.y > p.y)) {
            int o = orient2d(a, b, p);
            if (b.y > a.y ? o > 0 : o < 0) inside = !inside;
        }
    }
    return inside ? 1 : -1;
}

double distance_to_convex_polygon(Vec2 p, std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    bool inside = true;
    for (std::size_t i = 0; i < n && inside; ++i)
        if (orient2d(poly[i], poly[(i + 1) % n], p) < 0) inside = false;
    if (inside) return 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) best = std::min(best, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
    return best;
}

Circle circumcircle(Vec2 a, Vec2 b, Vec2 c) {
    Vec2 ab = b - a, ac = c - a;
    double d = 2 * cross(ab, ac);
    double ab2 = dot(ab, ab), ac2 = dot(ac, ac);
    Vec2 off{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
    return {a + off, norm(off)};
}

double inradius(Vec2 a, Vec2 b, Vec2 c) {
    double area = std::fabs(cross(b - a, c - a)) * 0.5;
    double s = 0.5 * (norm(b - a) + norm(c - b) + norm(a - c));
    return s > 0 ? area / s : 0;
}

double min_angle(Vec2 a, Vec2 b, Vec2 c) {
    auto angle = [](Vec2 p, Vec2 q, Vec2 r) {
        Vec2 u = q - p, v = r - p;
        return std::fabs(std::atan2(cross(u, v), dot(u, v)));
    };
    return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

}  // namespace selfsim

// Acceptance gate: one line per criterion, pass/fail with wall time.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "oracles.hpp"
#include "selfsim/delaunay.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/free_group.hpp"
#include "selfsim/lattice_tiling.hpp"
#include "selfsim/number_field.hpp"
#include "selfsim/spectral.hpp"
#include "selfsim/tiling_render.hpp"

using namespace selfsim;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Word random_word(std::mt19937_64& rng, int n, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len), gen(1, n), sgn(0, 1);
    std::vector<Letter> l;
    int k = len(rng);
    for (int i = 0; i < k; ++i) l.push_back({gen(rng), sgn(rng) ? 1 : -1});
    return Word(l);
}

// Products of conjugated commutators; these have zero abelianization.
Word random_commutator_word(std::mt19937_64& rng, int n, std::size_t max_len) {
    std::uniform_int_distribution<int> count(1, 4);
    while (true) {
        Word w;
        int k = count(rng);
        for (int i = 0; i < k; ++i)
            w = multiply(w, conjugate(commutator(random_word(rng, n, 4), random_word(rng, n, 4)), random_word(rng, n, 4)));
        if (!w.empty() && w.length() <= max_len) return w;
    }
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Outcome c1() {
    auto s = endo_subdivision(standard_endo(3, 1, 2, 1));
    IntMatrix want{{0, 1, 0}, {0, 2, 1}, {1, 1, 0}};
    bool basis = s.basis == std::vector<std::pair<int, int>>{{1, 2}, {2, 3}, {1, 3}};
    return {s.matrix == want && basis, "rows (0,1,0),(0,2,1),(1,1,0) in [a,b],[b,c],[a,c]"};
}

Outcome c2() {
    auto s = endo_subdivision(standard_endo(3, 1, 2, 1));
    auto pe = perron_eigen(s.matrix);
    auto ctx = FieldContext::build(IntPolynomial({1, 2, -1, 1}));
    auto l = ctx.lambda();
    if (l.imag() < 0) l = std::conj(l);
    double l2 = std::norm(l);
    double rel = std::abs(pe.value - l2) / l2;
    double dl = std::abs(l - std::complex<double>(0.696, 1.436));
    return {rel < 1e-7 && dl < 5e-3, fmt("rel %.2e, |lambda - 0.696+1.436i| = %.2e", rel, dl)};
}

Outcome c3() {
    auto phi = standard_endo(3, 1, 2, 1);
    auto ctx = FieldContext::build(IntPolynomial({1, 2, -1, 1}));
    auto l = ctx.lambda();
    auto g = generator_vectors(l, 3);
    double l2 = std::norm(l);
    std::mt19937_64 rng(2024);
    double worst = 0;
    int zero_area = 0;
    for (int t = 0; t < 200; ++t) {
        Word w = random_commutator_word(rng, 3, 40);
        double a = signed_area(word_to_path(w, g));
        double b = signed_area(word_to_path(apply_endo(phi, w), g));
        // Zero-area words (e.g. a commutator of commuting letters) are compared absolutely.
        double scale = std::abs(a) > 1e-9 ? l2 * std::abs(a) : 1.0;
        if (std::abs(a) <= 1e-9) ++zero_area;
        worst = std::max(worst, std::abs(b - l2 * a) / scale);
    }
    return {worst < 1e-9, fmt("max rel %.2e over 200 words (%g with zero area)", worst, zero_area)};
}

Outcome c4() {
    std::mt19937_64 rng(77);
    int ok = 0, maxlen = 0;
    for (int t = 0; t < 500; ++t) {
        int n = 3 + t % 3;
        Word w = random_commutator_word(rng, n, 60);
        maxlen = std::max<int>(maxlen, static_cast<int>(w.length()));
        ok += product(decompose_commutator_word(w)) == w;
    }
    return {ok == 500, fmt("%g/500 round trips, longest word %g", ok, maxlen)};
}

Outcome c5() {
    auto phi = standard_endo(3, 1, 2, 1);
    auto ctx = FieldContext::build(IntPolynomial({1, 2, -1, 1}));
    auto l = ctx.lambda();
    double target = 1 / std::abs(l);
    double worst = 0;
    bool simple = true;
    for (auto pr : pair_basis(3)) {
        std::vector<Polyline> c;
        for (int k = 4; k <= 10; ++k) c.push_back(boundary_approx(phi, pr, k, l));
        std::vector<double> d;
        for (int k = 4; k <= 9; ++k) d.push_back(hausdorff_distance(c[k - 4], c[k - 3]));
        for (std::size_t i = 1; i < d.size(); ++i) worst = std::max(worst, std::abs(d[i] / d[i - 1] - target) / target);
        simple = simple && simplicity_check(c[2]);
    }
    return {worst <= 0.25 && simple, fmt("max |ratio - 1/|lambda||/(1/|lambda|) = %.2e, simple at k=6: %g", worst, simple)};
}

Outcome c6() {
    std::mt19937_64 rng(606);
    int ok = 0, runs = 0;
    while (runs < 100) {
        std::uniform_int_distribution<int> size(3, 12);
        std::uniform_int_distribution<int> coord(0, runs % 3 == 0 ? 4 : 30);
        int n = size(rng);
        std::set<std::pair<int, int>> seen;
        std::vector<Vec2> p;
        while (static_cast<int>(p.size()) < n) {
            int x = coord(rng), y = coord(rng);
            if (seen.insert({x, y}).second) p.push_back({double(x), double(y)});
        }
        bool collinear = true;
        for (std::size_t i = 2; i < p.size(); ++i)
            if (orient2d(p[0], p[1], p[i]) != 0) collinear = false;
        if (collinear) continue;
        ++runs;
        ok += delaunay(p) == oracle::delaunay_bruteforce(p);
    }
    return {ok == 100, fmt("%g/100 point sets agree", ok)};
}

bool in_tri(const std::array<Vec2, 3>& t, Vec2 q) {
    return orient2d(t[0], t[1], q) > 0 && orient2d(t[1], t[2], q) > 0 && orient2d(t[2], t[0], q) > 0;
}

Outcome c7() {
    auto ctx = FieldContext::build(IntPolynomial({2, -2, 1}));
    auto T0 = build_T0(ctx);
    auto annulus = triangulate_annulus(ctx, T0);
    auto consts = compute_constants(ctx, T0, annulus);
    // Two annulus triangles sharing an edge, each the other's ring.
    std::size_t a = 0, b = 0;
    for (std::size_t i = 1; i < annulus.size() && b == 0; ++i) {
        int shared = 0;
        for (auto& u : annulus[0].v)
            for (auto& v : annulus[i].v) shared += u == v;
        if (shared == 2) b = i;
    }
    Surrounding X1{annulus[a], {annulus[b]}}, X2{annulus[b], {annulus[a]}};
    auto sub = subdivide_surrounding(ctx, consts, T0, X1, true);

    // Edge bound recomputed from the emitted triangles.
    double bound = consts.M / std::sqrt(2.0), worst = 0;
    for (auto& t : sub.triangles) {
        auto p = planar(ctx, t);
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::hypot(p[i].x - p[(i + 1) % 3].x, p[i].y - p[(i + 1) % 3].y));
    }
    bool residual = sub.cover_residual && *sub.cover_residual == 0;

    // Independent sampling check: random points of lambda^N t lie in exactly
    // one emitted triangle or in the central tile.
    auto big = planar(ctx, scale_lambda(ctx, X1.center, consts.exponent()));
    std::vector<Vec2> C;
    for (auto& v : sub.central_vertices) C.push_back(ctx.planar(v));
    auto in_C = [&](Vec2 q) {
        for (std::size_t i = 0; i < C.size(); ++i)
            if (orient2d(C[i], C[(i + 1) % C.size()], q) <= 0) return false;
        return true;
    };
    std::vector<std::array<Vec2, 3>> tris;
    for (auto& t : sub.triangles) tris.push_back(planar(ctx, t));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    int bad = 0;
    const int samples = 400;
    for (int s = 0; s < samples; ++s) {
        double r1 = u(rng), r2 = u(rng);
        if (r1 + r2 > 1) r1 = 1 - r1, r2 = 1 - r2;
        Vec2 q{big[0].x + r1 * (big[1].x - big[0].x) + r2 * (big[2].x - big[0].x),
               big[0].y + r1 * (big[1].y - big[0].y) + r2 * (big[2].y - big[0].y)};
        int hits = in_C(q);
        for (auto& t : tris) {
            double lx = std::min({t[0].x, t[1].x, t[2].x}), hx = std::max({t[0].x, t[1].x, t[2].x});
            if (q.x < lx || q.x > hx) continue;
            hits += in_tri(t, q);
        }
        bad += hits != 1;
    }

    auto ov = overlap_agreement(ctx, consts, T0, X1, X2);
    bool pass = worst < bound && residual && bad == 0 && sub.central_offset && ov.pass && !ov.vacuous;
    char buf[300];
    std::snprintf(buf, sizeof buf,
                  "M=%d n=%d, %zu triangles, max edge %.3f < %.3f, residual %s, %d/%d bad samples, overlap %zu compared "
                  "%zu mismatched",
                  consts.M, consts.n, sub.triangles.size(), worst, bound,
                  sub.cover_residual ? sub.cover_residual->get_str().c_str() : "none", bad, samples, ov.compared,
                  ov.mismatched);
    return {pass, buf};
}

Outcome c8() {
    auto ctx = FieldContext::build(IntPolynomial({1, 2, -1, 1}));
    auto T0 = build_T0(ctx);
    auto consts = compute_constants(ctx, T0, triangulate_annulus(ctx, T0));
    std::array<FieldElement, 3> t{FieldElement::from_ints({0, 0, 0}), FieldElement::from_ints({1, 0, 0}),
                                  FieldElement::from_ints({0, 1, 0})};
    double b = bilipschitz_constant(ctx, t, consts.n);
    // Unscaled value for contrast; the bound is not vacuous.
    double b0 = bilipschitz_constant(ctx, t, 0);
    return {b < 1.5, fmt("n=%g, bilipschitz %.6f (%.4f at n=0)", consts.n, b, b0)};
}

Outcome c9() {
    auto pen = FieldContext::build(IntPolynomial({1, -2, 4, -3, 1}));
    auto z5 = cyclotomic_in_field(pen, 5);
    bool five = z5 && *z5 == FieldElement::from_ints({-1, 1, 0, 0});
    auto gold = FieldContext::build(IntPolynomial({-1, -1, 1}));
    bool four = !cyclotomic_in_field(gold, 4).has_value();
    bool two = true;
    for (auto c : {std::vector<std::int64_t>{-1, -1, 1}, {2, -2, 1}, {1, 2, -1, 1}, {1, -2, 4, -3, 1}}) {
        auto ctx = FieldContext::build(IntPolynomial(c));
        auto z = cyclotomic_in_field(ctx, 2);
        std::vector<std::int64_t> want(c.size() - 1, 0);
        want[0] = -1;
        two = two && z && *z == FieldElement::from_ints(want);
    }
    return {five && four && two, fmt("zeta5 = lambda-1: %g, m=4 absent for golden: %g, m=2: %g", five, four, two)};
}

Outcome c10() {
    std::mt19937_64 rng(1010);
    int found = 0, ok = 0, tried = 0;
    while (found < 50 && tried < 200000) {
        ++tried;
        Endomorphism phi{3, {}};
        for (int i = 0; i < 3; ++i) {
            Word w;
            while (w.empty()) w = random_word(rng, 3, 5);
            phi.images.push_back(w);
        }
        SubdivisionData s;
        try {
            s = endo_subdivision(phi);
        } catch (const NegativeExponentError&) {
            continue;
        }
        ++found;
        ok += lambda2_matrix(phi).matrix == s.matrix;
    }
    return {found == 50 && ok == 50, fmt("%g/%g agree (%g candidates drawn)", ok, found, tried)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit;  // seconds
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all{
        {"1 subdivision matrix of std(3;1,2,1)", 1, c1},
        {"2 spectral consistency", 1, c2},
        {"3 area scaling on commutator words", 10, c3},
        {"4 decomposition round trip", 30, c4},
        {"5 boundary convergence", 120, c5},
        {"6 Delaunay vs brute force", 60, c6},
        {"7 lattice construction for 1+i", 300, c7},
        {"8 flatness for the cubic", 10, c8},
        {"9 cyclotomic membership", 10, c9},
        {"10 exterior square vs factor counts", 60, c10},
    };
    int failed = 0;
    for (auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = dt < c.limit;
        bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s  %-40s %8.2fs (limit %gs)  %s%s\n", pass ? "PASS" : "FAIL", c.name, dt, c.limit,
                    o.detail.c_str(), in_time ? "" : "  [over time limit]");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed;
}

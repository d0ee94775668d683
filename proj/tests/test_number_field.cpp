#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

#include "selfsim/errors.hpp"
#include "selfsim/number_field.hpp"

using namespace selfsim;

namespace {

// Oracle: eigenvalues of the companion matrix via Eigen's QR algorithm.
std::vector<Complex> companion_roots(const IntPolynomial& p) {
    const int d = p.degree();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k + 1 < d; ++k) c(k + 1, k) = 1;
    for (int i = 0; i < d; ++i) c(i, d - 1) = -static_cast<double>(p.coeffs[i]);
    Eigen::EigenSolver<Eigen::MatrixXd> es(c);
    std::vector<Complex> out;
    for (int i = 0; i < d; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

double match_distance(std::vector<Complex> a, std::vector<Complex> b) {
    double worst = 0;
    for (auto z : a) {
        auto it = std::min_element(b.begin(), b.end(),
                                   [z](Complex u, Complex v) { return std::abs(u - z) < std::abs(v - z); });
        worst = std::max(worst, std::abs(*it - z));
        b.erase(it);
    }
    return worst;
}

const IntPolynomial kCubic{{1, 2, -1, 1}};
const IntPolynomial kGauss{{2, -2, 1}};
const IntPolynomial kGolden{{-1, -1, 1}};
const IntPolynomial kPenrose{{1, -2, 4, -3, 1}};

}  // namespace

TEST_CASE("roots of small polynomials") {
    auto r = find_roots(kGauss);
    REQUIRE(r.size() == 2);
    CHECK(r[0].value == Complex(1, 1));
    CHECK(r[1].value == Complex(1, -1));
    CHECK(r[0].error_radius == 0);

    auto g = find_roots(kGolden);
    CHECK(g[0].value.real() == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-15));
    CHECK(g[1].value.real() == doctest::Approx((1 - std::sqrt(5.0)) / 2).epsilon(1e-15));

    auto c = find_roots(kCubic);
    REQUIRE(c.size() == 3);
    CHECK(std::abs(c[0].value - Complex(0.696, 1.436)) < 5e-3);
    std::vector<Complex> mine;
    for (auto& e : c) mine.push_back(e.value);
    CHECK(match_distance(mine, companion_roots(kCubic)) < 1e-12);
}

TEST_CASE("roots agree with the companion-matrix oracle on random polynomials") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> coef(-5, 5), deg(3, 8);
    for (int trial = 0; trial < 60; ++trial) {
        int d = deg(rng);
        std::vector<std::int64_t> c(d + 1);
        for (int i = 0; i < d; ++i) c[i] = coef(rng);
        c[d] = 1;
        if (c[0] == 0) c[0] = 1;
        IntPolynomial p(c);
        auto q = to_rat(p);
        if (degree(gcd(q, derivative(q))) > 0) continue;
        auto roots = find_roots(p);
        std::vector<Complex> mine;
        for (auto& e : roots) {
            mine.push_back(e.value);
            CHECK(e.error_radius < 1e-10);
        }
        CHECK(match_distance(mine, companion_roots(p)) < 1e-7);
        for (std::size_t i = 1; i < roots.size(); ++i)
            CHECK(std::abs(roots[i - 1].value) >= std::abs(roots[i].value));
    }
}

TEST_CASE("irreducibility") {
    CHECK(is_irreducible(kCubic));
    CHECK(is_irreducible(kPenrose));
    CHECK_FALSE(is_irreducible(IntPolynomial({-1, 0, 1})));         // (x-1)(x+1)
    CHECK_FALSE(is_irreducible(IntPolynomial({1, 0, 2, 0, 1})));    // (x^2+1)^2
    CHECK_FALSE(is_irreducible(IntPolynomial({2, 0, 3, 0, 1})));    // (x^2+1)(x^2+2)
    CHECK(is_irreducible(IntPolynomial({-2, 0, 0, 0, 1})));
    CHECK_FALSE(is_irreducible(IntPolynomial({4, 0, 0, 0, 1})));    // (x^2+2x+2)(x^2-2x+2)
}

TEST_CASE("Perron classification") {
    CHECK(classify_perron(kCubic) == PerronClass::ComplexPerron);
    CHECK(classify_perron(kGauss) == PerronClass::ComplexPerron);
    CHECK(classify_perron(kGolden) == PerronClass::RealPerron);
    CHECK(classify_perron(IntPolynomial({-2, 0, 1})) == PerronClass::NotPerron);
    CHECK(classify_perron(IntPolynomial({1, 0, 1})) == PerronClass::NotPerron);
    CHECK(classify_perron(IntPolynomial({-1, 0, 1})) == PerronClass::NotAlgebraicallyValid);
    CHECK(classify_perron(IntPolynomial({1, 2})) == PerronClass::NotAlgebraicallyValid);
    CHECK(classify_perron(IntPolynomial({-3, 1})) == PerronClass::RealPerron);
    CHECK_THROWS_AS(FieldContext::build(IntPolynomial({-2, 0, 1})), NotPerronError);
}

TEST_CASE("field context shapes") {
    auto g = FieldContext::build(kGauss);
    CHECK(g.embed_dim() == 2);
    CHECK(g.vertical_projector().isZero());
    CHECK(g.lambda() == Complex(1, 1));

    auto c = FieldContext::build(kCubic);
    CHECK(c.embed_dim() == 3);
    CHECK(c.vertical_indices() == std::vector<int>{2});
    CHECK(c.invariant_residual() < 1e-12);

    auto r = FieldContext::build(kGolden);
    CHECK(r.is_real_lambda());
    CHECK(r.embed_dim() == 4);
    CHECK(r.coeff_dim() == 4);
    Vec2 p = r.planar(LatticeCoords{1, 0, 0, 0});
    CHECK(p.x == 1);
    CHECK(p.y == 0);
}

TEST_CASE("embedding and projection") {
    auto g = FieldContext::build(kGauss);
    auto e = g.sigma(FieldElement::from_ints({0, 1}));
    Vec2 p = g.pi_project(e);
    CHECK(p.x == doctest::Approx(1));
    CHECK(p.y == doctest::Approx(1));
    CHECK(g.vertical_norm(LatticeCoords{5, -7}) == 0);

    auto c = FieldContext::build(kCubic);
    CHECK(c.vertical_norm(LatticeCoords{1, 0, 0}) == doctest::Approx(1));
    // The real root of q, from the oracle.
    double real_root = 0;
    for (auto z : companion_roots(kCubic))
        if (std::fabs(z.imag()) < 1e-9) real_root = z.real();
    CHECK(c.vertical_norm(LatticeCoords{0, 1, 0}) == doctest::Approx(std::fabs(real_root)).epsilon(1e-12));
    CHECK(std::fabs(real_root) == doctest::Approx(0.3928).epsilon(1e-3));
}

TEST_CASE("multiplication by lambda") {
    auto c = FieldContext::build(kCubic);
    CHECK(c.mul_lambda(LatticeCoords{0, 0, 1}) == LatticeCoords{-1, -2, 1});
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coef(-9, 9);
    for (auto* ctx : {&c}) {
        for (int t = 0; t < 50; ++t) {
            LatticeCoords x(ctx->coeff_dim());
            for (auto& v : x) v = coef(rng);
            // pi(sigma(lambda x)) = lambda * pi(sigma(x)) and sigma(lambda x) = m_lambda sigma(x).
            Vec2 a = ctx->planar(ctx->mul_lambda(x));
            Complex b = ctx->lambda() * Complex(ctx->planar(x).x, ctx->planar(x).y);
            CHECK(std::abs(Complex(a.x, a.y) - b) < 1e-9);
            Eigen::VectorXd lhs = ctx->sigma(ctx->mul_lambda(x));
            Eigen::VectorXd rhs = ctx->m_lambda() * ctx->sigma(x);
            CHECK((lhs - rhs).norm() < 1e-9);
            auto fx = FieldElement::from_ints(x);
            CHECK(ctx->mul_lambda(fx) == FieldElement::from_ints(ctx->mul_lambda(x)));
        }
    }
    auto r = FieldContext::build(kGolden);
    auto y = r.mul_lambda(LatticeCoords{0, 1, 1, 0});
    CHECK(y == LatticeCoords{1, 1, 0, 1});
    Eigen::VectorXd lhs = r.sigma(y), rhs = r.m_lambda() * r.sigma(LatticeCoords{0, 1, 1, 0});
    CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("bilipschitz constant") {
    auto g = FieldContext::build(kGauss);
    std::array<LatticeCoords, 3> t{LatticeCoords{0, 0}, LatticeCoords{3, 1}, LatticeCoords{-2, 5}};
    CHECK(bilipschitz_constant(g, t, 0) == doctest::Approx(1.0));
    CHECK(bilipschitz_constant(g, t, 7) == doctest::Approx(1.0));

    auto c = FieldContext::build(kCubic);
    std::array<LatticeCoords, 3> u{LatticeCoords{0, 0, 0}, LatticeCoords{1, 0, 0}, LatticeCoords{0, 1, 0}};
    double prev = bilipschitz_constant(c, u, 0);
    CHECK(prev > 1.0);
    for (int n = 1; n <= 8; ++n) {
        double cur = bilipschitz_constant(c, u, n);
        CHECK(cur >= 1.0);
        CHECK(cur < prev + 1e-12);
        prev = cur;
    }
    CHECK(prev < 1.0 + 1e-2);
    std::array<LatticeCoords, 3> flat{LatticeCoords{0, 0, 0}, LatticeCoords{1, 0, 0}, LatticeCoords{2, 0, 0}};
    CHECK_THROWS_AS(bilipschitz_constant(c, flat, 0), DegenerateError);
}

TEST_CASE("covering radius bound") {
    auto g = FieldContext::build(kGauss);
    double b = covering_radius_bound(g);
    CHECK(b >= std::sqrt(2.0) / 2 - 1e-12);
    CHECK(b <= 1.0);
    auto r = FieldContext::build(kGolden);
    double rb = covering_radius_bound(r);
    CHECK(std::isfinite(rb));
    CHECK(rb > 0);
}

TEST_CASE("cyclotomic membership") {
    auto p = FieldContext::build(kPenrose);
    auto z5 = cyclotomic_in_field(p, 5);
    REQUIRE(z5);
    CHECK(*z5 == FieldElement::from_ints({-1, 1, 0, 0}));
    auto z10 = cyclotomic_in_field(p, 10);
    REQUIRE(z10);
    CHECK(satisfies_cyclotomic(p, *z10, 10));
    CHECK_FALSE(cyclotomic_in_field(p, 4));

    auto golden = FieldContext::build(kGolden);
    CHECK_FALSE(cyclotomic_in_field(golden, 4));
    CHECK(*cyclotomic_in_field(golden, 2) == FieldElement::from_ints({-1, 0}));

    auto g = FieldContext::build(kGauss);
    CHECK(*cyclotomic_in_field(g, 4) == FieldElement::from_ints({-1, 1}));
    CHECK_FALSE(cyclotomic_in_field(g, 5));
    CHECK(*cyclotomic_in_field(FieldContext::build(kCubic), 2) == FieldElement::from_ints({-1, 0, 0}));
}

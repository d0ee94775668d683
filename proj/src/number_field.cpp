#include "selfsim/number_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "selfsim/errors.hpp"
#include "selfsim/lll.hpp"

namespace selfsim {

namespace {

using LComplex = std::complex<long double>;

LComplex horner(const IntPolynomial& p, LComplex z) {
    LComplex acc = 0;
    for (int k = p.degree(); k >= 0; --k) acc = acc * z + static_cast<long double>(p.coeffs[k]);
    return acc;
}

LComplex horner_derivative(const IntPolynomial& p, LComplex z) {
    LComplex acc = 0;
    for (int k = p.degree(); k >= 1; --k) acc = acc * z + static_cast<long double>(p.coeffs[k]) * static_cast<long double>(k);
    return acc;
}

double inclusion_radius(const IntPolynomial& p, LComplex z) {
    LComplex v = horner(p, z);
    if (v == LComplex(0)) return 0;
    LComplex dv = horner_derivative(p, z);
    if (dv == LComplex(0)) return std::numeric_limits<double>::infinity();
    return static_cast<double>(static_cast<long double>(p.degree()) * std::abs(v / dv));
}

std::vector<LComplex> aberth(const IntPolynomial& p, int max_iter, bool& converged) {
    const int d = p.degree();
    long double bound = 0;
    for (int k = 0; k < d; ++k)
        bound = std::max(bound, std::pow(std::fabs(static_cast<long double>(p.coeffs[k])), 1.0L / (d - k)));
    long double radius = std::max<long double>(1.0L, bound);
    std::vector<LComplex> z(d);
    for (int k = 0; k < d; ++k) {
        long double ang = 2.0L * std::numbers::pi_v<long double> * k / d + 0.4L;
        z[k] = std::polar(radius * (1.0L + 0.01L * k / d), ang);
    }
    converged = false;
    for (int it = 0; it < max_iter; ++it) {
        long double worst = 0;
        for (int k = 0; k < d; ++k) {
            LComplex v = horner(p, z[k]);
            LComplex dv = horner_derivative(p, z[k]);
            if (v == LComplex(0)) continue;
            LComplex ratio = dv == LComplex(0) ? LComplex(1e-3L) : v / dv;
            LComplex s = 0;
            for (int j = 0; j < d; ++j)
                if (j != k) s += 1.0L / (z[k] - z[j]);
            LComplex step = ratio / (1.0L - ratio * s);
            z[k] -= step;
            worst = std::max(worst, std::abs(step) / std::max<long double>(1.0L, std::abs(z[k])));
        }
        if (worst < 1e-17L) {
            converged = true;
            break;
        }
    }
    // Newton polish.
    for (auto& root : z)
        for (int i = 0; i < 3; ++i) {
            LComplex dv = horner_derivative(p, root);
            if (dv == LComplex(0)) break;
            root -= horner(p, root) / dv;
        }
    return z;
}

}  // namespace

std::vector<RootEstimate> find_roots(const IntPolynomial& poly, double tol, int max_iter) {
    if (!poly.is_monic() || poly.degree() < 1) throw std::invalid_argument("find_roots needs a monic polynomial of degree >= 1");
    const int d = poly.degree();
    std::vector<RootEstimate> out;
    if (d == 1) {
        out.push_back({Complex(static_cast<double>(-poly.coeffs[0]), 0.0), 0.0});
        return out;
    }
    if (d == 2) {
        const auto b = poly.coeffs[1], c = poly.coeffs[0];
        const long double disc = static_cast<long double>(b) * b - 4.0L * static_cast<long double>(c);
        if (disc >= 0) {
            long double s = std::sqrt(disc);
            // Stable pair: q = -(b + sign(b) s)/2, roots q and c/q.
            long double q = -0.5L * (static_cast<long double>(b) + (b >= 0 ? s : -s));
            long double r1 = q, r2 = q != 0 ? static_cast<long double>(c) / q : 0.0L;
            if (r1 < r2) std::swap(r1, r2);
            out.push_back({Complex(static_cast<double>(r1), 0.0), inclusion_radius(poly, r1)});
            out.push_back({Complex(static_cast<double>(r2), 0.0), inclusion_radius(poly, r2)});
        } else {
            long double re = -0.5L * static_cast<long double>(b);
            long double im = 0.5L * std::sqrt(-disc);
            Complex z(static_cast<double>(re), static_cast<double>(im));
            double rad = inclusion_radius(poly, LComplex(re, im));
            out.push_back({z, rad});
            out.push_back({std::conj(z), rad});
        }
        return out;
    }
    bool converged = false;
    auto z = aberth(poly, max_iter, converged);
    std::vector<double> radii(d);
    for (int k = 0; k < d; ++k) radii[k] = inclusion_radius(poly, z[k]);
    double worst = *std::max_element(radii.begin(), radii.end());
    if (!converged && worst >= tol) {
        std::ostringstream os;
        os << "root finding did not converge for " << format_polynomial(poly) << "; inclusion radii:";
        for (auto r : radii) os << ' ' << r;
        throw ConvergenceError(os.str());
    }
    if (worst >= tol) {
        std::ostringstream os;
        os << "root error radii exceed tolerance " << tol << " for " << format_polynomial(poly) << ":";
        for (auto r : radii) os << ' ' << r;
        throw ConvergenceError(os.str());
    }
    // Snap near-real roots onto the axis and make conjugate pairs exact.
    std::vector<bool> used(d, false);
    for (int k = 0; k < d; ++k) {
        if (used[k]) continue;
        if (std::fabs(static_cast<double>(z[k].imag())) <= radii[k]) {
            out.push_back({Complex(static_cast<double>(z[k].real()), 0.0), radii[k]});
            used[k] = true;
            continue;
        }
        int best = -1;
        long double best_dist = 0;
        for (int j = 0; j < d; ++j) {
            if (used[j] || j == k) continue;
            long double dist = std::abs(z[j] - std::conj(z[k]));
            if (best < 0 || dist < best_dist) {
                best = j;
                best_dist = dist;
            }
        }
        if (best < 0) throw ConvergenceError("unpaired complex root for " + format_polynomial(poly));
        LComplex avg = 0.5L * (z[k] + std::conj(z[best]));
        if (avg.imag() < 0) avg = std::conj(avg);
        double rad = std::max(radii[k], radii[best]) + static_cast<double>(best_dist);
        Complex zc(static_cast<double>(avg.real()), static_cast<double>(avg.imag()));
        out.push_back({zc, rad});
        out.push_back({std::conj(zc), rad});
        used[k] = used[best] = true;
    }
    std::stable_sort(out.begin(), out.end(), [](const RootEstimate& a, const RootEstimate& b) {
        double ma = std::abs(a.value), mb = std::abs(b.value);
        if (ma != mb) return ma > mb;
        return a.value.imag() > b.value.imag();
    });
    return out;
}

bool is_irreducible(const IntPolynomial& poly) {
    const int d = poly.degree();
    if (d < 1) return false;
    if (d == 1) return true;
    auto q = to_rat(poly);
    if (degree(gcd(q, derivative(q))) > 0) return false;
    if (!poly.is_monic()) throw std::invalid_argument("irreducibility test expects a monic polynomial");
    if (d > 24) throw ResourceError("irreducibility test limited to degree <= 24");
    auto roots = find_roots(poly, 1e-6);
    std::vector<LComplex> z;
    for (auto& r : roots) z.emplace_back(r.value.real(), r.value.imag());
    std::vector<int> pick;
    for (int k = 1; k <= d / 2; ++k) {
        pick.assign(k, 0);
        for (int i = 0; i < k; ++i) pick[i] = i;
        while (true) {
            std::vector<LComplex> prod{1.0L};
            for (int idx : pick) {
                std::vector<LComplex> next(prod.size() + 1, 0.0L);
                for (std::size_t i = 0; i < prod.size(); ++i) {
                    next[i + 1] += prod[i];
                    next[i] -= prod[i] * z[idx];
                }
                prod = std::move(next);
            }
            bool integral = true;
            std::vector<std::int64_t> coeffs;
            for (auto& c : prod) {
                long double re = std::round(c.real());
                long double tol = 1e-6L * std::max<long double>(1.0L, std::fabs(c.real()));
                if (std::fabs(c.imag()) > tol || std::fabs(c.real() - re) > tol || std::fabs(re) > 9e15L) {
                    integral = false;
                    break;
                }
                coeffs.push_back(static_cast<std::int64_t>(re));
            }
            if (integral && exact_divide(poly, IntPolynomial(coeffs))) return false;
            int i = k - 1;
            while (i >= 0 && pick[i] == d - k + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    return true;
}

std::string to_string(PerronClass c) {
    switch (c) {
        case PerronClass::NotAlgebraicallyValid: return "NotAlgebraicallyValid";
        case PerronClass::NotPerron: return "NotPerron";
        case PerronClass::RealPerron: return "RealPerron";
        case PerronClass::ComplexPerron: return "ComplexPerron";
    }
    return "unknown";
}

PerronClass classify_perron(const IntPolynomial& poly) {
    if (poly.degree() < 1 || !poly.is_monic()) return PerronClass::NotAlgebraicallyValid;
    if (!is_irreducible(poly)) return PerronClass::NotAlgebraicallyValid;
    auto roots = find_roots(poly);
    const auto& top = roots.front();
    const double m = std::abs(top.value);
    if (m <= 1.0 + 1e-12) return PerronClass::NotPerron;
    const double tie = 1e-9 * m;
    int close = 0;
    for (auto& r : roots)
        if (std::abs(r.value) >= m - tie) ++close;
    if (top.value.imag() == 0) return close == 1 ? PerronClass::RealPerron : PerronClass::NotPerron;
    return close == 2 ? PerronClass::ComplexPerron : PerronClass::NotPerron;
}

FieldElement FieldElement::from_ints(const std::vector<std::int64_t>& c) {
    FieldElement e;
    for (auto v : c) e.coeffs.emplace_back(static_cast<long>(v));
    return e;
}

bool FieldElement::is_integral() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const mpq_class& q) { return q.get_den() == 1; });
}

std::vector<std::int64_t> FieldElement::to_ints() const {
    std::vector<std::int64_t> out;
    for (auto& q : coeffs) {
        if (q.get_den() != 1 || !q.get_num().fits_slong_p())
            throw std::domain_error("field element is not a lattice point");
        out.push_back(q.get_num().get_si());
    }
    return out;
}

FieldContext FieldContext::build(const IntPolynomial& poly) {
    auto cls = classify_perron(poly);
    if (cls != PerronClass::ComplexPerron && cls != PerronClass::RealPerron)
        throw NotPerronError(format_polynomial(poly) + " is " + to_string(cls));
    FieldContext ctx;
    ctx.poly_ = poly;
    ctx.poly_.irreducible = true;
    ctx.d_ = poly.degree();
    ctx.roots_ = find_roots(poly);
    const int d = ctx.d_;
    // Designated root: max modulus, nonnegative imaginary part (roots are sorted so).
    ctx.lambda_index_ = 0;
    for (int i = 0; i < d; ++i)
        if (std::abs(ctx.roots_[i].value) >= std::abs(ctx.roots_[0].value) * (1 - 1e-12) &&
            ctx.roots_[i].value.imag() >= 0) {
            ctx.lambda_index_ = i;
            break;
        }
    const Complex lam = ctx.lambda();
    ctx.real_lambda_ = lam.imag() == 0;
    ctx.r_ = 0;
    for (auto& r : ctx.roots_)
        if (r.value.imag() == 0) ++ctx.r_;
    ctx.c_ = (d - ctx.r_) / 2;

    // Embedding order: designated, other complex (upper half plane), other real.
    std::vector<Complex> embeddings{lam};
    for (int i = 0; i < d; ++i) {
        if (i == ctx.lambda_index_) continue;
        auto z = ctx.roots_[i].value;
        if (z.imag() > 0 && !(std::abs(z - lam) == 0)) embeddings.push_back(z);
    }
    for (int i = 0; i < d; ++i) {
        if (i == ctx.lambda_index_) continue;
        auto z = ctx.roots_[i].value;
        if (z.imag() == 0) embeddings.push_back(z);
    }
    ctx.rho_ = 0;
    for (std::size_t k = 1; k < embeddings.size(); ++k) ctx.rho_ = std::max(ctx.rho_, std::abs(embeddings[k]));

    Eigen::MatrixXd S(d, d);
    Eigen::MatrixXd Mblock = Eigen::MatrixXd::Zero(d, d);
    int row = 0;
    for (auto z : embeddings) {
        Complex pw = 1;
        if (z.imag() != 0) {
            for (int k = 0; k < d; ++k, pw *= z) {
                S(row, k) = pw.real();
                S(row + 1, k) = pw.imag();
            }
            Mblock(row, row) = z.real();
            Mblock(row, row + 1) = -z.imag();
            Mblock(row + 1, row) = z.imag();
            Mblock(row + 1, row + 1) = z.real();
            row += 2;
        } else {
            for (int k = 0; k < d; ++k, pw *= z) S(row, k) = pw.real();
            Mblock(row, row) = z.real();
            row += 1;
        }
    }
    if (!ctx.real_lambda_) {
        ctx.sigma_ = S;
        ctx.m_lambda_ = Mblock;
        ctx.vertical_ = Eigen::MatrixXd::Identity(d, d);
        ctx.vertical_(0, 0) = ctx.vertical_(1, 1) = 0;
        for (int i = 2; i < d; ++i) ctx.vertical_idx_.push_back(i);
    } else {
        ctx.sigma_ = Eigen::MatrixXd::Zero(2 * d, 2 * d);
        ctx.sigma_.topLeftCorner(d, d) = S;
        ctx.sigma_.bottomRightCorner(d, d) = S;
        ctx.m_lambda_ = Eigen::MatrixXd::Zero(2 * d, 2 * d);
        ctx.m_lambda_.topLeftCorner(d, d) = Mblock;
        ctx.m_lambda_.bottomRightCorner(d, d) = Mblock;
        ctx.vertical_ = Eigen::MatrixXd::Identity(2 * d, 2 * d);
        ctx.vertical_(0, 0) = ctx.vertical_(d, d) = 0;
        for (int i = 1; i < 2 * d; ++i)
            if (i != d) ctx.vertical_idx_.push_back(i);
    }
    ctx.sigma_inv_ = ctx.sigma_.inverse();

    ctx.companion_.assign(d, std::vector<std::int64_t>(d, 0));
    for (int k = 0; k + 1 < d; ++k) ctx.companion_[k + 1][k] = 1;
    for (int i = 0; i < d; ++i) ctx.companion_[i][d - 1] = -poly.coeffs[i];

    ctx.lambda_powers_.resize(d);
    Complex pw = 1;
    for (int k = 0; k < d; ++k, pw *= lam) ctx.lambda_powers_[k] = pw;
    return ctx;
}

std::array<Eigen::VectorXd, 2> FieldContext::v_lambda_basis() const {
    const int D = embed_dim();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(D), b = Eigen::VectorXd::Zero(D);
    a(0) = 1;
    b(real_lambda_ ? d_ : 1) = 1;
    return {a, b};
}

void FieldContext::check_dim(std::size_t n) const {
    if (static_cast<int>(n) != coeff_dim())
        throw DimensionError("element has " + std::to_string(n) + " coefficients, context expects " +
                             std::to_string(coeff_dim()));
}

EmbeddedPoint FieldContext::sigma(const FieldElement& x) const {
    check_dim(x.coeffs.size());
    Eigen::VectorXd c(coeff_dim());
    for (int i = 0; i < coeff_dim(); ++i) c(i) = x.coeffs[i].get_d();
    Eigen::VectorXd w = sigma_ * c;
    return {std::vector<double>(w.data(), w.data() + w.size()), x};
}

Eigen::VectorXd FieldContext::sigma(const LatticeCoords& x) const {
    check_dim(x.size());
    Eigen::VectorXd c(coeff_dim());
    for (int i = 0; i < coeff_dim(); ++i) c(i) = static_cast<double>(x[i]);
    return sigma_ * c;
}

Vec2 FieldContext::pi_project(const EmbeddedPoint& p) const {
    if (static_cast<int>(p.coords.size()) != embed_dim()) throw DimensionError("point dimension mismatch");
    return {p.coords[0], p.coords[real_lambda_ ? d_ : 1]};
}

Vec2 FieldContext::pi_project(const Eigen::VectorXd& p) const {
    if (p.size() != embed_dim()) throw DimensionError("point dimension mismatch");
    return {p(0), p(real_lambda_ ? d_ : 1)};
}

Vec2 FieldContext::planar(const LatticeCoords& x) const {
    check_dim(x.size());
    if (!real_lambda_) {
        Complex s = 0;
        for (int k = 0; k < d_; ++k) s += static_cast<double>(x[k]) * lambda_powers_[k];
        return {s.real(), s.imag()};
    }
    double sx = 0, sy = 0;
    for (int k = 0; k < d_; ++k) {
        sx += static_cast<double>(x[k]) * lambda_powers_[k].real();
        sy += static_cast<double>(x[d_ + k]) * lambda_powers_[k].real();
    }
    return {sx, sy};
}

Vec2 FieldContext::planar(const FieldElement& x) const {
    check_dim(x.coeffs.size());
    if (!real_lambda_) {
        Complex s = 0;
        for (int k = 0; k < d_; ++k) s += x.coeffs[k].get_d() * lambda_powers_[k];
        return {s.real(), s.imag()};
    }
    double sx = 0, sy = 0;
    for (int k = 0; k < d_; ++k) {
        sx += x.coeffs[k].get_d() * lambda_powers_[k].real();
        sy += x.coeffs[d_ + k].get_d() * lambda_powers_[k].real();
    }
    return {sx, sy};
}

FieldElement FieldContext::mul_lambda(const FieldElement& x) const {
    check_dim(x.coeffs.size());
    FieldElement out;
    out.coeffs.resize(x.coeffs.size());
    const int blocks = real_lambda_ ? 2 : 1;
    for (int b = 0; b < blocks; ++b) {
        const int o = b * d_;
        mpq_class top = x.coeffs[o + d_ - 1];
        for (int k = d_ - 1; k >= 0; --k) {
            mpq_class v = k > 0 ? x.coeffs[o + k - 1] : mpq_class(0);
            v -= top * static_cast<long>(poly_.coeffs[k]);
            out.coeffs[o + k] = v;
        }
    }
    return out;
}

LatticeCoords FieldContext::mul_lambda(const LatticeCoords& x) const {
    check_dim(x.size());
    LatticeCoords out(x.size());
    const int blocks = real_lambda_ ? 2 : 1;
    for (int b = 0; b < blocks; ++b) {
        const int o = b * d_;
        const auto top = x[o + d_ - 1];
        for (int k = d_ - 1; k >= 0; --k) out[o + k] = (k > 0 ? x[o + k - 1] : 0) - top * poly_.coeffs[k];
    }
    return out;
}

LatticeCoords FieldContext::mul_lambda_pow(LatticeCoords x, int n) const {
    for (int i = 0; i < n; ++i) x = mul_lambda(x);
    return x;
}

FieldElement FieldContext::multiply(const FieldElement& s, const FieldElement& x) const {
    if (static_cast<int>(s.coeffs.size()) != d_) throw DimensionError("scalar must have d coefficients");
    check_dim(x.coeffs.size());
    auto q = to_rat(poly_);
    FieldElement out;
    const int blocks = real_lambda_ ? 2 : 1;
    for (int b = 0; b < blocks; ++b) {
        RatPoly xs(x.coeffs.begin() + b * d_, x.coeffs.begin() + (b + 1) * d_);
        RatPoly ss = s.coeffs;
        trim(xs);
        trim(ss);
        auto prod = mod(mul(ss, xs), q);
        prod.resize(d_);
        out.coeffs.insert(out.coeffs.end(), prod.begin(), prod.end());
    }
    return out;
}

Eigen::VectorXd FieldContext::vertical_part(const Eigen::VectorXd& w) const {
    Eigen::VectorXd v(vertical_idx_.size());
    for (std::size_t i = 0; i < vertical_idx_.size(); ++i) v(i) = w(vertical_idx_[i]);
    return v;
}

double FieldContext::vertical_norm(const FieldElement& x) const {
    auto e = sigma(x);
    Eigen::Map<const Eigen::VectorXd> w(e.coords.data(), e.coords.size());
    return vertical_part(w).norm();
}

double FieldContext::vertical_norm(const LatticeCoords& x) const { return vertical_part(sigma(x)).norm(); }

double FieldContext::invariant_residual() const {
    double worst = 0;
    if (r_ + 2 * c_ != d_) return std::numeric_limits<double>::infinity();
    const int D = coeff_dim();
    LatticeCoords one(D, 0), lam(D, 0);
    one[0] = 1;
    if (d_ > 1) lam[1] = 1;
    else lam[0] = -poly_.coeffs[0];
    Eigen::VectorXd lhs = sigma(lam);
    Eigen::VectorXd rhs = m_lambda_ * sigma(one);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    return worst;
}

namespace {

std::array<Eigen::VectorXd, 2> scaled_edges(const FieldContext& ctx, const Eigen::VectorXd& e1,
                                            const Eigen::VectorXd& e2, int n) {
    // (m_lambda / |lambda|)^n by repeated squaring.
    const int D = ctx.embed_dim();
    Eigen::MatrixXd base = ctx.m_lambda() / ctx.lambda_abs();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(D, D);
    int k = n;
    while (k > 0) {
        if (k & 1) acc = acc * base;
        base = base * base;
        k >>= 1;
    }
    return {acc * e1, acc * e2};
}

double bilipschitz_from_embedded(const FieldContext& ctx, const Eigen::VectorXd& w1, const Eigen::VectorXd& w2,
                                 int n) {
    auto [a1, a2] = scaled_edges(ctx, w1, w2, n);
    Eigen::MatrixXd A(a1.size(), 2);
    A.col(0) = a1;
    A.col(1) = a2;
    Vec2 p1 = ctx.pi_project(a1), p2 = ctx.pi_project(a2);
    Eigen::Matrix2d P;
    P << p1.x, p2.x, p1.y, p2.y;
    const double scale = A.colwise().norm().prod();
    if (!(std::fabs(P.determinant()) > 1e-12 * scale)) throw DegenerateError("triangle is collinear in the plane");
    Eigen::Matrix2d G = A.transpose() * A;
    Eigen::Matrix2d H = P.transpose() * P;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(H, G);
    auto mu = es.eigenvalues();
    double smin = std::sqrt(std::max(mu.minCoeff(), 0.0));
    double smax = std::sqrt(std::max(mu.maxCoeff(), 0.0));
    if (smin <= 0) throw DegenerateError("projection collapses the triangle");
    return std::max({1.0, smax, 1.0 / smin});
}

}  // namespace

double bilipschitz_constant(const FieldContext& ctx, const std::array<FieldElement, 3>& t, int n) {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    auto s0 = ctx.sigma(t[0]), s1 = ctx.sigma(t[1]), s2 = ctx.sigma(t[2]);
    const int D = ctx.embed_dim();
    Eigen::VectorXd w1(D), w2(D);
    for (int i = 0; i < D; ++i) {
        w1(i) = s1.coords[i] - s0.coords[i];
        w2(i) = s2.coords[i] - s0.coords[i];
    }
    return bilipschitz_from_embedded(ctx, w1, w2, n);
}

double bilipschitz_constant(const FieldContext& ctx, const std::array<LatticeCoords, 3>& t, int n) {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    Eigen::VectorXd s0 = ctx.sigma(t[0]);
    return bilipschitz_from_embedded(ctx, ctx.sigma(t[1]) - s0, ctx.sigma(t[2]) - s0, n);
}

double covering_radius_bound(const FieldContext& ctx) {
    const auto& S = ctx.sigma_matrix();
    std::vector<std::vector<long double>> basis(S.cols(), std::vector<long double>(S.rows()));
    for (int j = 0; j < S.cols(); ++j)
        for (int i = 0; i < S.rows(); ++i) basis[j][i] = S(i, j);
    lll_reduce(basis);
    long double total = 0;
    for (auto v : gram_schmidt_norms2(basis)) total += v;
    return static_cast<double>(0.5L * std::sqrt(total));
}

bool satisfies_cyclotomic(const FieldContext& ctx, const FieldElement& c, int m) {
    if (static_cast<int>(c.coeffs.size()) != ctx.degree()) throw DimensionError("expected d coefficients");
    auto q = to_rat(ctx.poly());
    RatPoly p = c.coeffs;
    trim(p);
    auto phi = to_rat(cyclotomic(m));
    RatPoly acc;
    for (int k = degree(phi); k >= 0; --k) {
        acc = mod(mul(acc, p), q);
        acc = add(acc, RatPoly{phi[k]});
    }
    return mod(acc, q).empty();
}

std::optional<FieldElement> cyclotomic_in_field(const FieldContext& ctx, int m) {
    if (m < 2) throw std::invalid_argument("m must be >= 2");
    const int d = ctx.degree();
    if (m == 2) {
        FieldElement e;
        e.coeffs.assign(d, 0);
        e.coeffs[0] = -1;
        return e;
    }
    if (ctx.is_real_lambda()) return std::nullopt;
    // deg Q(zeta_m) = phi(m) must divide d.
    int phi = 0;
    for (int k = 1; k <= m; ++k) phi += std::gcd(k, m) == 1;
    if (d % phi != 0) return std::nullopt;

    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const std::complex<long double> zeta = std::polar(1.0L, two_pi / m);
    std::vector<std::complex<long double>> xs;
    std::complex<long double> lam(ctx.lambda().real(), ctx.lambda().imag());
    std::complex<long double> pw = 1;
    for (int k = 0; k < d; ++k, pw *= lam) xs.push_back(pw);
    xs.push_back(zeta);
    const int n = d + 1;
    for (long double scale : {1e6L, 1e9L, 1e12L, 1e15L}) {
        std::vector<std::vector<long double>> basis(n, std::vector<long double>(n + 2, 0));
        for (int i = 0; i < n; ++i) {
            basis[i][i] = 1;
            basis[i][n] = scale * xs[i].real();
            basis[i][n + 1] = scale * xs[i].imag();
        }
        lll_reduce(basis);
        for (auto& row : basis) {
            long double lead = std::round(row[d]);
            if (lead == 0) continue;
            FieldElement cand;
            bool ok = true;
            for (int k = 0; k < d && ok; ++k) {
                long double v = std::round(row[k]);
                if (std::fabs(v) > 1e12L) ok = false;
                cand.coeffs.push_back(mpq_class(-static_cast<long>(v), static_cast<long>(lead)));
            }
            if (!ok) continue;
            for (auto& q : cand.coeffs) q.canonicalize();
            std::complex<long double> val = 0;
            for (int k = 0; k < d; ++k) val += static_cast<long double>(cand.coeffs[k].get_d()) * xs[k];
            if (std::abs(val - zeta) > 1e-8L) continue;
            if (satisfies_cyclotomic(ctx, cand, m)) return cand;
        }
    }
    return std::nullopt;
}

}  // namespace selfsim

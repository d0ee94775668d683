#include "selfsim/polynomial.hpp"

#include <charconv>
#include <sstream>

namespace selfsim {

IntPolynomial::IntPolynomial(std::vector<std::int64_t> c) : coeffs(std::move(c)) {
    while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
}

int IntPolynomial::degree() const {
    if (coeffs.empty() || (coeffs.size() == 1 && coeffs[0] == 0)) return -1;
    return static_cast<int>(coeffs.size()) - 1;
}

bool IntPolynomial::is_monic() const { return degree() >= 0 && coeffs.back() == 1; }

IntPolynomial parse_polynomial(std::string_view text) {
    std::vector<std::int64_t> c;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        auto tok = text.substr(pos, comma - pos);
        while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
            throw std::invalid_argument("bad polynomial coefficient '" + std::string(tok) + "'");
        c.push_back(v);
        pos = comma + 1;
    }
    IntPolynomial p(std::move(c));
    if (p.degree() < 1) throw std::invalid_argument("polynomial must have degree >= 1");
    return p;
}

std::string format_polynomial(const IntPolynomial& p) {
    std::ostringstream os;
    bool first = true;
    for (int k = p.degree(); k >= 0; --k) {
        auto c = p.coeffs[k];
        if (c == 0) continue;
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        auto a = c < 0 ? -c : c;
        if (a != 1 || k == 0) os << a;
        if (k >= 1) os << "x";
        if (k >= 2) os << "^" << k;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

RatPoly to_rat(const IntPolynomial& p) {
    RatPoly r;
    r.reserve(p.coeffs.size());
    for (auto c : p.coeffs) r.emplace_back(static_cast<long>(c));
    trim(r);
    return r;
}

void trim(RatPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const RatPoly& p) { return static_cast<int>(p.size()) - 1; }

RatPoly add(const RatPoly& a, const RatPoly& b) {
    RatPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

RatPoly sub(const RatPoly& a, const RatPoly& b) {
    RatPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

RatPoly mul(const RatPoly& a, const RatPoly& b) {
    if (a.empty() || b.empty()) return {};
    RatPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

RatPoly derivative(const RatPoly& p) {
    if (p.size() <= 1) return {};
    RatPoly r(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = p[i] * static_cast<long>(i);
    trim(r);
    return r;
}

std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b) {
    if (b.empty()) throw std::domain_error("polynomial division by zero");
    RatPoly rem = a;
    trim(rem);
    if (rem.size() < b.size()) return {{}, rem};
    RatPoly quo(rem.size() - b.size() + 1);
    const mpq_class& lead = b.back();
    for (int k = static_cast<int>(rem.size()) - static_cast<int>(b.size()); k >= 0; --k) {
        mpq_class c = rem[k + b.size() - 1] / lead;
        quo[k] = c;
        if (c == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) rem[k + j] -= c * b[j];
    }
    rem.resize(b.size() - 1);
    trim(rem);
    trim(quo);
    return {quo, rem};
}

RatPoly mod(const RatPoly& a, const RatPoly& b) { return divmod(a, b).second; }

RatPoly gcd(RatPoly a, RatPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        auto r = mod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        mpq_class lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

std::optional<IntPolynomial> exact_divide(const IntPolynomial& a, const IntPolynomial& b) {
    auto [q, r] = divmod(to_rat(a), to_rat(b));
    if (!r.empty()) return std::nullopt;
    std::vector<std::int64_t> out;
    for (auto& c : q) {
        if (c.get_den() != 1 || !c.get_num().fits_slong_p()) return std::nullopt;
        out.push_back(c.get_num().get_si());
    }
    if (out.empty()) out.push_back(0);
    return IntPolynomial(std::move(out));
}

IntPolynomial cyclotomic(int m) {
    if (m < 1) throw std::invalid_argument("cyclotomic index must be >= 1");
    RatPoly num(m + 1);
    num[0] = -1;
    num[m] = 1;
    for (int d = 1; d < m; ++d) {
        if (m % d != 0) continue;
        num = divmod(num, to_rat(cyclotomic(d))).first;
    }
    std::vector<std::int64_t> c;
    for (auto& q : num) c.push_back(q.get_num().get_si());
    return IntPolynomial(std::move(c));
}

IntPolynomial characteristic_polynomial(const std::vector<std::vector<std::int64_t>>& a) {
    const std::size_t n = a.size();
    for (auto& row : a)
        if (row.size() != n) throw std::invalid_argument("characteristic polynomial needs a square matrix");
    // Faddeev-LeVerrier: M_0 = 0, c_n = 1; M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k.
    using Mat = std::vector<std::vector<mpq_class>>;
    Mat A(n, std::vector<mpq_class>(n)), Mk(n, std::vector<mpq_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A[i][j] = static_cast<long>(a[i][j]);
    std::vector<mpq_class> c(n + 1);
    c[n] = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        Mat next(n, std::vector<mpq_class>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                mpq_class s = 0;
                for (std::size_t l = 0; l < n; ++l) s += A[i][l] * Mk[l][j];
                next[i][j] = s;
            }
        for (std::size_t i = 0; i < n; ++i) next[i][i] += c[n - k + 1];
        Mk = std::move(next);
        mpq_class tr = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) tr += A[i][l] * Mk[l][i];
        c[n - k] = -tr / static_cast<long>(k);
    }
    std::vector<std::int64_t> out;
    for (auto& q : c) out.push_back(q.get_num().get_si());
    return IntPolynomial(std::move(out));
}

}  // namespace selfsim

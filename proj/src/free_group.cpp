#include "selfsim/free_group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <span>
#include <stdexcept>

#include "json.hpp"

#include "selfsim/errors.hpp"
#include "selfsim/number_field.hpp"

namespace selfsim {

std::vector<Letter> reduce(std::vector<Letter> letters) {
    std::vector<Letter> out;
    out.reserve(letters.size());
    for (auto l : letters) {
        if (l.gen < 1 || (l.exp != 1 && l.exp != -1)) throw std::invalid_argument("bad letter");
        if (!out.empty() && out.back().gen == l.gen && out.back().exp == -l.exp)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

Word::Word(std::vector<Letter> letters) : letters_(reduce(std::move(letters))) {}

Word Word::generator(int gen, int power) {
    std::vector<Letter> l(static_cast<std::size_t>(std::abs(power)), Letter{gen, power >= 0 ? 1 : -1});
    return Word(std::move(l));
}

int Word::max_generator() const {
    int m = 0;
    for (auto l : letters_) m = std::max(m, l.gen);
    return m;
}

Word multiply(const Word& u, const Word& v) {
    std::vector<Letter> l = u.letters();
    l.insert(l.end(), v.letters().begin(), v.letters().end());
    return Word(std::move(l));
}

Word invert(const Word& w) {
    std::vector<Letter> l(w.letters().rbegin(), w.letters().rend());
    for (auto& x : l) x.exp = -x.exp;
    return Word(std::move(l));
}

Word conjugate(const Word& w, const Word& g) { return multiply(multiply(g, w), invert(g)); }

Word commutator(const Word& u, const Word& v) {
    return multiply(multiply(u, v), multiply(invert(u), invert(v)));
}

Word power(const Word& w, int k) {
    Word base = k >= 0 ? w : invert(w);
    Word out;
    for (int i = 0; i < std::abs(k); ++i) out = multiply(out, base);
    return out;
}

CyclicReduction cyclic_reduce(const Word& w) {
    const auto& l = w.letters();
    std::size_t k = 0;
    while (2 * k + 1 < l.size() && l[k].gen == l[l.size() - 1 - k].gen && l[k].exp == -l[l.size() - 1 - k].exp) ++k;
    CyclicReduction r;
    r.conjugator = Word(std::vector<Letter>(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(k)));
    r.core = Word(std::vector<Letter>(l.begin() + static_cast<std::ptrdiff_t>(k), l.end() - static_cast<std::ptrdiff_t>(k)));
    return r;
}

Word parse_word(std::string_view text) {
    std::vector<Letter> letters;
    std::size_t i = 0;
    auto skip_space = [&]() {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_space();
    if (text.substr(i) == "1") return Word();
    while (i < text.size()) {
        char c = text[i];
        if (c < 'a' || c > 'z') throw std::invalid_argument("unexpected character '" + std::string(1, c) + "' in word");
        int gen = c - 'a' + 1;
        ++i;
        long e = 1;
        if (i < text.size() && text[i] == '^') {
            ++i;
            std::size_t start = i;
            if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            std::string num(text.substr(start, i - start));
            if (num.empty() || num == "-" || num == "+") throw std::invalid_argument("missing exponent in word");
            e = std::stol(num);
            if (std::labs(e) > 1000000) throw std::invalid_argument("exponent too large");
        }
        for (long k = 0; k < std::labs(e); ++k) letters.push_back({gen, e > 0 ? 1 : -1});
        skip_space();
    }
    return Word(std::move(letters));
}

std::string format_word(const Word& w) {
    if (w.empty()) return "1";
    std::string out;
    const auto& l = w.letters();
    for (std::size_t i = 0; i < l.size();) {
        std::size_t j = i;
        while (j < l.size() && l[j] == l[i]) ++j;
        if (l[i].gen > 26) throw std::invalid_argument("generator beyond 'z' has no letter");
        out += static_cast<char>('a' + l[i].gen - 1);
        long run = static_cast<long>(j - i) * l[i].exp;
        if (run != 1) out += "^" + std::to_string(run);
        i = j;
    }
    return out;
}

std::vector<std::int64_t> abelianize(const Word& w, int n) {
    std::vector<std::int64_t> v(n, 0);
    for (auto l : w.letters()) {
        if (l.gen > n) throw std::invalid_argument("generator index out of range");
        v[l.gen - 1] += l.exp;
    }
    return v;
}

Endomorphism Endomorphism::identity(int n) {
    Endomorphism e;
    e.n = n;
    for (int i = 1; i <= n; ++i) e.images.push_back(Word::generator(i));
    return e;
}

Word apply_endo(const Endomorphism& phi, const Word& w) {
    std::vector<Letter> out;
    for (auto l : w.letters()) {
        if (l.gen > phi.n) throw std::invalid_argument("generator index out of range for endomorphism");
        const Word& img = l.exp > 0 ? phi.images[l.gen - 1] : invert(phi.images[l.gen - 1]);
        out.insert(out.end(), img.letters().begin(), img.letters().end());
    }
    return Word(std::move(out));
}

IntMatrix abelianization_matrix(const Endomorphism& phi) {
    IntMatrix a(phi.n, std::vector<std::int64_t>(phi.n, 0));
    for (int i = 0; i < phi.n; ++i) {
        auto v = abelianize(phi.images[i], phi.n);
        for (int k = 0; k < phi.n; ++k) a[k][i] = v[k];
    }
    return a;
}

Endomorphism standard_endo(int n, int p, int q, int r) {
    if (n < 3) throw std::invalid_argument("standard endomorphism needs n >= 3");
    if (p < 0 || q < 0 || r < 1) throw std::invalid_argument("standard endomorphism needs p, q >= 0 and r >= 1");
    Endomorphism e;
    e.n = n;
    for (int i = 2; i <= n; ++i) e.images.push_back(Word::generator(i));
    Word last = multiply(Word::generator(n, p), multiply(Word::generator(1, -r), Word::generator(2, -q)));
    e.images.push_back(last);
    return e;
}

std::vector<std::pair<int, int>> pair_basis(int n) {
    std::vector<std::pair<int, int>> out;
    for (int gap = 1; gap < n; ++gap)
        for (int i = 1; i + gap <= n; ++i) out.emplace_back(i, i + gap);
    return out;
}

int pair_index(int n, int i, int j) {
    if (i >= j || i < 1 || j > n) throw std::invalid_argument("bad pair");
    int idx = 0;
    for (int gap = 1; gap < j - i; ++gap) idx += n - gap;
    return idx + (i - 1);
}

std::string pair_name(int i, int j) {
    auto name = [](int g) {
        return g <= 26 ? std::string(1, static_cast<char>('a' + g - 1)) : "a" + std::to_string(g);
    };
    return "[" + name(i) + "," + name(j) + "]";
}

Word factor_word(const ConjugatedCommutator& f) {
    Word c = commutator(Word::generator(f.pair.first), Word::generator(f.pair.second));
    if (f.sign < 0) c = invert(c);
    return conjugate(c, f.conjugator);
}

Word product(const Decomposition& d) {
    std::vector<Letter> all;
    for (auto& f : d) {
        auto w = factor_word(f);
        all.insert(all.end(), w.letters().begin(), w.letters().end());
    }
    return Word(std::move(all));
}

namespace {

// [x, y] for letters of distinct generators as g [a_i, a_j]^s g^-1.
ConjugatedCommutator basic(Letter x, Letter y) {
    if (x.gen == y.gen) throw std::logic_error("basic commutator of equal generators");
    if (x.gen > y.gen) {
        auto f = basic(y, x);
        f.sign = -f.sign;
        return f;
    }
    ConjugatedCommutator f;
    f.pair = {x.gen, y.gen};
    std::vector<Letter> conj;
    if (x.exp < 0) conj.push_back({x.gen, -1});
    if (y.exp < 0) conj.push_back({y.gen, -1});
    f.conjugator = Word(conj);
    f.sign = x.exp * y.exp;
    return f;
}

void expand(const Word& prefix, std::span<const Letter> u, std::span<const Letter> v, Decomposition& out) {
    if (u.empty() || v.empty()) return;
    if (u.size() > 1) {
        Word p = multiply(prefix, Word({u[0]}));
        expand(p, u.subspan(1), v, out);
        expand(prefix, u.first(1), v, out);
        return;
    }
    if (v.size() > 1) {
        expand(prefix, u, v.first(1), out);
        Word p = multiply(prefix, Word({v[0]}));
        expand(p, u, v.subspan(1), out);
        return;
    }
    if (u[0].gen == v[0].gen) return;
    auto f = basic(u[0], v[0]);
    f.conjugator = multiply(prefix, f.conjugator);
    out.push_back(std::move(f));
}

void cancel_pairs(Decomposition& d) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < d.size() && !changed; ++i) {
            Word between;
            for (std::size_t j = i + 1; j < d.size(); ++j) {
                if (d[j].pair == d[i].pair && d[j].sign == -d[i].sign) {
                    // F_i P F_j = P  iff  P^-1 F_i P = F_j^-1.
                    Word lhs = conjugate(factor_word(d[i]), invert(between));
                    if (lhs == invert(factor_word(d[j]))) {
                        d.erase(d.begin() + static_cast<std::ptrdiff_t>(j));
                        d.erase(d.begin() + static_cast<std::ptrdiff_t>(i));
                        changed = true;
                        break;
                    }
                }
                between = multiply(between, factor_word(d[j]));
            }
        }
    }
}

}  // namespace

Decomposition decompose_commutator_word(const Word& w) {
    int n = std::max(1, w.max_generator());
    for (auto v : abelianize(w, n))
        if (v != 0) throw std::invalid_argument("word " + format_word(w) + " is not in the commutator subgroup");
    Decomposition out;
    std::vector<Letter> cur = w.letters();
    while (true) {
        std::size_t k = 0;
        while (k + 1 < cur.size() && cur[k].gen <= cur[k + 1].gen) ++k;
        if (k + 1 >= cur.size()) break;
        // u x y v = (u [x,y] u^-1) u y x v
        Letter x = cur[k], y = cur[k + 1];
        auto f = basic(x, y);
        Word prefix(std::vector<Letter>(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(k)));
        f.conjugator = multiply(prefix, f.conjugator);
        out.push_back(std::move(f));
        std::swap(cur[k], cur[k + 1]);
        cur = reduce(std::move(cur));
    }
    if (!cur.empty()) throw std::logic_error("collection left a nonempty sorted word");
    return out;
}

Decomposition decompose_commutator(const Word& u, const Word& v) {
    Decomposition out;
    expand(Word(), u.letters(), v.letters(), out);
    cancel_pairs(out);
    return out;
}

SubdivisionData endo_subdivision(const Endomorphism& phi, bool allow_negative) {
    SubdivisionData s;
    s.n = phi.n;
    s.basis = pair_basis(phi.n);
    const std::size_t m = s.basis.size();
    s.matrix.assign(m, std::vector<std::int64_t>(m, 0));
    for (std::size_t src = 0; src < m; ++src) {
        auto [i, j] = s.basis[src];
        auto d = decompose_commutator(phi.images[i - 1], phi.images[j - 1]);
        for (auto& f : d) {
            s.matrix[src][pair_index(phi.n, f.pair.first, f.pair.second)] += f.sign;
            if (f.sign < 0) {
                if (!allow_negative)
                    throw NegativeExponentError(pair_name(i, j), "image contains " +
                                                                     pair_name(f.pair.first, f.pair.second) +
                                                                     "^-1 conjugated by " + format_word(f.conjugator));
                s.has_negative = true;
            }
        }
        s.placements.push_back(std::move(d));
    }
    return s;
}

Lambda2Result lambda2_matrix(const Endomorphism& phi) {
    auto a = abelianization_matrix(phi);
    auto basis = pair_basis(phi.n);
    Lambda2Result r;
    r.matrix.assign(basis.size(), std::vector<std::int64_t>(basis.size(), 0));
    for (std::size_t s = 0; s < basis.size(); ++s) {
        int i = basis[s].first - 1, j = basis[s].second - 1;
        for (std::size_t t = 0; t < basis.size(); ++t) {
            int k = basis[t].first - 1, l = basis[t].second - 1;
            auto v = a[k][i] * a[l][j] - a[l][i] * a[k][j];
            r.matrix[s][t] = v;
            if (v < 0) r.nonnegative = false;
        }
    }
    return r;
}

ConsistencyReport consistency_check(const Endomorphism& phi, std::complex<double> lambda, double tol) {
    ConsistencyReport rep;
    rep.tolerance = tol;
    std::vector<std::complex<double>> vecs;
    std::complex<double> pw = 1;
    for (int i = 0; i < phi.n; ++i, pw *= lambda) vecs.push_back(pw);
    rep.pass = true;
    for (int i = 0; i < phi.n; ++i) {
        std::complex<double> end = 0;
        for (auto l : phi.images[i].letters()) end += static_cast<double>(l.exp) * vecs.at(l.gen - 1);
        std::complex<double> expect = lambda * vecs[i];
        double r = std::abs(end - expect) / std::max(1.0, std::abs(expect));
        rep.residuals.push_back(r);
        if (!(r <= tol)) rep.pass = false;
    }
    return rep;
}

ConsistencyReport consistency_check(const Endomorphism& phi, const FieldContext& ctx, double tol) {
    return consistency_check(phi, ctx.lambda(), tol);
}

Endomorphism parse_endomorphism_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("endomorphism JSON: ") + e.what());
    }
    const nlohmann::json* images = &j;
    int n = 0;
    if (j.contains("images")) {
        images = &j["images"];
        if (j.contains("n")) n = j["n"].get<int>();
    }
    if (!images->is_object()) throw std::invalid_argument("endomorphism JSON must map generators to words");
    for (auto& [key, val] : images->items()) {
        if (key.size() != 1 || key[0] < 'a' || key[0] > 'z')
            throw std::invalid_argument("bad generator name '" + key + "'");
        n = std::max(n, key[0] - 'a' + 1);
        if (!val.is_string()) throw std::invalid_argument("image of " + key + " must be a string");
    }
    Endomorphism e = Endomorphism::identity(n);
    std::vector<bool> seen(n, false);
    for (auto& [key, val] : images->items()) {
        int g = key[0] - 'a' + 1;
        e.images[g - 1] = parse_word(val.get<std::string>());
        seen[g - 1] = true;
    }
    for (int g = 0; g < n; ++g)
        if (!seen[g]) throw std::invalid_argument("missing image for generator " + std::string(1, static_cast<char>('a' + g)));
    for (auto& w : e.images)
        if (w.max_generator() > n) throw std::invalid_argument("image uses a generator outside the alphabet");
    return e;
}

std::string endomorphism_to_json(const Endomorphism& phi) {
    nlohmann::ordered_json j;
    for (int i = 0; i < phi.n; ++i) j[std::string(1, static_cast<char>('a' + i))] = format_word(phi.images[i]);
    return j.dump();
}

}  // namespace selfsim

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selfsim/spectral.hpp"

namespace selfsim {

class FieldContext;

struct Letter {
    int gen = 1;  // 1-based
    int exp = 1;  // +1 or -1
    friend bool operator==(Letter a, Letter b) { return a.gen == b.gen && a.exp == b.exp; }
};

/// Freely reduced word in F(a_1, ..., a_n).
class Word {
public:
    Word() = default;
    /// Reduces its input.
    explicit Word(std::vector<Letter> letters);
    static Word generator(int gen, int power = 1);

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t length() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    int max_generator() const;

    friend bool operator==(const Word& a, const Word& b) { return a.letters_ == b.letters_; }

private:
    std::vector<Letter> letters_;
};

std::vector<Letter> reduce(std::vector<Letter> letters);
Word multiply(const Word& u, const Word& v);
Word invert(const Word& w);
/// g w g^-1
Word conjugate(const Word& w, const Word& g);
/// [u, v] = u v u^-1 v^-1
Word commutator(const Word& u, const Word& v);
Word power(const Word& w, int k);

/// w = u core u^-1 with core cyclically reduced.
struct CyclicReduction {
    Word conjugator;
    Word core;
};
CyclicReduction cyclic_reduce(const Word& w);

/// "ab^-2c": letters a..z are generators 1..26, optional caret exponent.
/// "1" or "" is the empty word. Throws std::invalid_argument.
Word parse_word(std::string_view text);
std::string format_word(const Word& w);

/// Exponent sum of each generator (length n).
std::vector<std::int64_t> abelianize(const Word& w, int n);

struct Endomorphism {
    int n = 0;
    std::vector<Word> images;

    static Endomorphism identity(int n);
};

Word apply_endo(const Endomorphism& phi, const Word& w);
/// A[k][i] = exponent sum of a_{k+1} in phi(a_{i+1}); columns are images.
IntMatrix abelianization_matrix(const Endomorphism& phi);

/// phi(a_i) = a_{i+1} for i < n, phi(a_n) = a_n^p a_1^-r a_2^-q, so that
/// lambda^n - p lambda^(n-1) + q lambda + r = 0 for the generator vectors 1, lambda, ...
Endomorphism standard_endo(int n, int p, int q, int r);

/// Pair basis of [F,F]/[F,[F,F]]: pairs (i, j), i < j (1-based), ordered by
/// j - i and then i. For n = 3 this is [a,b], [b,c], [a,c].
std::vector<std::pair<int, int>> pair_basis(int n);
int pair_index(int n, int i, int j);
std::string pair_name(int i, int j);

struct ConjugatedCommutator {
    Word conjugator;
    std::pair<int, int> pair;  // i < j
    int sign = 1;
    friend bool operator==(const ConjugatedCommutator& a, const ConjugatedCommutator& b) {
        return a.conjugator == b.conjugator && a.pair == b.pair && a.sign == b.sign;
    }
};

using Decomposition = std::vector<ConjugatedCommutator>;

Word factor_word(const ConjugatedCommutator& f);
/// Reduced product of all factors.
Word product(const Decomposition& d);

/// Bubble collection: sort letters into generator order, one factor per
/// adjacent transposition. Throws std::invalid_argument if abelianize(w) != 0.
Decomposition decompose_commutator_word(const Word& w);

/// [u, v] expanded by the identities [xU, V] = x[U,V]x^-1 [x,V] and
/// [x, yV] = [x,y] y[x,V]y^-1, followed by cancellation of factor pairs
/// F_i ... F_j with F_i P F_j = P.
Decomposition decompose_commutator(const Word& u, const Word& v);

struct SubdivisionData {
    int n = 0;
    std::vector<std::pair<int, int>> basis;
    /// matrix[s][t] = signed number of factors of type t in phi([source s]).
    IntMatrix matrix;
    std::vector<Decomposition> placements;
    bool has_negative = false;
};

/// Throws NegativeExponentError naming the first pair whose decomposition
/// keeps a factor of sign -1, unless allow_negative is set.
SubdivisionData endo_subdivision(const Endomorphism& phi, bool allow_negative = false);

struct Lambda2Result {
    IntMatrix matrix;
    bool nonnegative = true;
};

/// Second exterior power of the abelianization matrix in the pair basis.
Lambda2Result lambda2_matrix(const Endomorphism& phi);

struct ConsistencyReport {
    bool pass = false;
    double tolerance = 0;
    /// |endpoint f(phi(a_i)) - lambda endpoint f(a_i)|, relative to |lambda|^i.
    std::vector<double> residuals;
};

ConsistencyReport consistency_check(const Endomorphism& phi, std::complex<double> lambda, double tol = 1e-9);
ConsistencyReport consistency_check(const Endomorphism& phi, const FieldContext& ctx, double tol = 1e-9);

/// {"a": "b", "b": "c", "c": "ca^-1b^-2"}, optionally wrapped as {"n": 3, "images": {...}}.
Endomorphism parse_endomorphism_json(std::string_view text);
std::string endomorphism_to_json(const Endomorphism& phi);

}  // namespace selfsim

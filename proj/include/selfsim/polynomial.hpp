#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace selfsim {

/// Integer polynomial, coefficients stored lowest degree first.
struct IntPolynomial {
    std::vector<std::int64_t> coeffs;
    /// Set by classify/irreducibility checks; empty until checked.
    std::optional<bool> irreducible;

    IntPolynomial() = default;
    explicit IntPolynomial(std::vector<std::int64_t> c);

    int degree() const;
    bool is_monic() const;
    std::int64_t leading() const { return coeffs.empty() ? 0 : coeffs.back(); }

    friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) {
        return a.coeffs == b.coeffs;
    }
};

/// Parses "1,2,-1,1" (lowest degree first). Throws std::invalid_argument.
IntPolynomial parse_polynomial(std::string_view text);
std::string format_polynomial(const IntPolynomial& p);

// Exact polynomials over Q, lowest degree first, no trailing zeros
// (the zero polynomial is the empty vector).
using RatPoly = std::vector<mpq_class>;

RatPoly to_rat(const IntPolynomial& p);
void trim(RatPoly& p);
int degree(const RatPoly& p);
RatPoly add(const RatPoly& a, const RatPoly& b);
RatPoly sub(const RatPoly& a, const RatPoly& b);
RatPoly mul(const RatPoly& a, const RatPoly& b);
RatPoly derivative(const RatPoly& p);
/// Quotient and remainder; divisor must be nonzero.
std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b);
RatPoly mod(const RatPoly& a, const RatPoly& b);
/// Monic gcd.
RatPoly gcd(RatPoly a, RatPoly b);

/// Integer division a / b if b divides a exactly over Z[x]; b monic.
std::optional<IntPolynomial> exact_divide(const IntPolynomial& a, const IntPolynomial& b);

/// m-th cyclotomic polynomial.
IntPolynomial cyclotomic(int m);

/// Characteristic polynomial det(xI - A) of an integer matrix, exact
/// (Faddeev-LeVerrier over Q).
IntPolynomial characteristic_polynomial(const std::vector<std::vector<std::int64_t>>& a);

}  // namespace selfsim

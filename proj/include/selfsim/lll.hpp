#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace selfsim {

/// Rows are basis vectors. Textbook LLL with full Gram-Schmidt recomputation
/// after each swap; intended for the small dimensions used here (<= ~12).
template <class Real>
void lll_reduce(std::vector<std::vector<Real>>& basis, Real delta = Real(0.99)) {
    const std::size_t n = basis.size();
    if (n < 2) return;
    const std::size_t dim = basis[0].size();
    auto dot = [dim](const std::vector<Real>& a, const std::vector<Real>& b) {
        Real s = 0;
        for (std::size_t i = 0; i < dim; ++i) s += a[i] * b[i];
        return s;
    };
    std::vector<std::vector<Real>> star(n, std::vector<Real>(dim));
    std::vector<std::vector<Real>> mu(n, std::vector<Real>(n, 0));
    std::vector<Real> norm2(n);
    auto gram_schmidt = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            star[i] = basis[i];
            for (std::size_t j = 0; j < i; ++j) {
                mu[i][j] = norm2[j] > 0 ? dot(basis[i], star[j]) / norm2[j] : 0;
                for (std::size_t t = 0; t < dim; ++t) star[i][t] -= mu[i][j] * star[j][t];
            }
            norm2[i] = dot(star[i], star[i]);
        }
    };
    gram_schmidt();
    std::size_t k = 1;
    int guard = 0;
    while (k < n && guard++ < 100000) {
        for (std::size_t jj = k; jj-- > 0;) {
            Real q = std::round(mu[k][jj]);
            if (q != 0) {
                for (std::size_t t = 0; t < dim; ++t) basis[k][t] -= q * basis[jj][t];
                for (std::size_t l = 0; l <= jj; ++l) mu[k][l] -= q * (l == jj ? Real(1) : mu[jj][l]);
            }
        }
        if (norm2[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norm2[k - 1]) {
            ++k;
        } else {
            std::swap(basis[k], basis[k - 1]);
            gram_schmidt();
            k = k > 1 ? k - 1 : 1;
        }
    }
}

/// Squared lengths of the Gram-Schmidt vectors of the given rows.
template <class Real>
std::vector<Real> gram_schmidt_norms2(const std::vector<std::vector<Real>>& basis) {
    const std::size_t n = basis.size();
    std::vector<std::vector<Real>> star(n);
    std::vector<Real> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        star[i] = basis[i];
        for (std::size_t j = 0; j < i; ++j) {
            if (out[j] <= 0) continue;
            Real d = 0;
            for (std::size_t t = 0; t < basis[i].size(); ++t) d += basis[i][t] * star[j][t];
            Real m = d / out[j];
            for (std::size_t t = 0; t < basis[i].size(); ++t) star[i][t] -= m * star[j][t];
        }
        Real s = 0;
        for (auto v : star[i]) s += v * v;
        out[i] = s;
    }
    return out;
}

}  // namespace selfsim

#include "selfsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "selfsim/errors.hpp"

namespace selfsim {

void validate_subdivision_matrix(const IntMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) throw std::invalid_argument("empty matrix");
    for (auto& row : m) {
        if (row.size() != n) throw std::invalid_argument("matrix is not square");
        if (std::any_of(row.begin(), row.end(), [](std::int64_t v) { return v < 0; }))
            throw std::invalid_argument("matrix has a negative entry");
        if (std::all_of(row.begin(), row.end(), [](std::int64_t v) { return v == 0; }))
            throw std::invalid_argument("matrix has a zero row");
    }
}

bool is_primitive(const IntMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return false;
    for (auto& row : m) {
        if (row.size() != n) throw std::invalid_argument("matrix is not square");
        for (auto v : row)
            if (v < 0) throw std::invalid_argument("matrix has a negative entry");
    }
    using Bool = std::vector<std::vector<char>>;
    Bool b(n, std::vector<char>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b[i][j] = m[i][j] > 0;
    auto positive = [n](const Bool& x) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!x[i][j]) return false;
        return true;
    };
    const std::size_t bound = n * n - 2 * n + 2;
    Bool p = b;
    for (std::size_t k = 1; k <= bound; ++k) {
        if (positive(p)) return true;
        Bool next(n, std::vector<char>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                if (p[i][l])
                    for (std::size_t j = 0; j < n; ++j) next[i][j] |= b[l][j];
        p = std::move(next);
    }
    return positive(p);
}

PerronEigen perron_eigen(const IntMatrix& m, double tol, int max_iter) {
    if (!is_primitive(m)) throw std::invalid_argument("perron_eigen requires a primitive matrix");
    const std::size_t n = m.size();
    std::vector<double> v(n, 1.0 / static_cast<double>(n)), w(n);
    double prev = -1;
    for (int it = 1; it <= max_iter; ++it) {
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += static_cast<double>(m[i][j]) * v[j];
            w[i] = s;
            sum += s;
        }
        // v sums to 1, so the growth of the 1-norm is the Rayleigh-type quotient.
        double change = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double nv = w[i] / sum;
            change = std::max(change, std::fabs(nv - v[i]));
            v[i] = nv;
        }
        if (std::fabs(sum - prev) < tol * sum && change < std::sqrt(tol)) return {sum, v, it};
        prev = sum;
    }
    throw ConvergenceError("power iteration did not converge in " + std::to_string(max_iter) +
                           " iterations; last estimate " + std::to_string(prev));
}

AreaCheckReport check_area_eigenvector(const IntMatrix& m, const std::vector<double>& areas, double lambda_sq,
                                       double tol) {
    if (areas.size() != m.size()) throw std::invalid_argument("area vector size does not match matrix");
    AreaCheckReport rep;
    rep.tolerance = tol;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i].size() != areas.size()) throw std::invalid_argument("matrix is not square");
        double s = 0;
        for (std::size_t j = 0; j < areas.size(); ++j) s += static_cast<double>(m[i][j]) * areas[j];
        double expect = lambda_sq * areas[i];
        double r = std::fabs(s - expect) / std::max(std::fabs(expect), 1e-300);
        rep.residuals.push_back(r);
        rep.max_residual = std::max(rep.max_residual, r);
    }
    rep.pass = rep.max_residual <= tol;
    return rep;
}

QuasiperiodicityCertificate quasiperiodicity_certificate(bool origin_tile_has_interior_origin, const IntMatrix& m) {
    QuasiperiodicityCertificate c;
    c.origin_condition = origin_tile_has_interior_origin;
    c.primitive = is_primitive(m);
    c.granted = c.origin_condition && c.primitive;
    if (c.granted)
        c.statement = "quasiperiodicity lemma: a self-similar tiling grown from a tile with the origin in "
                      "its interior and with primitive subdivision matrix is quasiperiodic";
    else if (!c.primitive)
        c.statement = "refused: subdivision matrix is not primitive";
    else
        c.statement = "refused: seed tile does not contain the origin in its interior";
    return c;
}

}  // namespace selfsim

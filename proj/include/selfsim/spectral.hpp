#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace selfsim {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// Throws std::invalid_argument unless m is square, nonnegative and has no zero row.
void validate_subdivision_matrix(const IntMatrix& m);

/// Some power (up to the Wielandt bound n^2 - 2n + 2) is strictly positive.
bool is_primitive(const IntMatrix& m);

struct PerronEigen {
    double value = 0;
    /// Strictly positive, entries sum to 1.
    std::vector<double> vector;
    int iterations = 0;
};

/// Power iteration from the all-ones vector. Throws std::invalid_argument for
/// non-primitive input and ConvergenceError when max_iter is reached.
PerronEigen perron_eigen(const IntMatrix& m, double tol = 1e-14, int max_iter = 100000);

struct AreaCheckReport {
    bool pass = false;
    double tolerance = 0;
    /// |(M a)_i - lambda_sq a_i| / (lambda_sq a_i)
    std::vector<double> residuals;
    double max_residual = 0;
};

AreaCheckReport check_area_eigenvector(const IntMatrix& m, const std::vector<double>& areas, double lambda_sq,
                                       double tol = 1e-9);

struct QuasiperiodicityCertificate {
    bool granted = false;
    bool origin_condition = false;
    bool primitive = false;
    std::string statement;
};

QuasiperiodicityCertificate quasiperiodicity_certificate(bool origin_tile_has_interior_origin, const IntMatrix& m);

}  // namespace selfsim

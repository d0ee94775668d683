#pragma once

#include <Eigen/Dense>
#include <gmpxx.h>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/geometry.hpp"
#include "selfsim/polynomial.hpp"

namespace selfsim {

using Complex = std::complex<double>;

struct RootEstimate {
    Complex value;
    /// A disk of this radius around `value` contains a root.
    double error_radius = 0;
};

/// Simultaneous (Aberth) iteration from a perturbed circle. Degree 1 and 2
/// use closed forms so that Gaussian-integer roots come out exact.
/// Throws ConvergenceError (with residuals) when the cap is hit.
std::vector<RootEstimate> find_roots(const IntPolynomial& poly, double tol = 1e-10, int max_iter = 2000);

/// Exact irreducibility over Q: squarefree test, then every subset of
/// numerical roots is a candidate factor that is confirmed by exact division.
bool is_irreducible(const IntPolynomial& poly);

enum class PerronClass { NotAlgebraicallyValid, NotPerron, RealPerron, ComplexPerron };
std::string to_string(PerronClass c);

PerronClass classify_perron(const IntPolynomial& poly);

/// Element of Q[lambda] in the power basis; real-lambda contexts use pairs
/// (x, y), stored as 2d coefficients [x_0..x_{d-1}, y_0..y_{d-1}].
struct FieldElement {
    std::vector<mpq_class> coeffs;

    static FieldElement from_ints(const std::vector<std::int64_t>& c);
    bool is_integral() const;
    std::vector<std::int64_t> to_ints() const;
    friend bool operator==(const FieldElement& a, const FieldElement& b) { return a.coeffs == b.coeffs; }
};

/// Integer coordinates of a point of the lattice A = Z[lambda] (or Z[lambda]^2).
using LatticeCoords = std::vector<std::int64_t>;

struct EmbeddedPoint {
    std::vector<double> coords;
    std::optional<FieldElement> provenance;
};

/// The number field Q[lambda] with its embedding space W. Coordinates of W are
/// eigen-coordinates of multiplication by lambda: the designated embedding
/// first (so V_lambda is spanned by the first two coordinates, or by
/// coordinates 0 and d when lambda is real), then the remaining complex
/// embeddings as (re, im) pairs, then the remaining real embeddings.
/// Immutable after construction.
class FieldContext {
public:
    /// Throws NotPerronError unless classify_perron is RealPerron or ComplexPerron.
    static FieldContext build(const IntPolynomial& poly);

    const IntPolynomial& poly() const { return poly_; }
    int degree() const { return d_; }
    const std::vector<RootEstimate>& roots() const { return roots_; }
    int lambda_index() const { return lambda_index_; }
    Complex lambda() const { return roots_[lambda_index_].value; }
    double lambda_abs() const { return std::abs(lambda()); }
    int real_roots() const { return r_; }
    int complex_pairs() const { return c_; }
    bool is_real_lambda() const { return real_lambda_; }
    /// Dimension D of W.
    int embed_dim() const { return static_cast<int>(sigma_.rows()); }
    /// Number of integer coordinates of a lattice point (d, or 2d for real lambda).
    int coeff_dim() const { return static_cast<int>(sigma_.cols()); }
    /// Largest modulus among the conjugates other than lambda and its conjugate.
    double max_vertical_modulus() const { return rho_; }

    const std::vector<std::vector<std::int64_t>>& companion() const { return companion_; }
    const Eigen::MatrixXd& sigma_matrix() const { return sigma_; }
    const Eigen::MatrixXd& sigma_inverse() const { return sigma_inv_; }
    /// Linear map m_lambda on W in these coordinates.
    const Eigen::MatrixXd& m_lambda() const { return m_lambda_; }
    std::array<Eigen::VectorXd, 2> v_lambda_basis() const;
    const Eigen::MatrixXd& vertical_projector() const { return vertical_; }
    /// Indices of the coordinates of W that are vertical (complement of V_lambda).
    const std::vector<int>& vertical_indices() const { return vertical_idx_; }

    EmbeddedPoint sigma(const FieldElement& x) const;
    Eigen::VectorXd sigma(const LatticeCoords& x) const;
    Vec2 pi_project(const EmbeddedPoint& p) const;
    Vec2 pi_project(const Eigen::VectorXd& p) const;
    /// pi(sigma(x)) computed directly.
    Vec2 planar(const LatticeCoords& x) const;
    Vec2 planar(const FieldElement& x) const;

    FieldElement mul_lambda(const FieldElement& x) const;
    LatticeCoords mul_lambda(const LatticeCoords& x) const;
    LatticeCoords mul_lambda_pow(LatticeCoords x, int n) const;
    /// Product of a scalar s in Q[lambda] (d coefficients) with x.
    FieldElement multiply(const FieldElement& s, const FieldElement& x) const;

    double vertical_norm(const FieldElement& x) const;
    double vertical_norm(const LatticeCoords& x) const;
    /// Vertical coordinates of sigma(x) (length D - 2).
    Eigen::VectorXd vertical_part(const Eigen::VectorXd& w) const;

    /// Affine-free check of the context invariants; returns the largest residual.
    double invariant_residual() const;

private:
    void check_dim(std::size_t n) const;

    IntPolynomial poly_;
    int d_ = 0;
    std::vector<RootEstimate> roots_;
    int lambda_index_ = 0;
    int r_ = 0;
    int c_ = 0;
    bool real_lambda_ = false;
    double rho_ = 0;
    std::vector<std::vector<std::int64_t>> companion_;
    std::vector<Complex> lambda_powers_;
    Eigen::MatrixXd sigma_;
    Eigen::MatrixXd sigma_inv_;
    Eigen::MatrixXd m_lambda_;
    Eigen::MatrixXd vertical_;
    std::vector<int> vertical_idx_;
};

/// Bi-Lipschitz constant of pi restricted to the plane of sigma(lambda^n t).
/// Throws DegenerateError for collinear triangles.
double bilipschitz_constant(const FieldContext& ctx, const std::array<FieldElement, 3>& triangle, int n);
double bilipschitz_constant(const FieldContext& ctx, const std::array<LatticeCoords, 3>& triangle, int n);

/// Upper bound on the covering radius of sigma(A) in W: half the norm of the
/// Gram-Schmidt lengths of an LLL-reduced basis.
double covering_radius_bound(const FieldContext& ctx);

/// Coefficients c with sum c_i lambda^i = exp(2 pi i / m), verified exactly
/// (Phi_m of the candidate vanishes modulo the minimal polynomial).
std::optional<FieldElement> cyclotomic_in_field(const FieldContext& ctx, int m);

/// Exact test Phi_m(sum c_i lambda^i) == 0 mod q over Q.
bool satisfies_cyclotomic(const FieldContext& ctx, const FieldElement& c, int m);

}  // namespace selfsim

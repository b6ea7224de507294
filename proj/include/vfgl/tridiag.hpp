#pragma once

#include <span>
#include <vector>

namespace vfgl {

// Symmetric tridiagonal matrix: diag has size m, off has size m-1 and
// couples unknowns i and i+1.
struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    int size() const { return static_cast<int>(diag.size()); }
    void apply(std::span<const double> x, std::span<double> y) const;
    double quadratic_form(std::span<const double> x) const;
};

// Number of eigenvalues strictly below x (Sturm sequence count).
int sturm_count_below(const Tridiagonal& a, double x);

// k-th smallest eigenvalue (k is 1-based), by bisection on the Sturm count.
// Deterministic, converges to ~1e-13 * spectral scale.
double kth_eigenvalue(const Tridiagonal& a, int k);

// Lowest k eigenvalues, ascending.
std::vector<double> lowest_eigenvalues(const Tridiagonal& a, int k);

// Solve (a - shift I) x = rhs by LU with partial pivoting (stable for the
// indefinite shifts used by inverse iteration and the regularized resolvent).
std::vector<double> shifted_solve(const Tridiagonal& a, double shift,
                                  std::span<const double> rhs);

struct InverseIterationResult {
    double value = 0.0;            // Rayleigh-quotient refined eigenvalue
    std::vector<double> vector;    // unit 2-norm
    double residual = 0.0;         // ||A v - value v||_2
    bool converged = false;
};

// Inverse iteration at the bisection estimate, with optional deflation
// against previously found eigenvectors (plain 2-norm orthogonalization).
InverseIterationResult inverse_iteration(
    const Tridiagonal& a, double eigenvalue_estimate,
    std::span<const std::vector<double>> deflate = {});

} // namespace vfgl

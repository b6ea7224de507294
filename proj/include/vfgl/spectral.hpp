#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vfgl/grid.hpp"
#include "vfgl/tridiag.hpp"

namespace vfgl {

// Eigenpair of a 1D Schrodinger-type operator, sampled on the full grid
// (zero at the Dirichlet ends) and normalized in the trapezoid L2 norm.
struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
    int index = 0; // 1-based
};

struct ConvergenceReport {
    double value_coarse = 0.0;    // on the working grid
    double value_fine = 0.0;      // on the (T+2, 2n-1) control grid
    double richardson = 0.0;      // h^2 extrapolation of the two
    double difference() const { return value_fine - value_coarse; }
};

struct SpectralCurve {
    std::vector<double> alphas;
    std::vector<double> lambda1;
    std::vector<double> lambda2; // empty unless requested
};

// Potential of the spectral family: (t^2/2 + alpha)^2.
inline double montgomery_potential(double t, double alpha) {
    const double w = t * t / 2.0 + alpha;
    return w * w;
}

// -d^2/dt^2 + diag(potential) over the interior nodes of a uniform grid
// with Dirichlet elimination of the endpoints.
Tridiagonal assemble_schrodinger(std::span<const double> interior_potential, double h);

// Operator of the family at a given alpha (checks the grid's declared range).
Tridiagonal assemble_montgomery(double alpha, const Grid1D& grid);

// Lowest k eigenpairs (1 <= k <= 5), values ascending, vectors embedded on
// the full grid and normalized; the ground vector carries a positive mean.
// Throws NumericalError when inverse iteration cannot reach residual
// 1e-8 * (1 + |lambda|).
std::vector<EigenPair> lowest_eigenpairs(const Tridiagonal& op, int k, const Grid1D& grid);

// Cached solver for the eigenvalue family lambda(alpha) and everything built
// on top of it: the band minimum (tau0, lambda0), Feynman-Hellmann
// derivatives, the sublevel interval (z1, z2), and the regularized resolvent.
class MontgomerySolver {
public:
    explicit MontgomerySolver(Grid1D grid);

    const Grid1D& grid() const { return grid_; }

    double lambda(double alpha) const;
    double lambda2(double alpha) const;
    EigenPair ground(double alpha) const;
    EigenPair eigenpair(double alpha, int index) const;

    // Two-grid truncation/discretization control for lambda(alpha).
    ConvergenceReport lambda_report(double alpha) const;

    // Golden-section minimum of lambda over [lo, hi] (alpha tolerance 1e-8).
    // Requires an interior minimum; caches and returns (tau0, lambda0).
    std::pair<double, double> find_tau0(double lo, double hi);
    bool has_tau0() const { return tau0_.has_value(); }
    double tau0() const;
    double lambda0() const;

    // 2 * int (t^2/2 + alpha) |u_alpha|^2 dt (Feynman-Hellmann).
    double lambda_prime(double alpha) const;

    // Centered second difference at tau0 with a step-halving consistency
    // check (throws if the two estimates disagree by more than 10%).
    double lambda_second_derivative(double step = 1e-2) const;

    // The two solutions of lambda(alpha) = b around tau0, z1 < tau0 < z2.
    std::pair<double, double> z_interval(double b) const;

    // w = (P(alpha) - b)^{-1} (1 - pi_alpha) g with <w, u_alpha> = 0.
    // Requires b < lambda2(alpha) (and not within 1e-10 of it).
    std::vector<double> resolvent_apply(double alpha, double b,
                                        std::span<const double> g) const;

    SpectralCurve scan(double alpha_min, double alpha_max, int points,
                       bool with_second = false) const;

private:
    EigenPair pair_cached(double alpha, int index) const;

    Grid1D grid_;
    std::optional<double> tau0_;
    std::optional<double> lambda0_;

    mutable std::mutex mutex_;
    mutable std::map<std::pair<double, int>, EigenPair> cache_;
    mutable std::vector<std::pair<double, int>> cache_order_;
};

// Ground eigenvector of a general interior potential, on the full grid with
// trapezoid normalization and positive mean.  Shared by the linearized
// spectrum and the strip fiber computations.
EigenPair ground_state(std::span<const double> interior_potential, const Grid1D& grid);
double ground_energy_of_potential(std::span<const double> interior_potential, const Grid1D& grid);

} // namespace vfgl

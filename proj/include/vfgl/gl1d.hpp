#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "vfgl/grid.hpp"
#include "vfgl/spectral.hpp"

namespace vfgl {

// Sampled nonnegative minimizer of the 1D quartic functional at (alpha, b),
// together with its cached norms and the ground-mode overlap delta.
struct GLProfile {
    double alpha = 0.0;
    double b = 0.0;
    std::vector<double> samples;
    double l2 = 0.0;         // ||f||_2
    double l4_fourth = 0.0;  // ||f||_4^4
    double linf = 0.0;
    double delta = 0.0;      // <f, u_alpha>
    double el_residual = 0.0;

    bool trivial() const { return linf == 0.0; }
};

struct GroundEnergyRecord {
    double alpha = 0.0;
    double b = 0.0;
    double energy = 0.0;    // direct functional value
    double f4norm = 0.0;    // ||f||_4^4
    double feynman_hellmann_residual = 0.0; // int (t^2/2+alpha) f^2
};

struct ResolventIdentityReport {
    double scalar_residual = 0.0;   // |(b-lambda) delta - b <f^3, u>|
    double function_residual = 0.0; // ||f + b R(f^3) - delta u||_2
};

struct RatioRow {
    double b = 0.0;
    double xi = 0.0;
    double energy = 0.0;
    double model = 0.0;  // -(b-lambda0)^2 / (2 b ||u0||_4^4)
    double ratio = 0.0;
    double f4_ratio = 0.0; // ||f||_4^4 * b^2 ||u0||_4^4 / (b-lambda0)^2
};

struct MinimizeOptions {
    std::optional<std::vector<double>> init;
    double init_amplitude_factor = 1.0;  // c_init
    double residual_tol = 1e-9;          // relative to ||f||_2
    double accept_tol = 1e-8;            // fallback acceptance, relative
    int max_newton = 60;
    int max_restarts = 3;
};

// Standalone minimization of the quartic functional with an arbitrary
// interior potential (used by the periodic fiber reduction of the strip
// module, where the transverse dispersion replaces the well).
struct PotentialGL {
    std::vector<double> samples; // full grid
    double lambda = 0.0;         // ground eigenvalue of -D^2 + W
    double energy = 0.0;
    double residual = 0.0;
};
PotentialGL minimize_gl_potential(std::span<const double> interior_potential, double b,
                                  const Grid1D& grid, const MinimizeOptions& opts = {});

// Minimizes E_{alpha,b} over nonnegative profiles on the solver's grid,
// realizes the resolvent fixed-point form, and locates xi(b).
class GL1DSolver {
public:
    explicit GL1DSolver(std::shared_ptr<MontgomerySolver> spectral);

    const Grid1D& grid() const { return spectral_->grid(); }
    MontgomerySolver& spectral() const { return *spectral_; }

    // Trapezoid evaluation of the functional; the derivative term is the
    // quadratic form of the same three-point operator the minimizer solves,
    // so the stationarity identity energy = -(b/2)||f||_4^4 is exact up to
    // the Euler-Lagrange residual.
    double energy(std::span<const double> f, double alpha, double b) const;

    GLProfile minimize(double alpha, double b, const MinimizeOptions& opts = {}) const;

    GroundEnergyRecord ground_energy(double alpha, double b) const;
    GroundEnergyRecord record_for(const GLProfile& profile) const;

    ResolventIdentityReport verify_resolvent_identities(const GLProfile& profile) const;

    // Fixed-point solve f = delta u_alpha - b R(f^3), delta = b<f^3,u>/(b-lambda).
    // Only valid in the contraction regime near (tau0, lambda0); throws when
    // the iteration does not contract.
    GLProfile picard_solve(double alpha, double b) const;

    // Minimizer of alpha -> b(alpha, b) over (z1(b), z2(b)); golden section
    // guarded by a 41-point unimodality pre-scan.  Checks the
    // Feynman-Hellmann condition at the optimum.
    std::pair<double, GroundEnergyRecord> find_xi(double b, double b_cap_margin = 0.05) const;

    std::vector<RatioRow> asymptotic_ratio(std::span<const double> b_sequence) const;

    // Euler-Lagrange residual vector A f - b f (1 - f^2) on the full grid.
    std::vector<double> el_residual_vector(std::span<const double> f, double alpha, double b) const;

private:
    GLProfile finalize_profile(std::vector<double> f, double alpha, double b) const;

    std::shared_ptr<MontgomerySolver> spectral_;
};

} // namespace vfgl

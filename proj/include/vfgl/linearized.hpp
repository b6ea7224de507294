#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "vfgl/gl1d.hpp"
#include "vfgl/spectral.hpp"

namespace vfgl {

struct GammaCurve {
    std::vector<double> betas;
    std::vector<double> gammas;
};

// Lowest eigenvalue gamma(beta, b) of the linearization around the optimal
// profile f at (xi(b), b):  -d^2/dt^2 + (t^2/2 + xi + beta)^2 - b (1 - f^2).
// Reuses the tridiagonal machinery of the spectral family on the same grid,
// which keeps the gamma(0,b) = 0 identity free of discretization bias.
class LinearizedSpectrum {
public:
    explicit LinearizedSpectrum(std::shared_ptr<GL1DSolver> gl);

    // The (xi, profile) pair backing the operator at this b (cached).
    struct Basis {
        double xi = 0.0;
        GLProfile profile;
    };
    const Basis& basis(double b) const;

    double gamma(double beta, double b) const;

    // Ground state of the beta=0 operator (for the identity check against
    // f / ||f||_2).
    EigenPair ground_mode(double beta, double b) const;

    // Centered finite differences in beta with a step-halving consistency
    // check; enforces |first| <= 1e-5.
    std::pair<double, double> gamma_derivatives_at_zero(double b, double step = 1e-2) const;

    GammaCurve gamma_scan(double b, std::span<const double> betas) const;
    GammaCurve gamma_scan(double b, double beta_min, double beta_max, int points) const;

private:
    std::vector<double> linearized_potential(double beta, const Basis& basis) const;

    std::shared_ptr<GL1DSolver> gl_;
    mutable std::mutex mutex_;
    mutable std::map<double, Basis> cache_;
};

} // namespace vfgl

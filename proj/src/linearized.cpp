#include "vfgl/linearized.hpp"

#include <cmath>
#include <stdexcept>

#include "vfgl/errors.hpp"

namespace vfgl {

LinearizedSpectrum::LinearizedSpectrum(std::shared_ptr<GL1DSolver> gl) : gl_(std::move(gl)) {}

const LinearizedSpectrum::Basis& LinearizedSpectrum::basis(double b) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(b);
    if (it != cache_.end()) return it->second;
    auto [xi, rec] = gl_->find_xi(b);
    (void)rec;
    Basis bs;
    bs.xi = xi;
    bs.profile = gl_->minimize(xi, b);
    return cache_.emplace(b, std::move(bs)).first->second;
}

std::vector<double> LinearizedSpectrum::linearized_potential(double beta, const Basis& bs) const {
    const Grid1D& g = gl_->grid();
    const int n = g.size();
    const double b = bs.profile.b;
    std::vector<double> pot(static_cast<size_t>(n - 2));
    for (int i = 1; i < n - 1; ++i) {
        const double t = g.node(i);
        const double f = bs.profile.samples[static_cast<size_t>(i)];
        pot[static_cast<size_t>(i - 1)] =
            montgomery_potential(t, bs.xi + beta) - b * (1.0 - f * f);
    }
    return pot;
}

double LinearizedSpectrum::gamma(double beta, double b) const {
    const Basis& bs = basis(b);
    return ground_energy_of_potential(linearized_potential(beta, bs), gl_->grid());
}

EigenPair LinearizedSpectrum::ground_mode(double beta, double b) const {
    const Basis& bs = basis(b);
    return ground_state(linearized_potential(beta, bs), gl_->grid());
}

std::pair<double, double> LinearizedSpectrum::gamma_derivatives_at_zero(double b,
                                                                        double step) const {
    auto first_diff = [&](double s) {
        return (gamma(s, b) - gamma(-s, b)) / (2.0 * s);
    };
    auto second_diff = [&](double s) {
        return (gamma(s, b) - 2.0 * gamma(0.0, b) + gamma(-s, b)) / (s * s);
    };
    const double d1 = first_diff(step);
    const double d1h = first_diff(step / 2.0);
    const double d2 = second_diff(step);
    const double d2h = second_diff(step / 2.0);
    if (std::abs(d2 - d2h) > 0.10 * std::abs(d2h)) {
        throw NumericalError("gamma_derivatives_at_zero: step-halving inconsistency",
                             std::abs(d2 - d2h));
    }
    if (std::abs(d1h) > 1e-5) {
        throw NumericalError("gamma_derivatives_at_zero: first derivative not zero", std::abs(d1h));
    }
    return {d1h, d2h};
}

GammaCurve LinearizedSpectrum::gamma_scan(double b, std::span<const double> betas) const {
    GammaCurve curve;
    curve.betas.assign(betas.begin(), betas.end());
    curve.gammas.resize(betas.size());
    const Basis& bs = basis(b);
    for (size_t i = 0; i < betas.size(); ++i) {
        if (i > 0 && !(betas[i] > betas[i - 1])) {
            throw std::invalid_argument("gamma_scan: betas must be strictly increasing");
        }
        curve.gammas[i] =
            ground_energy_of_potential(linearized_potential(betas[i], bs), gl_->grid());
    }

    // The minimum must be nonnegative (to scan tolerance) and sit within one
    // grid step of beta = 0.
    double min_gamma = curve.gammas.front();
    size_t arg = 0;
    for (size_t i = 1; i < curve.gammas.size(); ++i) {
        if (curve.gammas[i] < min_gamma) {
            min_gamma = curve.gammas[i];
            arg = i;
        }
    }
    if (min_gamma < -1e-6) {
        throw NumericalError("gamma_scan: negative minimum at beta = " +
                                 std::to_string(curve.betas[arg]),
                             -min_gamma);
    }
    if (curve.betas.front() < 0.0 && curve.betas.back() > 0.0) {
        const double scan_step =
            (curve.betas.back() - curve.betas.front()) / static_cast<double>(betas.size() - 1);
        if (std::abs(curve.betas[arg]) > scan_step * (1.0 + 1e-12)) {
            throw NumericalError("gamma_scan: minimum away from beta = 0, at beta = " +
                                     std::to_string(curve.betas[arg]),
                                 std::abs(curve.betas[arg]));
        }
    }
    return curve;
}

GammaCurve LinearizedSpectrum::gamma_scan(double b, double beta_min, double beta_max,
                                          int points) const {
    if (points < 2) throw std::invalid_argument("gamma_scan: need at least 2 points");
    std::vector<double> betas(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i) {
        betas[static_cast<size_t>(i)] =
            beta_min + (beta_max - beta_min) * static_cast<double>(i) / (points - 1);
    }
    return gamma_scan(b, betas);
}

} // namespace vfgl

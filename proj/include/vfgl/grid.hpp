#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace vfgl {

// Uniform symmetric grid on [-T, T] carrying the transverse variable of all
// 1D operators in the toolkit.  The continuum problems live on the whole
// line; the quartic growth of the potential wells makes a Dirichlet
// truncation at +-T accurate as long as the well walls at the boundary stay
// high for every alpha the grid is declared to serve.
class Grid1D {
public:
    // Confinement floor: ((T^2/2 - |alpha|)^2 must stay above this for the
    // declared alpha range, so truncated tails are negligible.
    static constexpr double kDefaultPotentialFloor = 25.0;

    Grid1D(double half_width, int n, double alpha_min, double alpha_max,
           double potential_floor = kDefaultPotentialFloor);

    double half_width() const { return half_width_; }
    int size() const { return n_; }
    double spacing() const { return h_; }
    double node(int i) const { return nodes_[static_cast<size_t>(i)]; }
    const std::vector<double>& nodes() const { return nodes_; }
    double alpha_min() const { return alpha_min_; }
    double alpha_max() const { return alpha_max_; }
    double potential_floor() const { return potential_floor_; }

    bool serves_alpha(double alpha) const;
    void require_alpha(double alpha) const;

    // Trapezoid quadrature of nodal samples (weight h, halved at the ends).
    double integrate(std::span<const double> values) const;
    // Discrete L2 inner product / norms with the same weights.
    double inner(std::span<const double> a, std::span<const double> b) const;
    double l2_norm(std::span<const double> values) const;
    double l4_norm4(std::span<const double> values) const;

    // H1-type norm with the t^2-weighted term: sqrt(|f'|^2 + |f|^2 + |t^2 f|^2),
    // derivative by centered differences (one-sided at the ends).
    double b1_norm(std::span<const double> values) const;

    // Grid used for truncation-control reports: T+2 half-width, 2n-1 points.
    Grid1D refined() const;

private:
    double half_width_;
    int n_;
    double h_;
    std::vector<double> nodes_;
    double alpha_min_;
    double alpha_max_;
    double potential_floor_;
};

} // namespace vfgl

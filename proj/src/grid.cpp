#include "vfgl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vfgl {

Grid1D::Grid1D(double half_width, int n, double alpha_min, double alpha_max,
               double potential_floor)
    : half_width_(half_width),
      n_(n),
      alpha_min_(alpha_min),
      alpha_max_(alpha_max),
      potential_floor_(potential_floor) {
    if (n < 3) throw std::invalid_argument("Grid1D: need at least 3 points");
    if (!(half_width > 0.0)) throw std::invalid_argument("Grid1D: half width must be positive");
    if (!(alpha_min <= alpha_max)) throw std::invalid_argument("Grid1D: empty alpha range");

    const double amax = std::max(std::abs(alpha_min), std::abs(alpha_max));
    const double wall = half_width * half_width / 2.0 - amax;
    if (wall <= 0.0 || wall * wall < potential_floor) {
        throw std::invalid_argument(
            "Grid1D: truncation T=" + std::to_string(half_width) +
            " too small to confine the declared alpha range up to |alpha|=" +
            std::to_string(amax));
    }

    h_ = 2.0 * half_width / static_cast<double>(n - 1);
    nodes_.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        nodes_[static_cast<size_t>(i)] = -half_width + h_ * static_cast<double>(i);
    }
    // Pin the endpoints exactly; the interior stays uniform to rounding.
    nodes_.front() = -half_width;
    nodes_.back() = half_width;
}

bool Grid1D::serves_alpha(double alpha) const {
    return alpha >= alpha_min_ && alpha <= alpha_max_;
}

void Grid1D::require_alpha(double alpha) const {
    if (!serves_alpha(alpha)) {
        throw std::invalid_argument("Grid1D: alpha=" + std::to_string(alpha) +
                                    " outside declared range [" + std::to_string(alpha_min_) +
                                    ", " + std::to_string(alpha_max_) + "]");
    }
}

double Grid1D::integrate(std::span<const double> values) const {
    double acc = 0.0, comp = 0.0;
    const size_t n = values.size();
    for (size_t i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        double y = w * values[i] - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc * h_;
}

double Grid1D::inner(std::span<const double> a, std::span<const double> b) const {
    double acc = 0.0, comp = 0.0;
    const size_t n = a.size();
    for (size_t i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        double y = w * a[i] * b[i] - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc * h_;
}

double Grid1D::l2_norm(std::span<const double> values) const {
    return std::sqrt(inner(values, values));
}

double Grid1D::l4_norm4(std::span<const double> values) const {
    double acc = 0.0, comp = 0.0;
    const size_t n = values.size();
    for (size_t i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        double v2 = values[i] * values[i];
        double y = w * v2 * v2 - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc * h_;
}

double Grid1D::b1_norm(std::span<const double> values) const {
    const size_t n = values.size();
    std::vector<double> integrand(n);
    for (size_t i = 0; i < n; ++i) {
        double d;
        if (i == 0) {
            d = (values[1] - values[0]) / h_;
        } else if (i == n - 1) {
            d = (values[n - 1] - values[n - 2]) / h_;
        } else {
            d = (values[i + 1] - values[i - 1]) / (2.0 * h_);
        }
        const double t2 = nodes_[i] * nodes_[i];
        integrand[i] = d * d + values[i] * values[i] * (1.0 + t2 * t2);
    }
    return std::sqrt(integrate(integrand));
}

Grid1D Grid1D::refined() const {
    return Grid1D(half_width_ + 2.0, 2 * n_ - 1, alpha_min_, alpha_max_, potential_floor_);
}

} // namespace vfgl

#include "vfgl/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "vfgl/errors.hpp"

namespace vfgl {

Tridiagonal assemble_schrodinger(std::span<const double> interior_potential, double h) {
    const int m = static_cast<int>(interior_potential.size());
    Tridiagonal a;
    a.diag.resize(static_cast<size_t>(m));
    a.off.assign(static_cast<size_t>(m > 0 ? m - 1 : 0), -1.0 / (h * h));
    const double two_over_h2 = 2.0 / (h * h);
    for (int i = 0; i < m; ++i) {
        a.diag[static_cast<size_t>(i)] = two_over_h2 + interior_potential[static_cast<size_t>(i)];
    }
    return a;
}

Tridiagonal assemble_montgomery(double alpha, const Grid1D& grid) {
    grid.require_alpha(alpha);
    const int n = grid.size();
    std::vector<double> pot(static_cast<size_t>(n - 2));
    for (int i = 1; i < n - 1; ++i) {
        pot[static_cast<size_t>(i - 1)] = montgomery_potential(grid.node(i), alpha);
    }
    return assemble_schrodinger(pot, grid.spacing());
}

namespace {

// Embed an interior eigenvector on the full grid, normalize in the trapezoid
// L2 norm and fix the sign so the mean is positive.
std::vector<double> embed_and_normalize(const std::vector<double>& interior,
                                        const Grid1D& grid) {
    const int n = grid.size();
    std::vector<double> full(static_cast<size_t>(n), 0.0);
    std::copy(interior.begin(), interior.end(), full.begin() + 1);
    const double nrm = grid.l2_norm(full);
    double mean = 0.0;
    for (double v : full) mean += v;
    const double sign = (mean < 0.0) ? -1.0 : 1.0;
    for (double& v : full) v *= sign / nrm;
    return full;
}

bool has_sign_change(const std::vector<double>& v) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    const double tol = 1e-12 * scale;
    int last = 0;
    for (double x : v) {
        const int s = (x > tol) ? 1 : (x < -tol ? -1 : 0);
        if (s != 0) {
            if (last != 0 && s != last) return true;
            last = s;
        }
    }
    return false;
}

} // namespace

std::vector<EigenPair> lowest_eigenpairs(const Tridiagonal& op, int k, const Grid1D& grid) {
    if (k < 1 || k > 5) throw std::invalid_argument("lowest_eigenpairs: k must be in [1,5]");
    std::vector<EigenPair> pairs;
    std::vector<std::vector<double>> deflate;
    for (int idx = 1; idx <= k; ++idx) {
        const double est = kth_eigenvalue(op, idx);
        auto res = inverse_iteration(op, est, deflate);
        if (!(res.residual <= 1e-8 * (1.0 + std::abs(res.value)))) {
            throw NumericalError(
                "lowest_eigenpairs: inverse iteration stalled at index " + std::to_string(idx) +
                    " (residual " + std::to_string(res.residual) + ")",
                res.residual);
        }
        deflate.push_back(res.vector);
        EigenPair p;
        p.value = res.value;
        p.index = idx;
        p.vector = embed_and_normalize(res.vector, grid);
        pairs.push_back(std::move(p));
    }
    if (has_sign_change(pairs.front().vector)) {
        throw NumericalError("lowest_eigenpairs: ground vector changes sign");
    }
    return pairs;
}

MontgomerySolver::MontgomerySolver(Grid1D grid) : grid_(std::move(grid)) {}

EigenPair MontgomerySolver::pair_cached(double alpha, int index) const {
    const auto key = std::make_pair(alpha, index);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }

    auto op = assemble_montgomery(alpha, grid_);
    auto pairs = lowest_eigenpairs(op, index, grid_);

    std::lock_guard<std::mutex> lock(mutex_);
    // Bounded cache: evict the oldest entries beyond a soft cap.
    constexpr size_t kCap = 128;
    while (cache_.size() >= kCap) {
        cache_.erase(cache_order_.front());
        cache_order_.erase(cache_order_.begin());
    }
    EigenPair wanted;
    for (auto& p : pairs) {
        if (p.index == index) wanted = p;
        auto k = std::make_pair(alpha, p.index);
        if (cache_.find(k) == cache_.end()) {
            cache_order_.push_back(k);
            cache_.emplace(k, std::move(p));
        }
    }
    return wanted;
}

double MontgomerySolver::lambda(double alpha) const { return pair_cached(alpha, 1).value; }

double MontgomerySolver::lambda2(double alpha) const { return pair_cached(alpha, 2).value; }

EigenPair MontgomerySolver::ground(double alpha) const { return pair_cached(alpha, 1); }

EigenPair MontgomerySolver::eigenpair(double alpha, int index) const {
    return pair_cached(alpha, index);
}

ConvergenceReport MontgomerySolver::lambda_report(double alpha) const {
    ConvergenceReport rep;
    rep.value_coarse = lambda(alpha);
    Grid1D fine = grid_.refined();
    auto op = assemble_montgomery(alpha, fine);
    rep.value_fine = kth_eigenvalue(op, 1);
    // Second-order discretization: eliminate the h^2 term from the pair.
    const double hc = grid_.spacing(), hf = fine.spacing();
    const double w = hf * hf / (hc * hc - hf * hf);
    rep.richardson = rep.value_fine + (rep.value_fine - rep.value_coarse) * w;
    return rep;
}

std::pair<double, double> MontgomerySolver::find_tau0(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("find_tau0: empty bracket");
    if (hi > 0.0) throw std::invalid_argument("find_tau0: bracket must lie in (-inf, 0]");

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = lambda(x1), f2 = lambda(x2);
    while (b - a > 1e-8) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = lambda(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = lambda(x2);
        }
    }
    const double tau = 0.5 * (a + b);
    const double val = lambda(tau);
    // The minimum must be interior to the bracket, otherwise the caller needs
    // a wider one.
    if (tau - lo < 1e-6 * (hi - lo) || hi - tau < 1e-6 * (hi - lo)) {
        throw NumericalError("find_tau0: no interior minimum; widen the bracket");
    }
    if (!(tau < 0.0)) throw NumericalError("find_tau0: expected a negative minimizer");
    tau0_ = tau;
    lambda0_ = val;
    return {tau, val};
}

double MontgomerySolver::tau0() const {
    if (!tau0_) throw std::logic_error("tau0 not located yet; call find_tau0");
    return *tau0_;
}

double MontgomerySolver::lambda0() const {
    if (!lambda0_) throw std::logic_error("lambda0 not located yet; call find_tau0");
    return *lambda0_;
}

double MontgomerySolver::lambda_prime(double alpha) const {
    const EigenPair g = ground(alpha);
    const int n = grid_.size();
    std::vector<double> integrand(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = grid_.node(i);
        const double u = g.vector[static_cast<size_t>(i)];
        integrand[static_cast<size_t>(i)] = (t * t / 2.0 + alpha) * u * u;
    }
    return 2.0 * grid_.integrate(integrand);
}

double MontgomerySolver::lambda_second_derivative(double step) const {
    const double t0 = tau0();
    auto second_diff = [&](double s) {
        return (lambda(t0 + s) - 2.0 * lambda(t0) + lambda(t0 - s)) / (s * s);
    };
    const double full = second_diff(step);
    const double half = second_diff(step / 2.0);
    if (std::abs(full - half) > 0.10 * std::abs(half)) {
        throw NumericalError("lambda_second_derivative: step-halving inconsistency", std::abs(full - half));
    }
    if (!(half > 0.0)) throw NumericalError("lambda_second_derivative: expected a positive value");
    return half;
}

std::pair<double, double> MontgomerySolver::z_interval(double b) const {
    const double t0 = tau0();
    const double l0 = lambda0();
    if (!(b > l0)) throw std::invalid_argument("z_interval: need b > lambda0");

    auto bisect = [&](double in_pt, double out_pt) {
        // lambda(in_pt) < b <= lambda(out_pt); refine the crossing.  The two
        // endpoints are not ordered (out_pt may sit on either side of tau0).
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (in_pt + out_pt);
            const double fm = lambda(mid) - b;
            if (std::abs(fm) <= 5e-10 || std::abs(out_pt - in_pt) < 1e-13) return mid;
            if (fm < 0.0) {
                in_pt = mid;
            } else {
                out_pt = mid;
            }
        }
        return 0.5 * (in_pt + out_pt);
    };

    // March outwards from tau0 until lambda exceeds b on each side.
    double right = t0;
    double step = std::max(1e-3, 0.1 * std::sqrt(b - l0));
    while (lambda(right) < b) {
        right += step;
        if (!grid_.serves_alpha(right)) {
            throw NumericalError("z_interval: b above the scanned lambda range on the right");
        }
    }
    double left = t0;
    while (lambda(left) < b) {
        left -= step;
        if (!grid_.serves_alpha(left)) {
            throw NumericalError("z_interval: b above the scanned lambda range on the left");
        }
    }
    const double z2 = bisect(t0, right);
    const double z1 = bisect(t0, left);
    return {std::min(z1, z2), std::max(z1, z2)};
}

std::vector<double> MontgomerySolver::resolvent_apply(double alpha, double b,
                                                      std::span<const double> g) const {
    const int n = grid_.size();
    if (static_cast<int>(g.size()) != n) {
        throw std::invalid_argument("resolvent_apply: sample count does not match the grid");
    }
    const double l2v = lambda2(alpha);
    if (!(b < l2v)) {
        throw std::invalid_argument("resolvent_apply: need b < lambda2(alpha)");
    }
    if (l2v - b < 1e-10) {
        throw NumericalError("resolvent_apply: b within 1e-10 of lambda2(alpha); ill-conditioned");
    }
    const EigenPair u = ground(alpha);

    // Project out the ground mode, solve on the interior, re-project.
    std::vector<double> r(g.begin(), g.end());
    const double overlap = grid_.inner(r, u.vector);
    for (int i = 0; i < n; ++i) r[static_cast<size_t>(i)] -= overlap * u.vector[static_cast<size_t>(i)];

    std::vector<double> rhs(r.begin() + 1, r.end() - 1);
    auto op = assemble_montgomery(alpha, grid_);
    std::vector<double> y_int = shifted_solve(op, b, rhs);

    std::vector<double> w(static_cast<size_t>(n), 0.0);
    std::copy(y_int.begin(), y_int.end(), w.begin() + 1);
    const double c = grid_.inner(w, u.vector);
    for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] -= c * u.vector[static_cast<size_t>(i)];
    return w;
}

SpectralCurve MontgomerySolver::scan(double alpha_min, double alpha_max, int points,
                                     bool with_second) const {
    if (points < 2) throw std::invalid_argument("scan: need at least 2 points");
    SpectralCurve curve;
    curve.alphas.resize(static_cast<size_t>(points));
    curve.lambda1.resize(static_cast<size_t>(points));
    if (with_second) curve.lambda2.resize(static_cast<size_t>(points));
    const double step = (alpha_max - alpha_min) / static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i) {
        const double a = alpha_min + step * i;
        curve.alphas[static_cast<size_t>(i)] = a;
        auto op = assemble_montgomery(a, grid_);
        curve.lambda1[static_cast<size_t>(i)] = kth_eigenvalue(op, 1);
        if (with_second) curve.lambda2[static_cast<size_t>(i)] = kth_eigenvalue(op, 2);
    }
    return curve;
}

EigenPair ground_state(std::span<const double> interior_potential, const Grid1D& grid) {
    auto op = assemble_schrodinger(interior_potential, grid.spacing());
    auto pairs = lowest_eigenpairs(op, 1, grid);
    return std::move(pairs.front());
}

double ground_energy_of_potential(std::span<const double> interior_potential, const Grid1D& grid) {
    auto op = assemble_schrodinger(interior_potential, grid.spacing());
    return kth_eigenvalue(op, 1);
}

} // namespace vfgl

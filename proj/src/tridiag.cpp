#include "vfgl/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vfgl {

void Tridiagonal::apply(std::span<const double> x, std::span<double> y) const {
    const int m = size();
    for (int i = 0; i < m; ++i) {
        double v = diag[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
        if (i > 0) v += off[static_cast<size_t>(i - 1)] * x[static_cast<size_t>(i - 1)];
        if (i < m - 1) v += off[static_cast<size_t>(i)] * x[static_cast<size_t>(i + 1)];
        y[static_cast<size_t>(i)] = v;
    }
}

double Tridiagonal::quadratic_form(std::span<const double> x) const {
    const int m = size();
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        acc += diag[static_cast<size_t>(i)] * x[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
        if (i < m - 1) acc += 2.0 * off[static_cast<size_t>(i)] * x[static_cast<size_t>(i)] * x[static_cast<size_t>(i + 1)];
    }
    return acc;
}

int sturm_count_below(const Tridiagonal& a, double x) {
    const int m = a.size();
    int count = 0;
    double q = a.diag[0] - x;
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    for (int i = 0;;) {
        if (q < 0.0) ++count;
        if (i == m - 1) break;
        const double e = a.off[static_cast<size_t>(i)];
        double denom = q;
        if (denom == 0.0) denom = tiny;
        q = a.diag[static_cast<size_t>(i + 1)] - x - e * e / denom;
        ++i;
    }
    return count;
}

static void gershgorin_bounds(const Tridiagonal& a, double& lo, double& hi) {
    const int m = a.size();
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (int i = 0; i < m; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(a.off[static_cast<size_t>(i - 1)]);
        if (i < m - 1) r += std::abs(a.off[static_cast<size_t>(i)]);
        lo = std::min(lo, a.diag[static_cast<size_t>(i)] - r);
        hi = std::max(hi, a.diag[static_cast<size_t>(i)] + r);
    }
}

double kth_eigenvalue(const Tridiagonal& a, int k) {
    if (k < 1 || k > a.size()) throw std::invalid_argument("kth_eigenvalue: bad index");
    double lo, hi;
    gershgorin_bounds(a, lo, hi);
    const double scale = std::max(std::abs(lo), std::abs(hi));
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * scale +
                       std::numeric_limits<double>::min();
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (sturm_count_below(a, mid) >= k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> lowest_eigenvalues(const Tridiagonal& a, int k) {
    std::vector<double> vals(static_cast<size_t>(k));
    for (int i = 1; i <= k; ++i) vals[static_cast<size_t>(i - 1)] = kth_eigenvalue(a, i);
    return vals;
}

std::vector<double> shifted_solve(const Tridiagonal& a, double shift,
                                  std::span<const double> rhs) {
    const int m = a.size();
    // Working bands: sub (below), d (diag), sup, sup2 (fill-in from pivoting).
    std::vector<double> d(a.diag), sup(m > 1 ? a.off : std::vector<double>{}),
        sub(m > 1 ? a.off : std::vector<double>{}), sup2(static_cast<size_t>(std::max(m - 2, 0)), 0.0);
    std::vector<double> x(rhs.begin(), rhs.end());
    for (auto& v : d) v -= shift;

    // LU with partial pivoting; eliminate sub[i] against row i.
    for (int i = 0; i < m - 1; ++i) {
        if (std::abs(sub[static_cast<size_t>(i)]) > std::abs(d[static_cast<size_t>(i)])) {
            // Swap rows i and i+1.
            std::swap(d[static_cast<size_t>(i)], sub[static_cast<size_t>(i)]);
            double old_sup = sup[static_cast<size_t>(i)];
            sup[static_cast<size_t>(i)] = d[static_cast<size_t>(i + 1)];
            d[static_cast<size_t>(i + 1)] = old_sup;
            if (i < m - 2) {
                sup2[static_cast<size_t>(i)] = sup[static_cast<size_t>(i + 1)];
                sup[static_cast<size_t>(i + 1)] = 0.0;
            }
            std::swap(x[static_cast<size_t>(i)], x[static_cast<size_t>(i + 1)]);
        }
        double piv = d[static_cast<size_t>(i)];
        if (piv == 0.0) piv = std::numeric_limits<double>::min();
        const double mfac = sub[static_cast<size_t>(i)] / piv;
        d[static_cast<size_t>(i + 1)] -= mfac * sup[static_cast<size_t>(i)];
        if (i < m - 2) sup[static_cast<size_t>(i + 1)] -= mfac * sup2[static_cast<size_t>(i)];
        x[static_cast<size_t>(i + 1)] -= mfac * x[static_cast<size_t>(i)];
    }

    // Back substitution.
    for (int i = m - 1; i >= 0; --i) {
        double v = x[static_cast<size_t>(i)];
        if (i < m - 1) v -= sup[static_cast<size_t>(i)] * x[static_cast<size_t>(i + 1)];
        if (i < m - 2) v -= sup2[static_cast<size_t>(i)] * x[static_cast<size_t>(i + 2)];
        double piv = d[static_cast<size_t>(i)];
        if (piv == 0.0) piv = std::numeric_limits<double>::min();
        x[static_cast<size_t>(i)] = v / piv;
    }
    return x;
}

static void orthogonalize(std::vector<double>& v,
                          std::span<const std::vector<double>> basis) {
    for (const auto& u : basis) {
        double dot = 0.0;
        for (size_t i = 0; i < v.size(); ++i) dot += v[i] * u[i];
        for (size_t i = 0; i < v.size(); ++i) v[i] -= dot * u[i];
    }
}

static double normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s > 0.0) {
        for (double& x : v) x /= s;
    }
    return s;
}

InverseIterationResult inverse_iteration(const Tridiagonal& a,
                                         double eigenvalue_estimate,
                                         std::span<const std::vector<double>> deflate) {
    const int m = a.size();
    InverseIterationResult best;

    for (int restart = 0; restart < 3 && !best.converged; ++restart) {
        InverseIterationResult res;
        res.vector.assign(static_cast<size_t>(m), 0.0);

        // Deterministic quasi-random start vector (splitmix64 stream).
        uint64_t state = 0x9E3779B97F4A7C15ull * static_cast<uint64_t>(restart + 1);
        for (int i = 0; i < m; ++i) {
            state += 0x9E3779B97F4A7C15ull;
            uint64_t z = state;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
            z = z ^ (z >> 31);
            res.vector[static_cast<size_t>(i)] =
                static_cast<double>(z >> 11) / 9007199254740992.0 - 0.5;
        }
        orthogonalize(res.vector, deflate);
        normalize(res.vector);

        double value = eigenvalue_estimate;
        std::vector<double> av(static_cast<size_t>(m));
        for (int iter = 0; iter < 12; ++iter) {
            std::vector<double> next = shifted_solve(a, value, res.vector);
            orthogonalize(next, deflate);
            const double growth = normalize(next);
            if (growth == 0.0) break;
            res.vector = std::move(next);

            a.apply(res.vector, av);
            double rq = 0.0;
            for (int i = 0; i < m; ++i) rq += res.vector[static_cast<size_t>(i)] * av[static_cast<size_t>(i)];
            double rs = 0.0;
            for (int i = 0; i < m; ++i) {
                const double r = av[static_cast<size_t>(i)] - rq * res.vector[static_cast<size_t>(i)];
                rs += r * r;
            }
            res.residual = std::sqrt(rs);
            res.value = rq;
            if (res.residual <= 1e-10 * (1.0 + std::abs(rq))) {
                res.converged = true;
                break;
            }
            // Rayleigh shift only once the estimate is close, so we do not
            // jump to a different branch of the spectrum.
            if (std::abs(rq - eigenvalue_estimate) < 1e-6 * (1.0 + std::abs(rq))) value = rq;
        }
        if (best.vector.empty() || res.residual < best.residual || res.converged) best = std::move(res);
    }
    return best;
}

} // namespace vfgl

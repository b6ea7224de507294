#include "vfgl/gl1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vfgl/errors.hpp"

namespace vfgl {

namespace {

double kahan_sum(const std::vector<double>& terms) {
    double acc = 0.0, comp = 0.0;
    for (double v : terms) {
        double y = v - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc;
}

struct EnergyParts {
    double quad = 0.0; // <f, A f> = kinetic + potential
    double n2 = 0.0;   // ||f||_2^2
    double n4 = 0.0;   // ||f||_4^4
};

// Compensated forward-difference evaluation of the quadratic form; the
// matrix form would cancel O(1/h^2) terms and lose digits the stationarity
// identity cannot afford.
EnergyParts energy_parts(std::span<const double> f, std::span<const double> potential,
                         const Grid1D& grid) {
    const int n = grid.size();
    const double h = grid.spacing();
    EnergyParts parts;

    double acc = 0.0, comp = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double d = (f[static_cast<size_t>(i + 1)] - f[static_cast<size_t>(i)]) / h;
        double y = d * d - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    double pacc = 0.0, pcomp = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        const double fi = f[static_cast<size_t>(i)];
        double y = w * potential[static_cast<size_t>(i)] * fi * fi - pcomp;
        double t = pacc + y;
        pcomp = (t - pacc) - y;
        pacc = t;
    }
    parts.quad = h * (acc + pacc);
    parts.n2 = grid.inner(f, f);
    parts.n4 = grid.l4_norm4(f);
    return parts;
}

std::vector<double> residual_vector(std::span<const double> f, std::span<const double> potential,
                                    double b, const Grid1D& grid) {
    const int n = grid.size();
    const double h2 = grid.spacing() * grid.spacing();
    std::vector<double> r(static_cast<size_t>(n), 0.0);
    for (int i = 1; i < n - 1; ++i) {
        const double fi = f[static_cast<size_t>(i)];
        const double lap =
            (2.0 * fi - f[static_cast<size_t>(i - 1)] - f[static_cast<size_t>(i + 1)]) / h2;
        r[static_cast<size_t>(i)] =
            lap + potential[static_cast<size_t>(i)] * fi - b * fi * (1.0 - fi * fi);
    }
    return r;
}

// Shared flow + damped-Newton core.  `u_full` is the normalized ground state
// of -D^2 + potential with eigenvalue `lam` (the linear threshold).
std::vector<double> core_minimize(const Tridiagonal& op, std::span<const double> potential,
                                  double b, const Grid1D& g, double lam,
                                  const std::vector<double>& u_full, double u44,
                                  const MinimizeOptions& opts) {
    const int n = g.size();

    std::vector<double> f;
    if (opts.init) {
        f = *opts.init;
        if (static_cast<int>(f.size()) != n) {
            throw std::invalid_argument("minimize: init size does not match the grid");
        }
        for (double& v : f) v = std::max(v, 0.0);
    } else {
        const double amp = std::sqrt((b - lam) / b) / std::sqrt(u44) * opts.init_amplitude_factor;
        f.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) f[static_cast<size_t>(i)] = amp * u_full[static_cast<size_t>(i)];
    }

    // Leading-order amplitude; the nontrivial branch lives at this scale, so
    // falling far below it means the iteration slid into the trivial basin
    // (f = 0 solves the equation exactly and must not win on residual).
    const double branch_l2 = std::sqrt((b - lam) / b) / std::sqrt(u44);

    auto residual_norm = [&](const std::vector<double>& x) {
        auto r = residual_vector(x, potential, b, g);
        return g.l2_norm(r);
    };

    std::vector<std::string> history;
    std::vector<double> best = f;
    double best_rel = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int restart = 0; restart <= opts.max_restarts && !converged; ++restart) {
        // Semi-implicit gradient flow: treats the stiff linear operator
        // implicitly, so the step is not limited by 1/h^2.
        const double tau = 0.5 / (1.0 + restart * 2.0);
        const int flow_steps = 40 * (restart + 1);
        Tridiagonal flow_mat = op;
        for (auto& d : flow_mat.diag) d = 1.0 / tau + d; // (I/tau + A)
        for (int s = 0; s < flow_steps; ++s) {
            std::vector<double> rhs(static_cast<size_t>(n - 2));
            for (int i = 1; i < n - 1; ++i) {
                const double fi = f[static_cast<size_t>(i)];
                rhs[static_cast<size_t>(i - 1)] = fi / tau + b * (fi - fi * fi * fi);
            }
            auto sol = shifted_solve(flow_mat, 0.0, rhs);
            for (int i = 1; i < n - 1; ++i) {
                f[static_cast<size_t>(i)] = std::max(sol[static_cast<size_t>(i - 1)], 0.0);
            }
        }

        // Damped Newton on the Euler-Lagrange system; the Jacobian is the
        // same tridiagonal operator with a state-dependent diagonal.
        double rn = residual_norm(f);
        for (int it = 0; it < opts.max_newton; ++it) {
            const double cur_l2 = g.l2_norm(f);
            const double target = std::max(1e-13, opts.residual_tol * cur_l2);
            if (rn <= target && cur_l2 >= 0.2 * branch_l2) {
                converged = true;
                break;
            }
            Tridiagonal jac = op;
            for (int i = 1; i < n - 1; ++i) {
                const double fi = f[static_cast<size_t>(i)];
                jac.diag[static_cast<size_t>(i - 1)] += -b + 3.0 * b * fi * fi;
            }
            auto r = residual_vector(f, potential, b, g);
            std::vector<double> rhs(r.begin() + 1, r.end() - 1);
            for (double& v : rhs) v = -v;
            auto d = shifted_solve(jac, 0.0, rhs);

            double step = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 10; ++ls) {
                std::vector<double> trial = f;
                for (int i = 1; i < n - 1; ++i) {
                    trial[static_cast<size_t>(i)] += step * d[static_cast<size_t>(i - 1)];
                }
                const double rt = residual_norm(trial);
                // Full Armijo progress, or any progress once near the
                // floating-point floor of the residual evaluation.
                if (rt < (1.0 - 0.25 * step) * rn || (rn < 1e3 * target && rt < rn)) {
                    f = std::move(trial);
                    rn = rt;
                    accepted = true;
                    break;
                }
                step /= 2.0;
            }
            if (!accepted) break;
            // Collapse toward the trivial branch means the basin was lost.
            if (g.l2_norm(f) < 0.05 * branch_l2) break;
        }
        {
            const double cur_l2 = g.l2_norm(f);
            const double rel = rn / std::max(cur_l2, 1e-30);
            if (cur_l2 >= 0.2 * branch_l2 && rel < best_rel) {
                best = f;
                best_rel = rel;
            }
        }
        if (!converged) {
            history.push_back("restart " + std::to_string(restart) + ": residual " +
                              std::to_string(rn));
            if (restart < opts.max_restarts && g.l2_norm(f) < 0.5 * branch_l2) {
                // Re-seed after a collapse.
                for (int i = 0; i < n; ++i) {
                    f[static_cast<size_t>(i)] = branch_l2 * u_full[static_cast<size_t>(i)];
                }
            }
        }
    }
    if (!converged) {
        f = best;
        if (best_rel > opts.accept_tol) {
            std::string msg = "minimize: no convergence after restarts;";
            for (const auto& s : history) msg += " [" + s + "]";
            throw NumericalError(msg, best_rel);
        }
    }

    // The functional is even in f; fix the positive representative before
    // the nonnegativity handling downstream.
    {
        double mean = 0.0;
        for (double v : f) mean += v;
        if (mean < 0.0) {
            for (double& v : f) v = -v;
        }
    }

    // Exact line search along the ray c*f: picks the scale at which the
    // stationarity identity holds, which also minimizes the energy on the ray.
    {
        const auto parts = energy_parts(f, potential, g);
        const double a = kahan_sum({parts.quad, -b * parts.n2});
        const double q = b * parts.n4;
        if (a < 0.0 && q > 0.0) {
            const double c = std::sqrt(-a / q);
            for (double& v : f) v *= c;
        }
    }
    return f;
}

std::vector<double> montgomery_potential_samples(double alpha, const Grid1D& grid) {
    const int n = grid.size();
    std::vector<double> w(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] = montgomery_potential(grid.node(i), alpha);
    return w;
}

} // namespace

GL1DSolver::GL1DSolver(std::shared_ptr<MontgomerySolver> spectral)
    : spectral_(std::move(spectral)) {}

double GL1DSolver::energy(std::span<const double> f, double alpha, double b) const {
    const auto w = montgomery_potential_samples(alpha, grid());
    const auto parts = energy_parts(f, w, grid());
    return kahan_sum({parts.quad, -b * parts.n2, 0.5 * b * parts.n4});
}

std::vector<double> GL1DSolver::el_residual_vector(std::span<const double> f, double alpha,
                                                   double b) const {
    const auto w = montgomery_potential_samples(alpha, grid());
    return residual_vector(f, w, b, grid());
}

GLProfile GL1DSolver::finalize_profile(std::vector<double> f, double alpha, double b) const {
    const Grid1D& g = grid();
    GLProfile p;
    p.alpha = alpha;
    p.b = b;

    // Project onto the nonnegative cone; legitimate solutions only carry
    // solver noise below zero, so a material negative part is a failure.
    double neg2 = 0.0, pos2 = 0.0;
    for (double v : f) {
        if (v < 0.0) {
            neg2 += v * v;
        } else {
            pos2 += v * v;
        }
    }
    if (neg2 > 1e-14 * pos2 && pos2 > 0.0) {
        throw NumericalError("minimize_profile: converged profile has a material negative part",
                             std::sqrt(neg2));
    }
    for (double& v : f) v = std::max(v, 0.0);

    p.samples = std::move(f);
    p.l2 = g.l2_norm(p.samples);
    p.l4_fourth = g.l4_norm4(p.samples);
    p.linf = 0.0;
    for (double v : p.samples) p.linf = std::max(p.linf, v);
    if (p.linf > 1.0 + 1e-10) {
        throw NumericalError("minimize_profile: sup bound ||f||_inf <= 1 violated", p.linf - 1.0);
    }
    if (p.linf > 0.0) {
        auto r = el_residual_vector(p.samples, alpha, b);
        p.el_residual = g.l2_norm(r);
        if (p.el_residual > 1e-7 * p.l2) {
            throw NumericalError("minimize_profile: Euler-Lagrange residual above tolerance",
                                 p.el_residual);
        }
        p.delta = g.inner(p.samples, spectral_->ground(alpha).vector);
    }
    return p;
}

GLProfile GL1DSolver::minimize(double alpha, double b, const MinimizeOptions& opts) const {
    const Grid1D& g = grid();
    const int n = g.size();
    const double lam = spectral_->lambda(alpha);

    if (b <= lam + 1e-10) {
        GLProfile p;
        p.alpha = alpha;
        p.b = b;
        p.samples.assign(static_cast<size_t>(n), 0.0);
        return p;
    }

    const EigenPair u = spectral_->ground(alpha);
    const double u44 = g.l4_norm4(u.vector);
    const auto w = montgomery_potential_samples(alpha, g);
    auto op = assemble_montgomery(alpha, g);
    auto f = core_minimize(op, w, b, g, lam, u.vector, u44, opts);
    return finalize_profile(std::move(f), alpha, b);
}

PotentialGL minimize_gl_potential(std::span<const double> interior_potential, double b,
                                  const Grid1D& grid, const MinimizeOptions& opts) {
    const int n = grid.size();
    PotentialGL out;
    auto op = assemble_schrodinger(interior_potential, grid.spacing());
    out.lambda = kth_eigenvalue(op, 1);

    std::vector<double> w_full(static_cast<size_t>(n), 0.0);
    for (int i = 1; i < n - 1; ++i) {
        w_full[static_cast<size_t>(i)] = interior_potential[static_cast<size_t>(i - 1)];
    }

    if (b <= out.lambda + 1e-10) {
        out.samples.assign(static_cast<size_t>(n), 0.0);
        out.energy = 0.0;
        out.residual = 0.0;
        return out;
    }

    auto pairs = lowest_eigenpairs(op, 1, grid);
    const double u44 = grid.l4_norm4(pairs.front().vector);
    out.samples = core_minimize(op, w_full, b, grid, out.lambda, pairs.front().vector, u44, opts);
    double neg2 = 0.0, pos2 = 0.0;
    for (double v : out.samples) {
        (v < 0.0 ? neg2 : pos2) += v * v;
    }
    if (neg2 > 1e-14 * pos2 && pos2 > 0.0) {
        throw NumericalError("minimize_gl_potential: converged profile has a material negative part",
                             std::sqrt(neg2));
    }
    for (double& v : out.samples) v = std::max(v, 0.0);
    const auto parts = energy_parts(out.samples, w_full, grid);
    out.energy = kahan_sum({parts.quad, -b * parts.n2, 0.5 * b * parts.n4});
    out.residual = grid.l2_norm(residual_vector(out.samples, w_full, b, grid));
    return out;
}

GroundEnergyRecord GL1DSolver::record_for(const GLProfile& profile) const {
    const Grid1D& g = grid();
    GroundEnergyRecord rec;
    rec.alpha = profile.alpha;
    rec.b = profile.b;
    rec.energy = energy(profile.samples, profile.alpha, profile.b);
    rec.f4norm = profile.l4_fourth;

    const int n = g.size();
    std::vector<double> integrand(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = g.node(i);
        const double fi = profile.samples[static_cast<size_t>(i)];
        integrand[static_cast<size_t>(i)] = (t * t / 2.0 + profile.alpha) * fi * fi;
    }
    rec.feynman_hellmann_residual = g.integrate(integrand);
    return rec;
}

GroundEnergyRecord GL1DSolver::ground_energy(double alpha, double b) const {
    return record_for(minimize(alpha, b));
}

ResolventIdentityReport GL1DSolver::verify_resolvent_identities(const GLProfile& profile) const {
    const Grid1D& g = grid();
    ResolventIdentityReport rep;
    if (profile.trivial()) return rep;

    const double lam = spectral_->lambda(profile.alpha);
    const EigenPair u = spectral_->ground(profile.alpha);

    const int n = g.size();
    std::vector<double> f3(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double v = profile.samples[static_cast<size_t>(i)];
        f3[static_cast<size_t>(i)] = v * v * v;
    }
    const double f3u = g.inner(f3, u.vector);
    rep.scalar_residual = std::abs((profile.b - lam) * profile.delta - profile.b * f3u);

    auto w = spectral_->resolvent_apply(profile.alpha, profile.b, f3);
    std::vector<double> resid(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        resid[static_cast<size_t>(i)] = profile.samples[static_cast<size_t>(i)] +
                                        profile.b * w[static_cast<size_t>(i)] -
                                        profile.delta * u.vector[static_cast<size_t>(i)];
    }
    rep.function_residual = g.l2_norm(resid);
    return rep;
}

GLProfile GL1DSolver::picard_solve(double alpha, double b) const {
    const Grid1D& g = grid();
    const int n = g.size();
    const double lam = spectral_->lambda(alpha);

    if (b <= lam + 1e-10) {
        GLProfile p;
        p.alpha = alpha;
        p.b = b;
        p.samples.assign(static_cast<size_t>(n), 0.0);
        return p;
    }

    const EigenPair u = spectral_->ground(alpha);
    const double u44 = g.l4_norm4(u.vector);
    double delta = std::sqrt((b - lam) / (b * u44));

    // Split f = delta u + v with v orthogonal to u.  For fixed delta the
    // G-map v -> -b R((delta u + v)^3) contracts; plugging f back into the
    // raw delta formula instead would repel (the cubic map has slope 3 at
    // the fixed point), so delta is advanced by a scalar Newton step on
    // (b - lambda) delta = b <f^3, u>.
    std::vector<double> v(static_cast<size_t>(n), 0.0);
    std::vector<double> f(static_cast<size_t>(n)), f3(static_cast<size_t>(n));
    auto rebuild_f = [&]() {
        for (int i = 0; i < n; ++i) {
            f[static_cast<size_t>(i)] =
                delta * u.vector[static_cast<size_t>(i)] + v[static_cast<size_t>(i)];
        }
    };
    rebuild_f();

    bool converged = false;
    std::vector<double> f_prev = f;
    for (int outer = 0; outer < 100 && !converged; ++outer) {
        // Inner sweeps: converge v at fixed delta; this is the contraction
        // whose failure signals leaving the perturbative regime.
        double prev_step = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 100; ++it) {
            rebuild_f();
            for (int i = 0; i < n; ++i) {
                const double x = f[static_cast<size_t>(i)];
                f3[static_cast<size_t>(i)] = x * x * x;
            }
            auto w = spectral_->resolvent_apply(alpha, b, f3);
            double diff2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double next = -b * w[static_cast<size_t>(i)];
                const double d = next - v[static_cast<size_t>(i)];
                diff2 += d * d;
                v[static_cast<size_t>(i)] = next;
            }
            const double step = std::sqrt(g.spacing() * diff2);
            if (it >= 1 && step > 1e-12 && step > 0.9 * prev_step) {
                throw NumericalError(
                    "picard_solve: fixed-point map does not contract; outside the perturbative "
                    "regime, use minimize_profile",
                    step);
            }
            prev_step = step;
            if (step <= 1e-13 * std::max(1.0, delta)) break;
        }

        // Scalar Newton step for delta on phi(delta) = (b-lambda) delta - b <f^3, u>.
        rebuild_f();
        for (int i = 0; i < n; ++i) {
            const double x = f[static_cast<size_t>(i)];
            f3[static_cast<size_t>(i)] = x * x * x;
        }
        const double phi = (b - lam) * delta - b * g.inner(f3, u.vector);
        std::vector<double> f2u(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double x = f[static_cast<size_t>(i)];
            const double ui = u.vector[static_cast<size_t>(i)];
            f2u[static_cast<size_t>(i)] = x * x * ui * ui;
        }
        const double dphi = (b - lam) - 3.0 * b * g.integrate(f2u);
        if (dphi == 0.0) throw NumericalError("picard_solve: singular delta equation");
        delta -= phi / dphi;
        rebuild_f();

        double diff2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = f[static_cast<size_t>(i)] - f_prev[static_cast<size_t>(i)];
            diff2 += d * d;
        }
        const double total_step = std::sqrt(g.spacing() * diff2);
        f_prev = f;
        if (total_step <= 1e-10) converged = true;
    }
    if (!converged) {
        throw NumericalError("picard_solve: no convergence within the iteration budget");
    }
    return finalize_profile(std::move(f), alpha, b);
}

std::pair<double, GroundEnergyRecord> GL1DSolver::find_xi(double b, double b_cap_margin) const {
    const double l0 = spectral_->lambda0();
    if (!(b > l0)) throw std::invalid_argument("find_xi: need b > lambda0");
    if (b > l0 + b_cap_margin) {
        throw std::invalid_argument("find_xi: b above the configured cap lambda0 + " +
                                    std::to_string(b_cap_margin));
    }
    const auto [z1, z2] = spectral_->z_interval(b);

    MinimizeOptions warm;
    auto energy_at = [&](double alpha) {
        GLProfile p = minimize(alpha, b, warm);
        const double e = energy(p.samples, alpha, b);
        if (!p.trivial()) warm.init = p.samples;
        return e;
    };

    // Coarse unimodality guard.
    constexpr int kScan = 41;
    std::vector<double> es(kScan);
    for (int i = 0; i < kScan; ++i) {
        const double a = z1 + (z2 - z1) * static_cast<double>(i) / (kScan - 1);
        es[static_cast<size_t>(i)] = energy_at(a);
    }
    int minima = 0;
    for (int i = 1; i + 1 < kScan; ++i) {
        if (es[static_cast<size_t>(i)] < es[static_cast<size_t>(i - 1)] - 1e-14 &&
            es[static_cast<size_t>(i)] < es[static_cast<size_t>(i + 1)] - 1e-14) {
            ++minima;
        }
    }
    if (minima > 1) {
        throw NumericalError("find_xi: coarse scan found " + std::to_string(minima) +
                             " local minima; refusing to run golden section");
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = z1, c = z2;
    double x1 = c - inv_phi * (c - a);
    double x2 = a + inv_phi * (c - a);
    double f1 = energy_at(x1), f2 = energy_at(x2);
    while (c - a > 1e-7) {
        if (f1 <= f2) {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - inv_phi * (c - a);
            f1 = energy_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (c - a);
            f2 = energy_at(x2);
        }
    }
    const double xi = 0.5 * (a + c);
    GLProfile best = minimize(xi, b, warm);
    GroundEnergyRecord rec = record_for(best);
    if (std::abs(rec.feynman_hellmann_residual) > 1e-5 * best.l2 * best.l2) {
        throw NumericalError("find_xi: Feynman-Hellmann condition violated at the optimum",
                             rec.feynman_hellmann_residual);
    }
    return {xi, rec};
}

std::vector<RatioRow> GL1DSolver::asymptotic_ratio(std::span<const double> b_sequence) const {
    const double l0 = spectral_->lambda0();
    const double tau = spectral_->tau0();
    const double u044 = grid().l4_norm4(spectral_->ground(tau).vector);

    for (size_t i = 0; i < b_sequence.size(); ++i) {
        if (!(b_sequence[i] > l0 && b_sequence[i] <= l0 + 0.05)) {
            throw std::invalid_argument("asymptotic_ratio: b values must lie in (lambda0, lambda0+0.05]");
        }
        if (i > 0 && !(b_sequence[i] < b_sequence[i - 1])) {
            throw std::invalid_argument("asymptotic_ratio: b sequence must decrease toward lambda0");
        }
    }

    std::vector<RatioRow> rows;
    for (double b : b_sequence) {
        auto [xi, rec] = find_xi(b);
        RatioRow row;
        row.b = b;
        row.xi = xi;
        row.energy = rec.energy;
        row.model = -(b - l0) * (b - l0) / (2.0 * b * u044);
        row.ratio = rec.energy / row.model;
        row.f4_ratio = rec.f4norm * b * b * u044 / ((b - l0) * (b - l0));
        rows.push_back(row);
    }
    for (size_t i = 1; i < rows.size(); ++i) {
        if (!(std::abs(rows[i].ratio - 1.0) <= std::abs(rows[i - 1].ratio - 1.0) + 1e-3)) {
            throw NumericalError("asymptotic_ratio: deviation |r-1| failed to shrink along the sequence",
                                 std::abs(rows[i].ratio - 1.0));
        }
    }
    return rows;
}

} // namespace vfgl

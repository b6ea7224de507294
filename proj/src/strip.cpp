#include "vfgl/strip.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>
#include <random>
#include <stdexcept>

#include "vfgl/errors.hpp"

namespace vfgl {

namespace {

using cplx = std::complex<double>;

double kahan(const std::vector<double>& terms) {
    double acc = 0.0, comp = 0.0;
    for (double v : terms) {
        double y = v - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc;
}

// Discrete transverse dispersion of the x1 link derivative at Floquet
// exponent z: (2 - 2 cos((z + x2^2/2) hx)) / hx^2.
double dispersion(double z, double x2, double hx) {
    const double th = (z + x2 * x2 / 2.0) * hx;
    const double s = std::sin(0.5 * th);
    return 4.0 * s * s / (hx * hx);
}

std::vector<double> fiber_potential(double z, double hx, const Grid1D& ygrid) {
    const int ny = ygrid.size();
    std::vector<double> w(static_cast<size_t>(ny - 2));
    for (int j = 1; j < ny - 1; ++j) {
        w[static_cast<size_t>(j - 1)] = dispersion(z, ygrid.node(j), hx);
    }
    return w;
}

} // namespace

StripSolver::StripSolver(std::shared_ptr<GL1DSolver> reference) : gl_(std::move(reference)) {}

std::pair<double, GroundEnergyRecord> StripSolver::xi_record(double b) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = xi_cache_.find(b);
    if (it != xi_cache_.end()) return it->second;
    if (!gl_->spectral().has_tau0()) gl_->spectral().find_tau0(-2.0, 0.0);
    auto res = gl_->find_xi(b);
    xi_cache_.emplace(b, res);
    return res;
}

double StripSolver::lambda_second_cached() const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (lambda_second_ == 0.0) {
        MontgomerySolver& spectral = gl_->spectral();
        if (!spectral.has_tau0()) spectral.find_tau0(-2.0, 0.0);
        lambda_second_ = spectral.lambda_second_derivative();
    }
    return lambda_second_;
}

std::vector<double> StripSolver::transverse_profile(double b, const Grid1D& ygrid) const {
    const auto [xi, rec] = xi_record(b);
    (void)rec;
    const int ny = ygrid.size();
    std::vector<double> w(static_cast<size_t>(ny - 2));
    for (int j = 1; j < ny - 1; ++j) {
        w[static_cast<size_t>(j - 1)] = montgomery_potential(ygrid.node(j), xi);
    }
    return minimize_gl_potential(w, b, ygrid).samples;
}

double StripSolver::energy(const StripField& field, double b) const {
    const StripGrid& g = field.grid;
    const double hx = g.hx(), hy = g.hy();
    const bool periodic = g.boundary == StripBoundary::Periodic;
    const cplx wrap = periodic ? std::exp(cplx(0.0, 2.0 * g.R * field.twist)) : cplx(0.0, 0.0);

    double kin_x = 0.0, cx = 0.0;
    double kin_y = 0.0, cy = 0.0;
    double pot = 0.0, cp = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double x2 = g.x2(j);
        const cplx link = std::exp(cplx(0.0, hx * x2 * x2 / 2.0));
        const int iedge_max = periodic ? g.nx : g.nx - 1;
        for (int i = 0; i < iedge_max; ++i) {
            const cplx here = field.u[g.index(i, j)];
            cplx next = (i + 1 < g.nx) ? field.u[g.index(i + 1, j)] : wrap * field.u[g.index(0, j)];
            const cplx d = link * next - here;
            const double term = std::norm(d) / (hx * hx);
            double y = term - cx;
            double t = kin_x + y;
            cx = (t - kin_x) - y;
            kin_x = t;
        }
        for (int i = 0; i < g.nx; ++i) {
            if (j + 1 < g.ny) {
                const cplx d = field.u[g.index(i, j + 1)] - field.u[g.index(i, j)];
                const double term = std::norm(d) / (hy * hy);
                double y = term - cy;
                double t = kin_y + y;
                cy = (t - kin_y) - y;
                kin_y = t;
            }
            const double m = std::norm(field.u[g.index(i, j)]);
            const double term = -b * m + 0.5 * b * m * m;
            double y = term - cp;
            double t = pot + y;
            cp = (t - pot) - y;
            pot = t;
        }
    }
    return hx * hy * kahan({kin_x, kin_y, pot});
}

StripField StripSolver::make_plane_wave_field(const StripGrid& grid, double twist,
                                              std::span<const double> transverse_profile,
                                              std::span<const double> window) const {
    if (static_cast<int>(transverse_profile.size()) != grid.ny) {
        throw std::invalid_argument("make_plane_wave_field: profile size must equal ny");
    }
    if (!window.empty() && static_cast<int>(window.size()) != grid.nx) {
        throw std::invalid_argument("make_plane_wave_field: window size must equal nx");
    }
    StripField field;
    field.grid = grid;
    field.twist = twist;
    field.u.assign(grid.count(), cplx(0.0, 0.0));
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const double w = window.empty() ? 1.0 : window[static_cast<size_t>(i)];
            field.u[grid.index(i, j)] =
                std::exp(cplx(0.0, twist * grid.x1(i))) * transverse_profile[static_cast<size_t>(j)] * w;
        }
    }
    if (grid.boundary == StripBoundary::Dirichlet) {
        for (int j = 0; j < grid.ny; ++j) {
            field.u[grid.index(0, j)] = 0.0;
            field.u[grid.index(grid.nx - 1, j)] = 0.0;
        }
    }
    for (int i = 0; i < grid.nx; ++i) {
        field.u[grid.index(i, 0)] = 0.0;
        field.u[grid.index(i, grid.ny - 1)] = 0.0;
    }
    return field;
}

namespace {

// Euler-Lagrange gradient (d E / d conj(u)) / (2 hx hy) on interior nodes.
void gradient(const StripField& f, double b, std::vector<cplx>& g_out) {
    const StripGrid& g = f.grid;
    const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
    const bool periodic = g.boundary == StripBoundary::Periodic;
    const cplx wrap = periodic ? std::exp(cplx(0.0, 2.0 * g.R * f.twist)) : cplx(0.0, 0.0);
    g_out.assign(g.count(), cplx(0.0, 0.0));

    for (int j = 1; j < g.ny - 1; ++j) {
        const double x2 = g.x2(j);
        const cplx link = std::exp(cplx(0.0, g.hx() * x2 * x2 / 2.0));
        const cplx linkc = std::conj(link);
        const int i_lo = periodic ? 0 : 1;
        const int i_hi = periodic ? g.nx - 1 : g.nx - 2;
        for (int i = i_lo; i <= i_hi; ++i) {
            const cplx here = f.u[g.index(i, j)];
            cplx right, left;
            if (i + 1 < g.nx) {
                right = f.u[g.index(i + 1, j)];
            } else {
                right = wrap * f.u[g.index(0, j)];
            }
            if (i > 0) {
                left = f.u[g.index(i - 1, j)];
            } else {
                left = periodic ? std::conj(wrap) * f.u[g.index(g.nx - 1, j)] : cplx(0.0, 0.0);
            }
            const cplx lap_x = (2.0 * here - link * right - linkc * left) / hx2;
            const cplx lap_y =
                (2.0 * here - f.u[g.index(i, j + 1)] - f.u[g.index(i, j - 1)]) / hy2;
            const double m = std::norm(here);
            g_out[g.index(i, j)] = lap_x + lap_y - b * here + b * m * here;
        }
    }
}

double grad_norm(const StripGrid& g, const std::vector<cplx>& grad) {
    double acc = 0.0;
    for (const cplx& v : grad) acc += std::norm(v);
    return std::sqrt(g.hx() * g.hy() * acc);
}

// Operator-splitting preconditioner: applies (I + tau (A_x - b/2))^{-1} then
// (I + tau (A_y - b/2))^{-1} on interior nodes; flattens the stiff end of the
// spectrum so the Barzilai-Borwein steps only bridge the soft band.  The
// Thomas elimination coefficients are constant per line and precomputed.
struct SplitPreconditioner {
    const StripGrid& g;
    double b;
    double tau;
    int mx = 0, my = 0;
    std::vector<cplx> links;    // e^{i phi_j} per row
    std::vector<cplx> cx;       // per-row elimination coefficients [j][i]
    std::vector<cplx> invdx;    // per-row inverse pivots [j][i]
    std::vector<double> cy, invdy;

    SplitPreconditioner(const StripGrid& grid, double b_, double tau_) : g(grid), b(b_), tau(tau_) {
        const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
        mx = g.nx - 2;
        my = g.ny - 2;
        links.resize(static_cast<size_t>(g.ny));
        cx.assign(static_cast<size_t>(g.ny) * mx, cplx(0.0, 0.0));
        invdx.assign(static_cast<size_t>(g.ny) * mx, cplx(0.0, 0.0));
        const double dx = 1.0 + tau * (2.0 / hx2 - 0.5 * b);
        for (int j = 0; j < g.ny; ++j) {
            const double x2 = g.x2(j);
            links[static_cast<size_t>(j)] = std::exp(cplx(0.0, g.hx() * x2 * x2 / 2.0));
            const cplx o = -tau * links[static_cast<size_t>(j)] / hx2;
            const cplx oc = std::conj(o);
            cplx denom = dx;
            for (int i = 0; i < mx; ++i) {
                const size_t k = static_cast<size_t>(j) * mx + i;
                invdx[k] = 1.0 / denom;
                cx[k] = o * invdx[k];
                denom = dx - oc * cx[k];
            }
        }
        const double dy = 1.0 + tau * (2.0 / hy2 - 0.5 * b);
        const double oy = -tau / hy2;
        cy.assign(static_cast<size_t>(my), 0.0);
        invdy.assign(static_cast<size_t>(my), 0.0);
        double denom = dy;
        for (int j = 0; j < my; ++j) {
            invdy[static_cast<size_t>(j)] = 1.0 / denom;
            cy[static_cast<size_t>(j)] = oy * invdy[static_cast<size_t>(j)];
            denom = dy - oy * cy[static_cast<size_t>(j)];
        }
    }

    void apply(const std::vector<cplx>& in, std::vector<cplx>& out,
               std::vector<cplx>& row_buf, std::vector<cplx>& scratch) const {
        (void)scratch;
        const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
        out = in;
        // x sweeps (Dirichlet): unknowns i = 1 .. nx-2 per row.
        row_buf.resize(static_cast<size_t>(std::max(mx, my)));
        for (int j = 1; j < g.ny - 1; ++j) {
            const cplx o = -tau * links[static_cast<size_t>(j)] / hx2;
            const cplx oc = std::conj(o);
            const size_t base = static_cast<size_t>(j) * mx;
            cplx prev = out[g.index(1, j)] * invdx[base];
            row_buf[0] = prev;
            for (int i = 1; i < mx; ++i) {
                prev = (out[g.index(i + 1, j)] - oc * prev) * invdx[base + i];
                row_buf[static_cast<size_t>(i)] = prev;
            }
            for (int i = mx - 2; i >= 0; --i) {
                row_buf[static_cast<size_t>(i)] -= cx[base + i] * row_buf[static_cast<size_t>(i + 1)];
            }
            for (int i = 1; i <= mx; ++i) out[g.index(i, j)] = row_buf[static_cast<size_t>(i - 1)];
        }
        // y sweeps: unknowns j = 1 .. ny-2 per column.
        const double oy = -tau / hy2;
        for (int i = 1; i < g.nx - 1; ++i) {
            cplx prev = out[g.index(i, 1)] * invdy[0];
            row_buf[0] = prev;
            for (int j = 1; j < my; ++j) {
                prev = (out[g.index(i, j + 1)] - oy * prev) * invdy[static_cast<size_t>(j)];
                row_buf[static_cast<size_t>(j)] = prev;
            }
            for (int j = my - 2; j >= 0; --j) {
                row_buf[static_cast<size_t>(j)] -= cy[static_cast<size_t>(j)] * row_buf[static_cast<size_t>(j + 1)];
            }
            for (int j = 1; j <= my; ++j) out[g.index(i, j)] = row_buf[static_cast<size_t>(j - 1)];
        }
    }
};

} // namespace

DirichletResult StripSolver::dirichlet_minimize(double b, double R, const StripGrid& grid,
                                                uint64_t seed, const StripOptions& opts) const {
    if (grid.boundary != StripBoundary::Dirichlet) {
        throw std::invalid_argument("dirichlet_minimize: grid must carry the Dirichlet tag");
    }
    if (std::abs(grid.R - R) > 1e-12) {
        throw std::invalid_argument("dirichlet_minimize: grid R mismatch");
    }
    MontgomerySolver& spectral = gl_->spectral();
    if (!spectral.has_tau0()) spectral.find_tau0(-2.0, 0.0);

    DirichletResult res;
    res.field.grid = grid;
    res.field.twist = 0.0;
    res.field.u.assign(grid.count(), cplx(0.0, 0.0));

    Grid1D ygrid(grid.T, grid.ny, spectral.grid().alpha_min(), spectral.grid().alpha_max(),
                 1.0);

    // If b sits below the discrete periodic band bottom, the quadratic form
    // is positive definite and the minimizer is the normal state.
    {
        const double tau0 = spectral.tau0();
        auto band = [&](double z) {
            return ground_energy_of_potential(fiber_potential(z, grid.hx(), ygrid), ygrid);
        };
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = tau0 - 0.5, c = tau0 + 0.5;
        double x1 = c - inv_phi * (c - a), x2 = a + inv_phi * (c - a);
        double f1 = band(x1), f2 = band(x2);
        while (c - a > 1e-4) {
            if (f1 <= f2) {
                c = x2; x2 = x1; f2 = f1; x1 = c - inv_phi * (c - a); f1 = band(x1);
            } else {
                a = x1; x1 = x2; f1 = f2; x2 = a + inv_phi * (c - a); f2 = band(x2);
            }
        }
        if (b <= std::min(f1, f2) + 1e-12) {
            res.energy = 0.0;
            res.gradient_norm = 0.0;
            res.iterations = 0;
            return res;
        }
    }

    const auto [xi, rec] = xi_record(b);
    (void)rec;
    auto fprof = transverse_profile(b, ygrid);

    // Windowed plane-wave start plus seeded multiplicative noise.  The
    // window is a tanh envelope at the healing length of the slow amplitude
    // (set by the band curvature), which puts the start within a few percent
    // of the minimizer even on long strips.
    const double heal = std::sqrt(0.5 * lambda_second_cached() / std::max(b - spectral.lambda0(), 1e-6));
    std::vector<double> window(static_cast<size_t>(grid.nx));
    for (int i = 0; i < grid.nx; ++i) {
        const double dist = std::max(grid.R - std::abs(grid.x1(i)), 0.0);
        window[static_cast<size_t>(i)] = std::tanh(dist / heal);
    }
    res.field = make_plane_wave_field(grid, xi, fprof, window);
    res.field.twist = 0.0;
    {
        // Amplitude noise only: phase noise would land in near-zero-curvature
        // modes and stall the endgame of the flow.
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> dist(0.0, 1.0);
        for (int j = 1; j < grid.ny - 1; ++j) {
            for (int i = 1; i < grid.nx - 1; ++i) {
                res.field.u[grid.index(i, j)] *= 1.0 + opts.noise_amplitude * dist(rng);
            }
        }
    }

    std::vector<cplx>& u = res.field.u;
    std::vector<cplx> g_cur, d_cur, u_prev(u.size()), d_prev(u.size());
    std::vector<cplx> row_buf, scratch;
    const SplitPreconditioner prec(grid, b, 1.0);
    gradient(res.field, b, g_cur);
    prec.apply(g_cur, d_cur, row_buf, scratch);

    const double init_max = [&]() {
        double mx = 0.0;
        for (const cplx& v : u) mx = std::max(mx, std::abs(v));
        return mx;
    }();

    double step = 0.5;
    double best_energy = energy(res.field, b);
    std::vector<cplx> best_u = u;
    bool snapped_to_zero = false;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const double gn = grad_norm(grid, g_cur);
        if (gn <= opts.gradient_tol) break;

        u_prev = u;
        d_prev = d_cur;
        for (size_t k = 0; k < u.size(); ++k) u[k] -= step * d_cur[k];
        gradient(res.field, b, g_cur);
        prec.apply(g_cur, d_cur, row_buf, scratch);

        // Barzilai-Borwein step in the preconditioned metric.
        double num = 0.0, den = 0.0;
        for (size_t k = 0; k < u.size(); ++k) {
            const cplx du = u[k] - u_prev[k];
            const cplx dd = d_cur[k] - d_prev[k];
            num += std::norm(du);
            den += du.real() * dd.real() + du.imag() * dd.imag();
        }
        if (den > 0.0 && std::isfinite(den) && num > 0.0) {
            step = std::clamp(num / den, 1e-2, 1e4);
        } else {
            step = 0.5;
        }

        if ((it & 31) == 0) {
            double mx = 0.0;
            for (const cplx& v : u) mx = std::max(mx, std::abs(v));
            if (mx < 1e-9 * std::max(init_max, 1.0)) {
                // Decayed into the normal state; it is an exact critical
                // point reached by descent, so snap there.
                std::fill(u.begin(), u.end(), cplx(0.0, 0.0));
                snapped_to_zero = true;
                break;
            }
            const double e = energy(res.field, b);
            if (!std::isfinite(e)) {
                u = best_u;
                gradient(res.field, b, g_cur);
                prec.apply(g_cur, d_cur, row_buf, scratch);
                step = 0.1;
            } else if (e < best_energy) {
                best_energy = e;
                best_u = u;
            }
        }
    }

    // Fixed small-step polish with the raw gradient.
    if (!snapped_to_zero) {
        const double s0 =
            1.0 / (4.0 / (grid.hx() * grid.hx()) + 4.0 / (grid.hy() * grid.hy()) + 2.0 * b);
        for (int k = 0; k < 30; ++k) {
            gradient(res.field, b, g_cur);
            for (size_t m = 0; m < u.size(); ++m) u[m] -= s0 * g_cur[m];
        }
    }
    gradient(res.field, b, g_cur);
    res.gradient_norm = grad_norm(grid, g_cur);
    res.iterations = it;
    res.energy = energy(res.field, b);
    if (res.gradient_norm > 10.0 * opts.gradient_tol) {
        throw NumericalError("dirichlet_minimize: gradient flow did not converge (|grad| = " +
                                 std::to_string(res.gradient_norm) + ")",
                             res.gradient_norm);
    }
    return res;
}

DirichletResult StripSolver::dirichlet_minimize(double b, double R, const StripOptions& opts) const {
    StripGrid grid;
    grid.R = R;
    grid.T = opts.T;
    grid.boundary = StripBoundary::Dirichlet;
    grid.nx = 2 * static_cast<int>(std::lround(R / opts.hx_target)) + 1;
    grid.ny = 2 * static_cast<int>(std::lround(opts.T / opts.hy_target)) + 1;
    return dirichlet_minimize(b, R, grid, opts.seed, opts);
}

double StripSolver::periodic_ground(double b, double R) const {
    const auto [xi, rec] = xi_record(b);
    (void)xi;
    return 2.0 * R * rec.energy;
}

double StripSolver::discrete_periodic_per_length(double b, double hx, const Grid1D& ygrid) const {
    MontgomerySolver& spectral = gl_->spectral();
    if (!spectral.has_tau0()) spectral.find_tau0(-2.0, 0.0);

    MinimizeOptions warm;
    auto fiber_energy = [&](double z) {
        auto sol = minimize_gl_potential(fiber_potential(z, hx, ygrid), b, ygrid, warm);
        if (sol.samples.size() > 0 && sol.energy < 0.0) warm.init = sol.samples;
        return sol.energy;
    };

    // Bracket the optimal Floquet exponent from the sublevel window of the
    // continuum band, then scan before the golden section (the energy is
    // exactly zero outside the window, which would strand the section).
    double zlo, zhi;
    if (b > spectral.lambda0()) {
        auto [z1, z2] = spectral.z_interval(b);
        zlo = z1 - 0.02;
        zhi = z2 + 0.02;
    } else {
        zlo = spectral.tau0() - 0.05;
        zhi = spectral.tau0() + 0.05;
    }
    constexpr int kScan = 15;
    double best_z = zlo, best_e = 0.0;
    for (int i = 0; i < kScan; ++i) {
        const double z = zlo + (zhi - zlo) * static_cast<double>(i) / (kScan - 1);
        const double e = fiber_energy(z);
        if (e < best_e) {
            best_e = e;
            best_z = z;
        }
    }
    if (best_e == 0.0) return 0.0;
    const double span = (zhi - zlo) / (kScan - 1);

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_z - span, c = best_z + span;
    double x1 = c - inv_phi * (c - a), x2 = a + inv_phi * (c - a);
    double f1 = fiber_energy(x1), f2 = fiber_energy(x2);
    while (c - a > 1e-6) {
        if (f1 <= f2) {
            c = x2; x2 = x1; f2 = f1; x1 = c - inv_phi * (c - a); f1 = fiber_energy(x1);
        } else {
            a = x1; x1 = x2; f1 = f2; x2 = a + inv_phi * (c - a); f2 = fiber_energy(x2);
        }
    }
    return fiber_energy(0.5 * (a + c));
}

double StripSolver::fourier_fiber_energy(int n_mode, std::span<const double> v, double b,
                                         double R, const Grid1D& ygrid) const {
    const int ny = ygrid.size();
    if (static_cast<int>(v.size()) != ny) {
        throw std::invalid_argument("fourier_fiber_energy: v size must match the y-grid");
    }
    const auto [xi, rec] = xi_record(b);
    (void)rec;
    auto f = transverse_profile(b, ygrid);
    const double beta = static_cast<double>(n_mode) * M_PI / R;
    const double h = ygrid.spacing();

    double acc = 0.0;
    for (int j = 0; j + 1 < ny; ++j) {
        const double dv = (v[static_cast<size_t>(j + 1)] - v[static_cast<size_t>(j)]) / h;
        acc += f[static_cast<size_t>(j)] * f[static_cast<size_t>(j + 1)] * dv * dv;
    }
    std::vector<double> node_terms(static_cast<size_t>(ny));
    for (int j = 0; j < ny; ++j) {
        const double t2h = ygrid.node(j) * ygrid.node(j) / 2.0 + xi;
        const double fv = f[static_cast<size_t>(j)] * v[static_cast<size_t>(j)];
        node_terms[static_cast<size_t>(j)] = (beta * beta + 2.0 * beta * t2h) * fv * fv;
    }
    const double J = h * acc + ygrid.integrate(node_terms);

    // Key inequality of the fiber decomposition: J >= gamma(beta, b) ||f v||^2.
    std::vector<double> pot(static_cast<size_t>(ny - 2));
    for (int j = 1; j < ny - 1; ++j) {
        const double fj = f[static_cast<size_t>(j)];
        pot[static_cast<size_t>(j - 1)] =
            montgomery_potential(ygrid.node(j), xi + beta) - b * (1.0 - fj * fj);
    }
    const double gamma_h = ground_energy_of_potential(pot, ygrid);
    std::vector<double> fv(static_cast<size_t>(ny));
    for (int j = 0; j < ny; ++j) fv[static_cast<size_t>(j)] = f[static_cast<size_t>(j)] * v[static_cast<size_t>(j)];
    const double fv2 = ygrid.inner(fv, fv);
    if (J < gamma_h * fv2 - 1e-8) {
        throw NumericalError("fourier_fiber_energy: fiber lower bound violated", gamma_h * fv2 - J);
    }
    return J;
}

std::pair<double, double> StripSolver::fiber_substitution_identity(std::span<const double> v,
                                                                   double b,
                                                                   const Grid1D& ygrid) const {
    const int ny = ygrid.size();
    if (static_cast<int>(v.size()) != ny) {
        throw std::invalid_argument("fiber_substitution_identity: v size must match the y-grid");
    }
    const auto [xi, rec] = xi_record(b);
    (void)rec;
    auto f = transverse_profile(b, ygrid);
    const double h = ygrid.spacing();

    double lhs = 0.0;
    for (int j = 0; j + 1 < ny; ++j) {
        const double dv = (v[static_cast<size_t>(j + 1)] - v[static_cast<size_t>(j)]) / h;
        lhs += f[static_cast<size_t>(j)] * f[static_cast<size_t>(j + 1)] * dv * dv;
    }
    lhs *= h;

    double rhs = 0.0;
    for (int j = 0; j + 1 < ny; ++j) {
        const double w0 = f[static_cast<size_t>(j)] * v[static_cast<size_t>(j)];
        const double w1 = f[static_cast<size_t>(j + 1)] * v[static_cast<size_t>(j + 1)];
        const double dw = (w1 - w0) / h;
        rhs += dw * dw;
    }
    rhs *= h;
    std::vector<double> node_terms(static_cast<size_t>(ny));
    for (int j = 0; j < ny; ++j) {
        const double fj = f[static_cast<size_t>(j)];
        const double w = fj * v[static_cast<size_t>(j)];
        node_terms[static_cast<size_t>(j)] =
            (montgomery_potential(ygrid.node(j), xi) - b * (1.0 - fj * fj)) * w * w;
    }
    rhs += ygrid.integrate(node_terms);
    return {lhs, rhs};
}

ELRow StripSolver::estimate_E(double L, std::span<const double> R_list,
                              const StripOptions& opts) const {
    if (!(L > 0.0)) throw std::invalid_argument("estimate_E: L must be positive");
    if (R_list.size() < 2) throw std::invalid_argument("estimate_E: need at least two R values");
    MontgomerySolver& spectral = gl_->spectral();
    if (!spectral.has_tau0()) spectral.find_tau0(-2.0, 0.0);
    const double l0 = spectral.lambda0();

    ELRow row;
    row.L = L;
    row.b = std::pow(L, -2.0 / 3.0);
    row.R_list.assign(R_list.begin(), R_list.end());

    const double b = row.b;
    if (b <= l0) {
        // Above the critical length the reference value vanishes; confirm
        // with a single solve on the smallest strip.
        auto sol = dirichlet_minimize(b, R_list[0], opts);
        if (sol.energy < -1e-4 * R_list[0]) {
            throw NumericalError("estimate_E: expected the normal state above the critical length",
                                 -sol.energy);
        }
        row.E = 0.0;
        row.lower = 0.0;
        for (double R : R_list) {
            (void)R;
            row.e_per_length.push_back(0.0);
            row.e_corrected.push_back(0.0);
        }
        return row;
    }

    const auto [xi, rec] = xi_record(b);
    (void)xi;
    row.lower = rec.energy;

    const size_t m = R_list.size();
    row.e_per_length.assign(m, 0.0);
    row.e_corrected.assign(m, 0.0);

    auto solve_one = [&](size_t k) {
        StripOptions o = opts;
        o.seed = opts.seed + k;
        auto sol = dirichlet_minimize(b, R_list[k], o);
        const double per_len = sol.energy / (2.0 * R_list[k]);
        double corrected = per_len;
        if (opts.defect_correction) {
            const double hx = sol.field.grid.hx();
            Grid1D ygrid(o.T, sol.field.grid.ny, spectral.grid().alpha_min(),
                         spectral.grid().alpha_max(), 1.0);
            corrected = per_len - discrete_periodic_per_length(b, hx, ygrid) + rec.energy;
        }
        return std::make_pair(per_len, corrected);
    };

    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<std::pair<double, double>>> futs(m);
    size_t launched = 0, done = 0;
    while (done < m) {
        while (launched < m && launched - done < workers) {
            futs[launched] = std::async(std::launch::async, solve_one, launched);
            ++launched;
        }
        auto [pl, corr] = futs[done].get();
        row.e_per_length[done] = pl;
        row.e_corrected[done] = corr;
        ++done;
    }

    // Extrapolate with the near-critical boundary-layer model E + c / R: the
    // cutoff test field costs O(1) per wall, so the per-length defect decays
    // like 1/R here (the universal R^{-2/3} envelope is far from tight in
    // this regime and would bias the fit below the periodic lower bound).
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t k = 0; k < m; ++k) {
        const double x = 1.0 / R_list[k];
        const double y = row.e_corrected[k];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    const double c1 = (static_cast<double>(m) * sxy - sx * sy) / denom;
    row.E = (sy - c1 * sx) / static_cast<double>(m);

    double max_resid = 0.0;
    for (size_t k = 0; k < m; ++k) {
        const double model = row.E + c1 / R_list[k];
        max_resid = std::max(max_resid, std::abs(row.e_corrected[k] - model));
    }
    row.fit_residual = max_resid;

    // Slack coefficient of the Theorem-style bracket e/2R <= E + c R^{-2/3}.
    double slack = 0.0;
    for (size_t k = 0; k < m; ++k) {
        slack = std::max(slack, (row.e_corrected[k] - row.E) * std::pow(R_list[k], 2.0 / 3.0));
    }
    row.slack_coeff = slack;

    if (row.fit_residual > 0.25 * std::max(std::abs(row.E), 1e-8)) {
        throw NumericalError("estimate_E: extrapolation residual too large; use larger R values",
                             row.fit_residual);
    }
    return row;
}

std::vector<MainTheoremRow> StripSolver::verify_main_theorem(std::span<const double> L_sequence,
                                                             const StripOptions& opts) const {
    MontgomerySolver& spectral = gl_->spectral();
    if (!spectral.has_tau0()) spectral.find_tau0(-2.0, 0.0);
    const double l0 = spectral.lambda0();
    const double lc = critical_length(l0);
    const double u044 = gl_->grid().l4_norm4(spectral.ground(spectral.tau0()).vector);
    const double lpp = lambda_second_cached();

    std::vector<MainTheoremRow> rows;
    for (double L : L_sequence) {
        if (!(L < lc)) {
            throw std::invalid_argument("verify_main_theorem: L values must lie below the critical length");
        }
        MainTheoremRow r;
        r.L = L;
        r.b = std::pow(L, -2.0 / 3.0);

        // Healing length of the slow envelope sets the strip sizes; the
        // boundary-layer 1/R law needs R well past one healing length.
        const double heal = std::sqrt(0.5 * lpp / (r.b - l0));
        const double R0 = std::clamp(3.0 * heal, 8.0, 300.0);
        const double Rs[3] = {R0, 1.5 * R0, 2.0 * R0};
        auto row = estimate_E(L, std::span<const double>(Rs, 3), opts);

        r.E = row.E;
        r.model = -0.5 * std::pow(L, 2.0 / 3.0) * (r.b - l0) * (r.b - l0) / u044;
        r.rho = r.E / r.model;
        rows.push_back(r);
    }
    return rows;
}

} // namespace vfgl

// Acceptance suite: runs every headline criterion at its stated tolerance
// and prints one pass/fail line per criterion.  Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vfgl/domain.hpp"
#include "vfgl/eltable.hpp"
#include "vfgl/gl1d.hpp"
#include "vfgl/grid.hpp"
#include "vfgl/linearized.hpp"
#include "vfgl/spectral.hpp"
#include "vfgl/strip.hpp"

using namespace vfgl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

double now() {
    static auto t0 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s  (%s)  t=%.0fs\n", pass ? "PASS" : "FAIL", idx,
                name.c_str(), detail.c_str(), now());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    setvbuf(stdout, nullptr, _IONBF, 0);
    const std::string cli = argc > 1 ? argv[1] :
#ifdef VFGL_CLI_PATH
                                     VFGL_CLI_PATH
#else
                                     ""
#endif
        ;

    auto ms = std::make_shared<MontgomerySolver>(Grid1D(8.0, 20001, -3.0, 3.0));
    auto gl = std::make_shared<GL1DSolver>(ms);
    LinearizedSpectrum lin(gl);
    StripSolver strip(gl);

    // ------------------------------------------------------------------ 1
    {
        bool pass = true;
        std::string detail;
        double lambda0_cli = 0.0;
        if (!cli.empty()) {
            fs::remove_all("acceptance_tau0");
            const auto t_start = std::chrono::steady_clock::now();
            const int rc = std::system(
                (cli + " --out acceptance_tau0 spectrum --find-tau0 > acceptance_tau0.log 2>&1")
                    .c_str());
            const double dt =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
            pass = rc == 0 && dt < 10.0;
            if (rc == 0) {
                std::ifstream in("acceptance_tau0/constants.json");
                json j = json::parse(in);
                lambda0_cli = j["lambda0"].get<double>();
                pass = pass && std::abs(lambda0_cli - 0.57) <= 0.01;
            }
            detail = "lambda0=" + fmt(lambda0_cli) + ", " + fmt(dt) + "s";
        } else {
            pass = false;
            detail = "CLI path missing";
        }
        ms->find_tau0(-2.0, 0.0);
        const double l0 = ms->lambda0();
        const double lam_at_0 = ms->lambda(0.0);
        const bool strict = l0 < lam_at_0 && lam_at_0 <= std::pow(0.75, 4.0 / 3.0);
        report(1, "lambda0 via CLI within 0.01 of 0.57; lambda0 < lambda(0) <= (3/4)^{4/3}",
               pass && strict, detail + ", lambda(0)=" + fmt(lam_at_0));
    }

    const double tau0 = ms->tau0();
    const double l0 = ms->lambda0();
    const double u044 = ms->grid().l4_norm4(ms->ground(tau0).vector);

    // ------------------------------------------------------------------ 2
    {
        const auto t_start = now();
        const double lp = ms->lambda_prime(tau0);
        const double lpp = ms->lambda_second_derivative();
        bool fd_ok = true;
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double a = -1.5 + 2.5 * k / 19.0;
            const double fd = (ms->lambda(a + 1e-4) - ms->lambda(a - 1e-4)) / 2e-4;
            const double fh = ms->lambda_prime(a);
            const double rel = std::abs(fh - fd) / std::max(std::abs(fd), 1e-2);
            worst = std::max(worst, rel);
            if (rel > 1e-4) fd_ok = false;
        }
        const bool pass = std::abs(lp) <= 1e-5 && lpp > 0.0 && tau0 < 0.0 && fd_ok &&
                          (now() - t_start) < 60.0;
        report(2, "spectral curve: lambda'(tau0)=0, lambda''>0, FH matches FD", pass,
               "lambda'=" + fmt(lp) + ", lambda''=" + fmt(lpp) + ", worst rel=" + fmt(worst));
    }

    // ------------------------------------------------------------------ 3
    {
        bool pass = true;
        double worst = 0.0;
        int tested = 0;
        for (double da : {-0.03, -0.01, 0.0, 0.02, 0.04}) {
            for (double db : {5e-3, 0.05}) {
                const double alpha = tau0 + da;
                const double b = l0 + db;
                if (b <= ms->lambda(alpha)) continue;
                auto rec = gl->ground_energy(alpha, b);
                const double rhs = -0.5 * b * rec.f4norm;
                const double rel = std::abs(rec.energy - rhs) / std::abs(rhs);
                worst = std::max(worst, rel);
                if (rel > 1e-9) pass = false;
                ++tested;
            }
        }
        const auto trivial = gl->ground_energy(tau0, ms->lambda(tau0) - 0.01);
        pass = pass && trivial.energy == 0.0 && tested >= 10;
        report(3, "energy identity -(b/2)||f||_4^4 at 1e-9 relative on 10 pairs", pass,
               "pairs=" + std::to_string(tested) + ", worst rel=" + fmt(worst));
    }

    // ------------------------------------------------------------------ 4
    {
        bool pass = true;
        double worst_dist = 0.0, worst_res = 0.0;
        for (double db : {1e-2, 1e-3}) {
            for (double da : {0.0, 0.02, -0.02}) {
                auto pm = gl->minimize(tau0 + da, l0 + db);
                auto pp = gl->picard_solve(tau0 + da, l0 + db);
                double acc = 0.0;
                for (size_t i = 0; i < pm.samples.size(); ++i) {
                    const double d = pm.samples[i] - pp.samples[i];
                    acc += d * d;
                }
                const double dist = std::sqrt(ms->grid().spacing() * acc);
                worst_dist = std::max(worst_dist, dist);
                auto rep = gl->verify_resolvent_identities(pm);
                worst_res = std::max({worst_res, rep.scalar_residual, rep.function_residual});
                if (dist > 1e-6 || rep.scalar_residual > 1e-7 || rep.function_residual > 1e-7) {
                    pass = false;
                }
            }
        }
        report(4, "fixed point vs minimizer at 1e-6; resolvent identities at 1e-7", pass,
               "worst dist=" + fmt(worst_dist) + ", worst residual=" + fmt(worst_res));
    }

    // ------------------------------------------------------------------ 5
    {
        const auto t_start = now();
        const double bs[3] = {l0 + 1e-2, l0 + 3e-3, l0 + 1e-3};
        bool pass = true;
        std::string detail;
        try {
            auto rows = gl->asymptotic_ratio(std::span<const double>(bs, 3));
            pass = std::abs(rows[2].ratio - 1.0) <= 0.1;
            for (size_t i = 1; i < rows.size(); ++i) {
                if (std::abs(rows[i].ratio - 1.0) > std::abs(rows[i - 1].ratio - 1.0) + 1e-3) {
                    pass = false;
                }
            }
            detail = "r=" + fmt(rows[0].ratio) + "," + fmt(rows[1].ratio) + "," +
                     fmt(rows[2].ratio);
        } catch (const std::exception& e) {
            pass = false;
            detail = e.what();
        }
        pass = pass && (now() - t_start) < 300.0;
        report(5, "ground-energy asymptotics ratio -> 1 with shrinking deviation", pass, detail);
    }

    // ------------------------------------------------------------------ 6
    {
        bool pass = true;
        std::string detail;
        for (double db : {1e-2, 1e-3}) {
            const double b = l0 + db;
            const double g0 = lin.gamma(0.0, b);
            if (std::abs(g0) > 1e-6) pass = false;
            auto curve = lin.gamma_scan(b, -1.0, 1.0, 201);
            double mn = 1e300;
            for (double v : curve.gammas) mn = std::min(mn, v);
            if (mn < -1e-6) pass = false;
            detail += "g0(" + fmt(db) + ")=" + fmt(g0) + " min=" + fmt(mn) + "; ";
        }
        auto [d1, d2] = lin.gamma_derivatives_at_zero(l0 + 1e-3);
        const double lpp = ms->lambda_second_derivative();
        if (std::abs(d2 - lpp) > 0.10 * lpp || std::abs(d1) > 1e-5) pass = false;
        report(6, "linearization: gamma(0,b)=0, scan floor >= -1e-6, curvature within 10%", pass,
               detail + "d2=" + fmt(d2) + " vs " + fmt(lpp));
    }

    // ------------------------------------------------------------------ 7
    {
        bool pass = true;
        std::string detail;
        const double b = l0 + 5e-3;
        StripOptions opts;
        for (double R : {8.0, 16.0}) {
            auto d = strip.dirichlet_minimize(b, R, opts);
            auto [xi, rec] = strip.xi_record(b);
            (void)xi;
            const double eper = -b * R * rec.f4norm;
            if (!(d.energy >= eper)) pass = false;
            detail += "R=" + fmt(R) + ": " + fmt(d.energy) + " >= " + fmt(eper) + "; ";
        }
        // Second-order agreement of the discrete plane-wave energy.
        const double closed = strip.periodic_ground(b, 8.0);
        double prev_err = 0.0;
        bool order_ok = true;
        for (int scale : {1, 2, 4}) {
            StripGrid pg;
            pg.R = 8.0;
            pg.T = 6.0;
            pg.nx = 160 * scale;
            pg.ny = 120 * scale + 1;
            pg.boundary = StripBoundary::Periodic;
            Grid1D yg(pg.T, pg.ny, -3.0, 3.0, 1.0);
            auto f = strip.transverse_profile(b, yg);
            auto [xi, rec] = strip.xi_record(b);
            (void)rec;
            auto psi = strip.make_plane_wave_field(pg, xi, f);
            const double err = std::abs(strip.energy(psi, b) - closed);
            if (prev_err > 0.0) {
                const double ratio = prev_err / err;
                if (ratio < 3.0 || ratio > 5.0) order_ok = false;
                detail += "refine x" + std::to_string(scale) + " ratio=" + fmt(ratio) + "; ";
            }
            prev_err = err;
        }
        report(7, "Dirichlet >= periodic at matched grids; periodic formula 2nd order",
               pass && order_ok, detail);
    }

    // ------------------------------------------------------------------ 8 and 9
    {
        const auto t_start = now();
        const double lc = StripSolver::critical_length(l0);
        const double lpp = ms->lambda_second_derivative();
        StripOptions opts;

        ELTable table(l0, u044);
        bool pass8 = true;
        std::string detail8;
        std::vector<double> slacks;
        double prev_E = -1e9;
        const double fracs[6] = {0.89, 0.93, (lc - 0.1) / lc, 0.99, (lc + 0.1) / lc, 1.2};
        std::vector<ELRow> rows;
        for (double frac : fracs) {
            const double L = frac * lc;
            const double b = std::pow(L, -2.0 / 3.0);
            double R0 = 8.0;
            if (b > l0) R0 = std::clamp(3.0 * std::sqrt(0.5 * lpp / (b - l0)), 8.0, 300.0);
            const double Rs[3] = {R0, 1.5 * R0, 2.0 * R0};
            try {
                auto row = strip.estimate_E(L, std::span<const double>(Rs, 3), opts);
                rows.push_back(row);
                table.add_row(row);
                if (row.E < prev_E - 1e-9) pass8 = false;
                prev_E = row.E;
                if (row.E < 0.0) slacks.push_back(row.slack_coeff);
                // Row-wise bracket check.
                for (size_t k = 0; k < row.R_list.size(); ++k) {
                    if (row.e_corrected[k] < row.E - 1e-8 ||
                        row.e_corrected[k] >
                            row.E + row.slack_coeff * std::pow(row.R_list[k], -2.0 / 3.0) + 1e-8) {
                        pass8 = false;
                    }
                }
            } catch (const std::exception& e) {
                pass8 = false;
                detail8 += std::string("row failed: ") + e.what() + "; ";
            }
        }
        // E(Lc + 0.1) = 0 within 1e-4 and E(Lc - 0.1) < 0.
        if (rows.size() == 6) {
            if (std::abs(rows[4].E) > 1e-4) pass8 = false;
            if (!(rows[2].E < 0.0)) pass8 = false;
            detail8 += "E(Lc-0.1)=" + fmt(rows[2].E) + ", E(Lc+0.1)=" + fmt(rows[4].E);
        }
        // Fitted bracket coefficients bounded across L.
        if (!slacks.empty()) {
            double smax = 0.0;
            for (double s : slacks) smax = std::max(smax, s);
            if (smax > 1.0) pass8 = false;
            detail8 += ", max slack=" + fmt(smax);
        }
        report(8, "reference function: zero above, negative below, monotone, bracketed", pass8,
               detail8);
        table.save_csv("acceptance_el_table.csv");

        bool pass9 = true;
        std::string detail9;
        double prev_dev = 1e300;
        for (double db : {1e-2, 3.16e-3, 1e-3}) {
            const double b = l0 + db;
            const double L = std::pow(b, -1.5);
            const double R0 = std::clamp(3.0 * std::sqrt(0.5 * lpp / db), 8.0, 300.0);
            const double Rs[3] = {R0, 1.5 * R0, 2.0 * R0};
            try {
                auto row = strip.estimate_E(L, std::span<const double>(Rs, 3), opts);
                const double model = -0.5 * std::pow(L, 2.0 / 3.0) * db * db / u044;
                const double rho = row.E / model;
                detail9 += "rho(" + fmt(db) + ")=" + fmt(rho) + "; ";
                if (db == 1e-2 && std::abs(rho - 1.0) > 0.15) pass9 = false;
                if (std::abs(rho - 1.0) > prev_dev + 1.5e-3) pass9 = false;
                prev_dev = std::abs(rho - 1.0);
            } catch (const std::exception& e) {
                pass9 = false;
                detail9 += std::string("failed: ") + e.what() + "; ";
            }
        }
        const double dt = now() - t_start;
        pass9 = pass9 && dt < 1800.0;
        report(9, "main asymptotics: rho(L) within 15%, deviation shrinking, < 30 min", pass9,
               detail9 + fmt(dt) + "s for criteria 8+9");
    }

    // ------------------------------------------------------------------ 10
    {
        bool pass = true;
        std::string detail;
        auto omega = DomainShape::disc(1.0);
        for (const char* name : {"linear", "parabola"}) {
            auto f = FieldProfile::builtin(name);
            auto curve = extract_zero_set(f, omega, 0.01);
            double prev_spacing = 0.0;
            for (double ell : {0.02, 0.01}) {
                auto rep = disk_covering(curve, f, omega, ell);
                if (rep.count_defect > 5.0) pass = false;
                if (prev_spacing > 0.0 && rep.max_spacing_defect > 0.0) {
                    const double factor = prev_spacing / rep.max_spacing_defect;
                    if (factor < 3.2 || factor > 4.8) pass = false;
                    detail += std::string(name) + " x" + fmt(factor) + "; ";
                }
                prev_spacing = rep.max_spacing_defect;
            }
        }
        // Analytic geometry reproduction.
        auto fl = FieldProfile::builtin("linear");
        auto chord = extract_zero_set(fl, omega, 0.01);
        if (std::abs(chord.total_length() - 2.0) > 1e-8) pass = false;
        for (const auto& v : chord.components[0].vertices) {
            if (std::abs(v[1] - v[0]) > 1e-8) pass = false;
        }
        auto fp = FieldProfile::builtin("parabola");
        auto arc = extract_zero_set(fp, omega, 0.01);
        for (const auto& v : arc.components[0].vertices) {
            if (std::abs(fp.value(v[0], v[1])) > 1e-8) pass = false;
        }
        auto rep = classify_assumption(arc, fp, l0);
        if (std::abs(rep.c0 - 1.0) > 1e-8) pass = false;
        detail += "chord len err=" + fmt(std::abs(chord.total_length() - 2.0)) +
                  ", c0 err=" + fmt(std::abs(rep.c0 - 1.0));
        report(10, "covering defects follow the quadratic law; geometry to 1e-8", pass, detail);
    }

    // ------------------------------------------------------------------ 11
    {
        auto omega = DomainShape::disc(1.0);
        auto fl = FieldProfile::builtin("linear");
        auto chord = extract_zero_set(fl, omega, 0.01);
        auto repl = classify_assumption(chord, fl, l0);
        const double rho = 1e-3;
        auto nc = near_critical_energy(chord, fl, repl, 50.0, rho, l0, u044);
        const double quoted =
            std::pow((2.0 / 3.0) * repl.c0 * std::pow(l0, 1.5) * rho, 2.0) * chord.total_length();
        const double corrected =
            std::pow((2.0 / 3.0) * repl.c0 * std::pow(l0, 2.5) * rho, 2.0) * chord.total_length();
        const bool literal = std::abs(nc.integral / quoted - 1.0) <= 0.05;
        const bool corr = std::abs(nc.integral / corrected - 1.0) <= 0.05;
        report(11, "whole-curve integral matches ((2/3) c0 lambda0^{3/2} rho)^2 |Gamma| (as stated)",
               literal,
               "ratio=" + fmt(nc.integral / quoted) +
                   " = lambda0^2 x corrected; see decisions ledger for the constant defect");
        report(11, "whole-curve integral with the Taylor-consistent constant lambda0^{5/2}", corr,
               "ratio=" + fmt(nc.integral / corrected));

        auto fp = FieldProfile::builtin("parabola");
        auto arc = extract_zero_set(fp, omega, 0.01);
        auto repp = classify_assumption(arc, fp, l0);
        double lens[3];
        const double rhos[3] = {1e-2, 1e-3, 1e-4};
        for (int k = 0; k < 3; ++k) {
            lens[k] = near_critical_energy(arc, fp, repp, 200.0, rhos[k], l0, u044).gamma_kappa_len;
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int k = 0; k < 3; ++k) {
            const double x = std::log(rhos[k]), y = std::log(lens[k]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
        report(11, "finite case |Gamma_kappa| ~ sqrt(rho)", std::abs(slope - 0.5) <= 0.05,
               "log-log slope=" + fmt(slope));

        ELTable table(l0, u044);
        table.enable_surrogate(true);
        bool cons_ok = true;
        double prev_dev = 1e300;
        std::string detail;
        for (double r : {1e-2, 3e-3, 1e-3}) {
            const double ratio = consistency_with_leading(arc, fp, repp, 200.0, r, table, l0, u044);
            if (std::abs(ratio - 1.0) > prev_dev + 1e-6) cons_ok = false;
            prev_dev = std::abs(ratio - 1.0);
            detail += fmt(ratio) + "; ";
        }
        cons_ok = cons_ok && prev_dev <= 0.05;
        report(11, "leading-order and near-critical forms agree as rho -> 0", cons_ok, detail);
    }

    std::printf("\nacceptance finished in %.0f s with %d failing line(s)\n", now(), g_failures);
    std::printf("note: the 'as stated' whole-curve constant reproduces the documented\n"
                "lambda0^2 discrepancy between the expanded bullet and the defining integral;\n"
                "the Taylor-consistent variant passes (see the decisions ledger).\n");
    return g_failures;
}

#include "vfgl.h"

#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>

#include "vfgl/domain.hpp"
#include "vfgl/eltable.hpp"
#include "vfgl/errors.hpp"
#include "vfgl/gl1d.hpp"
#include "vfgl/grid.hpp"
#include "vfgl/linearized.hpp"
#include "vfgl/spectral.hpp"
#include "vfgl/strip.hpp"

namespace {

thread_local std::string g_error;

template <typename Fn>
vfgl_status guard(Fn&& fn) {
    try {
        fn();
        return VFGL_OK;
    } catch (const std::invalid_argument& e) {
        g_error = e.what();
        return VFGL_ERR_INVALID_ARGUMENT;
    } catch (const vfgl::NumericalError& e) {
        g_error = e.what();
        return VFGL_ERR_NUMERICAL;
    } catch (const std::logic_error& e) {
        g_error = e.what();
        return VFGL_ERR_STATE;
    } catch (const std::ios_base::failure& e) {
        g_error = e.what();
        return VFGL_ERR_IO;
    } catch (const std::exception& e) {
        g_error = e.what();
        return VFGL_ERR_NUMERICAL;
    }
}

vfgl::StripOptions to_cpp(const vfgl_strip_options* opts) {
    vfgl::StripOptions o;
    if (!opts) return o;
    if (opts->hx_target > 0.0) o.hx_target = opts->hx_target;
    if (opts->hy_target > 0.0) o.hy_target = opts->hy_target;
    if (opts->half_height > 0.0) o.T = opts->half_height;
    o.seed = opts->seed;
    if (opts->gradient_tol > 0.0) o.gradient_tol = opts->gradient_tol;
    o.defect_correction = opts->defect_correction != 0;
    return o;
}

vfgl::DomainShape parse_omega(const char* spec) {
    if (!spec) throw std::invalid_argument("omega: null specification");
    std::string s(spec);
    if (s == "disc") return vfgl::DomainShape::disc(1.0);
    if (s.rfind("disc:", 0) == 0) return vfgl::DomainShape::disc(std::stod(s.substr(5)));
    std::ifstream in(s);
    if (!in) throw std::invalid_argument("omega: cannot open polygon file " + s);
    std::vector<std::array<double, 2>> verts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        for (char& c : line) {
            if (c == ',') c = ' ';
        }
        std::stringstream ss(line);
        double x, y;
        if (ss >> x >> y) verts.push_back({x, y});
    }
    return vfgl::DomainShape::polygon(std::move(verts));
}

} // namespace

struct vfgl_toolkit {
    std::shared_ptr<vfgl::MontgomerySolver> spectral;
    std::shared_ptr<vfgl::GL1DSolver> gl;
    std::shared_ptr<vfgl::LinearizedSpectrum> lin;
    std::shared_ptr<vfgl::StripSolver> strip;
    std::mutex mu;

    void ensure_constants() {
        std::lock_guard<std::mutex> lock(mu);
        if (!spectral->has_tau0()) spectral->find_tau0(-2.0, 0.0);
    }
};

struct vfgl_profile {
    vfgl::GLProfile p;
};
struct vfgl_strip_field {
    vfgl::StripField f;
};
struct vfgl_eltable {
    vfgl::ELTable t;
};
struct vfgl_field {
    vfgl::FieldProfile f;
};
struct vfgl_curve {
    vfgl::ZeroCurve c;
};

extern "C" {

const char* vfgl_last_error(void) { return g_error.c_str(); }
const char* vfgl_version(void) { return "1.0.0"; }

vfgl_status vfgl_toolkit_create(double grid_half_width, int grid_points, double alpha_min,
                                double alpha_max, vfgl_toolkit** out) {
    return guard([&] {
        if (!out) throw std::invalid_argument("toolkit_create: null output");
        auto tk = std::make_unique<vfgl_toolkit>();
        tk->spectral = std::make_shared<vfgl::MontgomerySolver>(
            vfgl::Grid1D(grid_half_width, grid_points, alpha_min, alpha_max));
        tk->gl = std::make_shared<vfgl::GL1DSolver>(tk->spectral);
        tk->lin = std::make_shared<vfgl::LinearizedSpectrum>(tk->gl);
        tk->strip = std::make_shared<vfgl::StripSolver>(tk->gl);
        *out = tk.release();
    });
}

void vfgl_toolkit_free(vfgl_toolkit* tk) { delete tk; }

vfgl_status vfgl_compute_constants(vfgl_toolkit* tk, vfgl_constants* out) {
    return guard([&] {
        if (!tk || !out) throw std::invalid_argument("compute_constants: null argument");
        tk->ensure_constants();
        out->tau0 = tk->spectral->tau0();
        out->lambda0 = tk->spectral->lambda0();
        out->lambda_second = tk->spectral->lambda_second_derivative();
        out->u0_l4_fourth =
            tk->spectral->grid().l4_norm4(tk->spectral->ground(out->tau0).vector);
        out->grid_half_width = tk->spectral->grid().half_width();
        out->grid_points = tk->spectral->grid().size();
        if (!(out->lambda0 > 0.5 && out->lambda0 < 0.7)) {
            throw vfgl::NumericalError("constants: lambda0 outside the (0.5, 0.7) sanity gate",
                                       out->lambda0);
        }
    });
}

vfgl_status vfgl_lambda(vfgl_toolkit* tk, double alpha, double* lambda1, double* lambda2) {
    return guard([&] {
        if (!tk || !lambda1) throw std::invalid_argument("lambda: null argument");
        *lambda1 = tk->spectral->lambda(alpha);
        if (lambda2) *lambda2 = tk->spectral->lambda2(alpha);
    });
}

vfgl_status vfgl_lambda_prime(vfgl_toolkit* tk, double alpha, double* out) {
    return guard([&] {
        if (!tk || !out) throw std::invalid_argument("lambda_prime: null argument");
        *out = tk->spectral->lambda_prime(alpha);
    });
}

vfgl_status vfgl_z_interval(vfgl_toolkit* tk, double b, double* z1, double* z2) {
    return guard([&] {
        if (!tk || !z1 || !z2) throw std::invalid_argument("z_interval: null argument");
        tk->ensure_constants();
        auto [a, c] = tk->spectral->z_interval(b);
        *z1 = a;
        *z2 = c;
    });
}

vfgl_status vfgl_lambda_scan(vfgl_toolkit* tk, double alpha_min, double alpha_max, int n,
                             int with_second, double* alphas, double* lambda1, double* lambda2) {
    return guard([&] {
        if (!tk || !alphas || !lambda1) throw std::invalid_argument("lambda_scan: null argument");
        auto curve = tk->spectral->scan(alpha_min, alpha_max, n, with_second != 0);
        for (int i = 0; i < n; ++i) {
            alphas[i] = curve.alphas[static_cast<size_t>(i)];
            lambda1[i] = curve.lambda1[static_cast<size_t>(i)];
            if (with_second && lambda2) lambda2[i] = curve.lambda2[static_cast<size_t>(i)];
        }
    });
}

vfgl_status vfgl_minimize_profile(vfgl_toolkit* tk, double alpha, double b, vfgl_profile** out) {
    return guard([&] {
        if (!tk || !out) throw std::invalid_argument("minimize_profile: null argument");
        *out = new vfgl_profile{tk->gl->minimize(alpha, b)};
    });
}

vfgl_status vfgl_picard_solve(vfgl_toolkit* tk, double alpha, double b, vfgl_profile** out) {
    return guard([&] {
        if (!tk || !out) throw std::invalid_argument("picard_solve: null argument");
        *out = new vfgl_profile{tk->gl->picard_solve(alpha, b)};
    });
}

vfgl_status vfgl_find_xi(vfgl_toolkit* tk, double b, double* xi, vfgl_profile** out) {
    return guard([&] {
        if (!tk || !xi) throw std::invalid_argument("find_xi: null argument");
        tk->ensure_constants();
        auto [x, rec] = tk->gl->find_xi(b);
        (void)rec;
        *xi = x;
        if (out) *out = new vfgl_profile{tk->gl->minimize(x, b)};
    });
}

vfgl_status vfgl_profile_info(vfgl_toolkit* tk, const vfgl_profile* p, vfgl_profile_stats* out) {
    return guard([&] {
        if (!tk || !p || !out) throw std::invalid_argument("profile_info: null argument");
        auto rec = tk->gl->record_for(p->p);
        out->alpha = p->p.alpha;
        out->b = p->p.b;
        out->energy = rec.energy;
        out->f4norm = rec.f4norm;
        out->l2norm = p->p.l2;
        out->linf = p->p.linf;
        out->delta = p->p.delta;
        out->el_residual = p->p.el_residual;
        out->fh_residual = rec.feynman_hellmann_residual;
    });
}

int64_t vfgl_profile_size(const vfgl_profile* p) {
    return p ? static_cast<int64_t>(p->p.samples.size()) : 0;
}

vfgl_status vfgl_profile_copy(vfgl_toolkit* tk, const vfgl_profile* p, double* t, double* f) {
    return guard([&] {
        if (!tk || !p || !t || !f) throw std::invalid_argument("profile_copy: null argument");
        const auto& nodes = tk->spectral->grid().nodes();
        if (nodes.size() != p->p.samples.size()) {
            throw std::invalid_argument("profile_copy: profile grid mismatch");
        }
        std::memcpy(t, nodes.data(), nodes.size() * sizeof(double));
        std::memcpy(f, p->p.samples.data(), p->p.samples.size() * sizeof(double));
    });
}

void vfgl_profile_free(vfgl_profile* p) { delete p; }

vfgl_status vfgl_resolvent_identities(vfgl_toolkit* tk, const vfgl_profile* p,
                                      double* scalar_residual, double* function_residual) {
    return guard([&] {
        if (!tk || !p || !scalar_residual || !function_residual) {
            throw std::invalid_argument("resolvent_identities: null argument");
        }
        auto rep = tk->gl->verify_resolvent_identities(p->p);
        *scalar_residual = rep.scalar_residual;
        *function_residual = rep.function_residual;
    });
}

vfgl_status vfgl_gamma(vfgl_toolkit* tk, double b, double beta, double* out) {
    return guard([&] {
        if (!tk || !out) throw std::invalid_argument("gamma: null argument");
        tk->ensure_constants();
        *out = tk->lin->gamma(beta, b);
    });
}

vfgl_status vfgl_gamma_derivatives(vfgl_toolkit* tk, double b, double* first, double* second) {
    return guard([&] {
        if (!tk || !first || !second) throw std::invalid_argument("gamma_derivatives: null argument");
        tk->ensure_constants();
        auto [d1, d2] = tk->lin->gamma_derivatives_at_zero(b);
        *first = d1;
        *second = d2;
    });
}

vfgl_status vfgl_gamma_scan(vfgl_toolkit* tk, double b, double beta_min, double beta_max,
                            int steps, double* betas, double* gammas) {
    return guard([&] {
        if (!tk || !betas || !gammas) throw std::invalid_argument("gamma_scan: null argument");
        tk->ensure_constants();
        auto curve = tk->lin->gamma_scan(b, beta_min, beta_max, steps);
        for (int i = 0; i < steps; ++i) {
            betas[i] = curve.betas[static_cast<size_t>(i)];
            gammas[i] = curve.gammas[static_cast<size_t>(i)];
        }
    });
}

void vfgl_strip_options_default(vfgl_strip_options* opts) {
    if (!opts) return;
    opts->hx_target = 0.05;
    opts->hy_target = 0.05;
    opts->half_height = 6.0;
    opts->seed = 1;
    opts->gradient_tol = 1e-6;
    opts->defect_correction = 1;
}

vfgl_status vfgl_periodic_ground(vfgl_toolkit* tk, double b, double R, double* out) {
    return guard([&] {
        if (!tk || !out) throw std::invalid_argument("periodic_ground: null argument");
        tk->ensure_constants();
        *out = tk->strip->periodic_ground(b, R);
    });
}

vfgl_status vfgl_dirichlet_minimize(vfgl_toolkit* tk, double b, double R,
                                    const vfgl_strip_options* opts, double* energy,
                                    vfgl_strip_field** field_out) {
    return guard([&] {
        if (!tk || !energy) throw std::invalid_argument("dirichlet_minimize: null argument");
        tk->ensure_constants();
        auto res = tk->strip->dirichlet_minimize(b, R, to_cpp(opts));
        *energy = res.energy;
        if (field_out) *field_out = new vfgl_strip_field{std::move(res.field)};
    });
}

vfgl_status vfgl_strip_field_dims(const vfgl_strip_field* f, int* nx, int* ny) {
    return guard([&] {
        if (!f || !nx || !ny) throw std::invalid_argument("strip_field_dims: null argument");
        *nx = f->f.grid.nx;
        *ny = f->f.grid.ny;
    });
}

vfgl_status vfgl_strip_field_copy(const vfgl_strip_field* f, double* x1, double* x2, double* re,
                                  double* im) {
    return guard([&] {
        if (!f || !x1 || !x2 || !re || !im) {
            throw std::invalid_argument("strip_field_copy: null argument");
        }
        const auto& g = f->f.grid;
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const size_t k = g.index(i, j);
                x1[k] = g.x1(i);
                x2[k] = g.x2(j);
                re[k] = f->f.u[k].real();
                im[k] = f->f.u[k].imag();
            }
        }
    });
}

void vfgl_strip_field_free(vfgl_strip_field* f) { delete f; }

vfgl_status vfgl_estimate_el(vfgl_toolkit* tk, double L, const double* R_list, int nR,
                             const vfgl_strip_options* opts, vfgl_el_row* out) {
    return guard([&] {
        if (!tk || !R_list || !out) throw std::invalid_argument("estimate_el: null argument");
        tk->ensure_constants();
        auto row = tk->strip->estimate_E(L, std::span<const double>(R_list, static_cast<size_t>(nR)),
                                         to_cpp(opts));
        out->L = row.L;
        out->b = row.b;
        out->E = row.E;
        out->lower = row.lower;
        out->slack_coeff = row.slack_coeff;
        out->fit_residual = row.fit_residual;
    });
}

vfgl_status vfgl_eltable_create(double lambda0, double u0_l4_fourth, vfgl_eltable** out) {
    return guard([&] {
        if (!out) throw std::invalid_argument("eltable_create: null output");
        *out = new vfgl_eltable{vfgl::ELTable(lambda0, u0_l4_fourth)};
    });
}

vfgl_status vfgl_eltable_add_row(vfgl_eltable* t, const vfgl_el_row* row) {
    return guard([&] {
        if (!t || !row) throw std::invalid_argument("eltable_add_row: null argument");
        vfgl::ELRow r;
        r.L = row->L;
        r.b = row->b;
        r.E = row->E;
        r.lower = row->lower;
        r.slack_coeff = row->slack_coeff;
        r.fit_residual = row->fit_residual;
        t->t.add_row(r);
    });
}

vfgl_status vfgl_eltable_enable_surrogate(vfgl_eltable* t, int on) {
    return guard([&] {
        if (!t) throw std::invalid_argument("eltable_enable_surrogate: null argument");
        t->t.enable_surrogate(on != 0);
    });
}

vfgl_status vfgl_eltable_lookup(vfgl_eltable* t, double L, double* out) {
    return guard([&] {
        if (!t || !out) throw std::invalid_argument("eltable_lookup: null argument");
        *out = t->t.lookup(L);
    });
}

vfgl_status vfgl_eltable_save_csv(vfgl_eltable* t, const char* path) {
    return guard([&] {
        if (!t || !path) throw std::invalid_argument("eltable_save_csv: null argument");
        t->t.save_csv(path);
    });
}

vfgl_status vfgl_eltable_load_csv(const char* path, vfgl_eltable** out) {
    return guard([&] {
        if (!path || !out) throw std::invalid_argument("eltable_load_csv: null argument");
        *out = new vfgl_eltable{vfgl::ELTable::load_csv(path)};
    });
}

void vfgl_eltable_free(vfgl_eltable* t) { delete t; }

vfgl_status vfgl_field_builtin(const char* name, vfgl_field** out) {
    return guard([&] {
        if (!name || !out) throw std::invalid_argument("field_builtin: null argument");
        *out = new vfgl_field{vfgl::FieldProfile::builtin(name)};
    });
}

vfgl_status vfgl_field_from_csv(const char* path, vfgl_field** out) {
    return guard([&] {
        if (!path || !out) throw std::invalid_argument("field_from_csv: null argument");
        std::ifstream in(path);
        if (!in) throw std::invalid_argument(std::string("field_from_csv: cannot open ") + path);
        std::string line;
        std::getline(in, line); // header x,y,B0
        std::map<double, std::map<double, double>> grid;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            for (char& c : line) {
                if (c == ',') c = ' ';
            }
            std::stringstream ss(line);
            double x, y, v;
            if (ss >> x >> y >> v) grid[y][x] = v;
        }
        if (grid.empty()) throw std::invalid_argument("field_from_csv: no samples");
        std::vector<double> ys, xs;
        for (const auto& [y, rowv] : grid) ys.push_back(y);
        for (const auto& [x, v] : grid.begin()->second) xs.push_back(x);
        std::vector<double> vals;
        vals.reserve(xs.size() * ys.size());
        for (const auto& [y, rowv] : grid) {
            if (rowv.size() != xs.size()) {
                throw std::invalid_argument("field_from_csv: ragged lattice");
            }
            for (const auto& [x, v] : rowv) vals.push_back(v);
        }
        *out = new vfgl_field{vfgl::FieldProfile::from_grid(xs, ys, vals)};
    });
}

void vfgl_field_free(vfgl_field* f) { delete f; }

vfgl_status vfgl_extract_zero_set(const vfgl_field* f, const char* omega, double resolution,
                                  vfgl_curve** out) {
    return guard([&] {
        if (!f || !out) throw std::invalid_argument("extract_zero_set: null argument");
        auto shape = parse_omega(omega);
        *out = new vfgl_curve{vfgl::extract_zero_set(f->f, shape, resolution)};
    });
}

int vfgl_curve_components(const vfgl_curve* c) {
    return c ? static_cast<int>(c->c.components.size()) : 0;
}

int64_t vfgl_curve_size(const vfgl_curve* c, int component) {
    if (!c || component < 0 || component >= static_cast<int>(c->c.components.size())) return 0;
    return static_cast<int64_t>(c->c.components[static_cast<size_t>(component)].vertices.size());
}

vfgl_status vfgl_curve_copy(const vfgl_curve* c, int component, double* x, double* y,
                            double* arclen, double* grad_norm) {
    return guard([&] {
        if (!c || !x || !y) throw std::invalid_argument("curve_copy: null argument");
        if (component < 0 || component >= static_cast<int>(c->c.components.size())) {
            throw std::invalid_argument("curve_copy: bad component index");
        }
        const auto& comp = c->c.components[static_cast<size_t>(component)];
        for (size_t k = 0; k < comp.vertices.size(); ++k) {
            x[k] = comp.vertices[k][0];
            y[k] = comp.vertices[k][1];
            if (arclen) arclen[k] = comp.arclen[k];
            if (grad_norm) grad_norm[k] = comp.grad_norm[k];
        }
    });
}

double vfgl_curve_length(const vfgl_curve* c) { return c ? c->c.total_length() : 0.0; }

void vfgl_curve_free(vfgl_curve* c) { delete c; }

vfgl_status vfgl_domain_energy(vfgl_toolkit* tk, const vfgl_field* f, const vfgl_curve* c,
                               double kappa, double rho, double H, vfgl_eltable* table,
                               vfgl_domain_report* out) {
    return guard([&] {
        if (!tk || !f || !c || !out) throw std::invalid_argument("domain_energy: null argument");
        tk->ensure_constants();
        const double l0 = tk->spectral->lambda0();
        const double u044 =
            tk->spectral->grid().l4_norm4(tk->spectral->ground(tk->spectral->tau0()).vector);
        auto report = vfgl::classify_assumption(c->c, f->f, l0);
        out->c0 = report.c0;
        out->gamma_coef = report.gamma_coef;
        out->h_c2_at_kappa = report.critical_field(kappa);
        out->gamma_length = report.gamma_length;
        out->classification = static_cast<int>(report.classification);

        double h_eff = H;
        double rho_eff = rho;
        if (rho > 0.0) {
            h_eff = (report.gamma_coef - rho) * kappa * kappa;
        } else {
            rho_eff = report.gamma_coef - H / (kappa * kappa);
        }

        vfgl::ELTable surrogate(l0, u044);
        surrogate.enable_surrogate(true);
        const vfgl::ELTable& tbl = table ? table->t : surrogate;
        out->leading = vfgl::leading_order_energy(c->c, f->f, kappa, h_eff, tbl);

        if (report.classification != vfgl::AssumptionCase::ViolatesAssumption && rho_eff > 0.0 &&
            rho_eff < 1.0) {
            auto nc = vfgl::near_critical_energy(c->c, f->f, report, kappa, rho_eff, l0, u044);
            out->near_critical = nc.energy;
            out->gamma_kappa_length = nc.gamma_kappa_len;
        } else {
            out->near_critical = 0.0;
            out->gamma_kappa_length = 0.0;
        }
    });
}

vfgl_status vfgl_disk_covering(const vfgl_field* f, const vfgl_curve* c, const char* omega,
                               double ell, vfgl_covering_report* out) {
    return guard([&] {
        if (!f || !c || !out) throw std::invalid_argument("disk_covering: null argument");
        auto shape = parse_omega(omega);
        auto rep = vfgl::disk_covering(c->c, f->f, shape, ell);
        out->ell = rep.ell;
        out->N = rep.N;
        out->count_defect = rep.count_defect;
        out->max_spacing_defect = rep.max_spacing_defect;
        out->max_per_disk_defect = 0.0;
        for (double d : rep.per_disk_defect) {
            out->max_per_disk_defect = std::max(out->max_per_disk_defect, d);
        }
    });
}

vfgl_status vfgl_gauge_field(const vfgl_field* f, const char* omega, double resolution,
                             vfgl_gauge_report* out) {
    return guard([&] {
        if (!f || !out) throw std::invalid_argument("gauge_field: null argument");
        auto shape = parse_omega(omega);
        auto gf = vfgl::compute_gauge_field(f->f, shape, resolution);
        out->curl_residual_l2 = gf.curl_residual_l2;
        out->div_residual_l2 = gf.div_residual_l2;
        out->boundary_flux_max = gf.boundary_flux_max;
        out->nx = gf.nx;
        out->ny = gf.ny;
    });
}

} // extern "C"

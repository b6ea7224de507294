/* C interface to the vanishing-field Ginzburg-Landau toolkit.
 *
 * All functions return a vfgl_status; on failure the thread-local message
 * from vfgl_last_error() describes the problem.  Objects behind opaque
 * handles must be released with the matching *_free call.
 */
#ifndef VFGL_H
#define VFGL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vfgl_status {
    VFGL_OK = 0,
    VFGL_ERR_INVALID_ARGUMENT = 1,
    VFGL_ERR_NUMERICAL = 2,
    VFGL_ERR_IO = 3,
    VFGL_ERR_STATE = 4
} vfgl_status;

const char* vfgl_last_error(void);
const char* vfgl_version(void);

/* ------------------------------------------------------------------ */
/* Toolkit context: the 1D grid and every cached solver built on it.    */

typedef struct vfgl_toolkit vfgl_toolkit;

vfgl_status vfgl_toolkit_create(double grid_half_width, int grid_points, double alpha_min,
                                double alpha_max, vfgl_toolkit** out);
void vfgl_toolkit_free(vfgl_toolkit* tk);

typedef struct vfgl_constants {
    double tau0;
    double lambda0;
    double lambda_second;  /* lambda''(tau0) */
    double u0_l4_fourth;   /* ||u0||_4^4 */
    double grid_half_width;
    int grid_points;
} vfgl_constants;

/* Locates the band minimum (bracket [-2, 0]) and fills the bundle. */
vfgl_status vfgl_compute_constants(vfgl_toolkit* tk, vfgl_constants* out);

vfgl_status vfgl_lambda(vfgl_toolkit* tk, double alpha, double* lambda1,
                        double* lambda2 /* nullable */);
vfgl_status vfgl_lambda_prime(vfgl_toolkit* tk, double alpha, double* out);
vfgl_status vfgl_z_interval(vfgl_toolkit* tk, double b, double* z1, double* z2);

/* Spectral curve sampled on [alpha_min, alpha_max]; arrays of length n. */
vfgl_status vfgl_lambda_scan(vfgl_toolkit* tk, double alpha_min, double alpha_max, int n,
                             int with_second, double* alphas, double* lambda1,
                             double* lambda2 /* nullable unless with_second */);

/* ------------------------------------------------------------------ */
/* 1D quartic profiles.                                                 */

typedef struct vfgl_profile vfgl_profile;

typedef struct vfgl_profile_stats {
    double alpha;
    double b;
    double energy;       /* direct functional value */
    double f4norm;       /* ||f||_4^4 */
    double l2norm;       /* ||f||_2 */
    double linf;
    double delta;        /* <f, u_alpha> */
    double el_residual;
    double fh_residual;  /* int (t^2/2 + alpha) f^2 */
} vfgl_profile_stats;

vfgl_status vfgl_minimize_profile(vfgl_toolkit* tk, double alpha, double b, vfgl_profile** out);
vfgl_status vfgl_picard_solve(vfgl_toolkit* tk, double alpha, double b, vfgl_profile** out);
vfgl_status vfgl_find_xi(vfgl_toolkit* tk, double b, double* xi, vfgl_profile** out /* nullable */);
vfgl_status vfgl_profile_info(vfgl_toolkit* tk, const vfgl_profile* p, vfgl_profile_stats* out);
int64_t vfgl_profile_size(const vfgl_profile* p);
vfgl_status vfgl_profile_copy(vfgl_toolkit* tk, const vfgl_profile* p, double* t, double* f);
void vfgl_profile_free(vfgl_profile* p);

/* Residuals of the fixed-point identities of the resolvent form. */
vfgl_status vfgl_resolvent_identities(vfgl_toolkit* tk, const vfgl_profile* p,
                                      double* scalar_residual, double* function_residual);

/* ------------------------------------------------------------------ */
/* Linearized spectrum gamma(beta, b).                                  */

vfgl_status vfgl_gamma(vfgl_toolkit* tk, double b, double beta, double* out);
vfgl_status vfgl_gamma_derivatives(vfgl_toolkit* tk, double b, double* first, double* second);
vfgl_status vfgl_gamma_scan(vfgl_toolkit* tk, double b, double beta_min, double beta_max,
                            int steps, double* betas, double* gammas);

/* ------------------------------------------------------------------ */
/* Strip functional.                                                    */

typedef struct vfgl_strip_field vfgl_strip_field;

typedef struct vfgl_strip_options {
    double hx_target;   /* <= 0 selects the default 0.05 */
    double hy_target;
    double half_height; /* T; <= 0 selects 6 */
    uint64_t seed;
    double gradient_tol;   /* <= 0 selects 1e-6 */
    int defect_correction; /* nonzero: matched-grid correction in estimates */
} vfgl_strip_options;

void vfgl_strip_options_default(vfgl_strip_options* opts);

vfgl_status vfgl_periodic_ground(vfgl_toolkit* tk, double b, double R, double* out);
vfgl_status vfgl_dirichlet_minimize(vfgl_toolkit* tk, double b, double R,
                                    const vfgl_strip_options* opts, double* energy,
                                    vfgl_strip_field** field_out /* nullable */);
vfgl_status vfgl_strip_field_dims(const vfgl_strip_field* f, int* nx, int* ny);
/* Arrays of length nx*ny, row-major in j (x fastest). */
vfgl_status vfgl_strip_field_copy(const vfgl_strip_field* f, double* x1, double* x2, double* re,
                                  double* im);
void vfgl_strip_field_free(vfgl_strip_field* f);

typedef struct vfgl_el_row {
    double L;
    double b;
    double E;
    double lower;        /* periodic per-length value */
    double slack_coeff;  /* bracket coefficient c of E + c R^{-2/3} */
    double fit_residual;
} vfgl_el_row;

vfgl_status vfgl_estimate_el(vfgl_toolkit* tk, double L, const double* R_list, int nR,
                             const vfgl_strip_options* opts, vfgl_el_row* out);

/* ------------------------------------------------------------------ */
/* Reference-function tables.                                           */

typedef struct vfgl_eltable vfgl_eltable;

vfgl_status vfgl_eltable_create(double lambda0, double u0_l4_fourth, vfgl_eltable** out);
vfgl_status vfgl_eltable_add_row(vfgl_eltable* t, const vfgl_el_row* row);
vfgl_status vfgl_eltable_enable_surrogate(vfgl_eltable* t, int on);
vfgl_status vfgl_eltable_lookup(vfgl_eltable* t, double L, double* out);
vfgl_status vfgl_eltable_save_csv(vfgl_eltable* t, const char* path);
vfgl_status vfgl_eltable_load_csv(const char* path, vfgl_eltable** out);
void vfgl_eltable_free(vfgl_eltable* t);

/* ------------------------------------------------------------------ */
/* Planar domains.                                                      */

typedef struct vfgl_field vfgl_field;
typedef struct vfgl_curve vfgl_curve;

/* name: "linear" (y - x) or "parabola" (y - x^2). */
vfgl_status vfgl_field_builtin(const char* name, vfgl_field** out);
/* CSV with header x,y,B0 on a rectangular lattice. */
vfgl_status vfgl_field_from_csv(const char* path, vfgl_field** out);
void vfgl_field_free(vfgl_field* f);

/* omega: "disc" (unit), "disc:<radius>", or a polygon file of x,y lines. */
vfgl_status vfgl_extract_zero_set(const vfgl_field* f, const char* omega, double resolution,
                                  vfgl_curve** out);
int vfgl_curve_components(const vfgl_curve* c);
int64_t vfgl_curve_size(const vfgl_curve* c, int component);
vfgl_status vfgl_curve_copy(const vfgl_curve* c, int component, double* x, double* y,
                            double* arclen, double* grad_norm);
double vfgl_curve_length(const vfgl_curve* c);
void vfgl_curve_free(vfgl_curve* c);

typedef enum vfgl_assumption_case {
    VFGL_CASE_WHOLE_CURVE = 0,
    VFGL_CASE_FINITE_NONDEGENERATE = 1,
    VFGL_CASE_VIOLATES_ASSUMPTION = 2
} vfgl_assumption_case;

typedef struct vfgl_domain_report {
    double c0;
    double gamma_coef;   /* lambda0^{-3/2} / c0 */
    double h_c2_at_kappa; /* gamma_coef * kappa^2 for the kappa passed in */
    double gamma_length;
    double gamma_kappa_length;
    double leading;       /* kappa-scaled leading-order energy, NaN if no table */
    double near_critical; /* Theorem-style display value */
    int classification;   /* vfgl_assumption_case */
} vfgl_domain_report;

/* Full report at H = (gamma - rho) kappa^2 (rho > 0) or an explicit H
 * (rho <= 0).  `table` may be NULL: the leading term then uses the
 * closed-form surrogate near the critical length. */
vfgl_status vfgl_domain_energy(vfgl_toolkit* tk, const vfgl_field* f, const vfgl_curve* c,
                               double kappa, double rho, double H, vfgl_eltable* table,
                               vfgl_domain_report* out);

typedef struct vfgl_covering_report {
    double ell;
    int N;
    double count_defect;
    double max_spacing_defect;
    double max_per_disk_defect;
} vfgl_covering_report;

vfgl_status vfgl_disk_covering(const vfgl_field* f, const vfgl_curve* c, const char* omega,
                               double ell, vfgl_covering_report* out);

typedef struct vfgl_gauge_report {
    double curl_residual_l2;
    double div_residual_l2;
    double boundary_flux_max;
    int nx;
    int ny;
} vfgl_gauge_report;

vfgl_status vfgl_gauge_field(const vfgl_field* f, const char* omega, double resolution,
                             vfgl_gauge_report* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VFGL_H */

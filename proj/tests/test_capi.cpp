#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "vfgl.h"

namespace {
vfgl_toolkit* toolkit() {
    static vfgl_toolkit* tk = [] {
        vfgl_toolkit* t = nullptr;
        REQUIRE(vfgl_toolkit_create(8.0, 20001, -3.0, 3.0, &t) == VFGL_OK);
        return t;
    }();
    return tk;
}
} // namespace

TEST_CASE("constants bundle carries the sane band minimum") {
    vfgl_constants c;
    REQUIRE(vfgl_compute_constants(toolkit(), &c) == VFGL_OK);
    CHECK(c.tau0 < 0.0);
    CHECK(std::abs(c.lambda0 - 0.57) <= 0.01);
    CHECK(c.lambda_second > 0.0);
    CHECK(c.u0_l4_fourth > 0.0);
    CHECK(c.grid_points == 20001);
}

TEST_CASE("error paths return codes and messages") {
    vfgl_toolkit* bad = nullptr;
    CHECK(vfgl_toolkit_create(1.0, 101, -3.0, 3.0, &bad) == VFGL_ERR_INVALID_ARGUMENT);
    CHECK(std::string(vfgl_last_error()).size() > 0);
    double out;
    CHECK(vfgl_lambda(nullptr, 0.0, &out, nullptr) == VFGL_ERR_INVALID_ARGUMENT);
    CHECK(vfgl_lambda(toolkit(), 5.0, &out, nullptr) == VFGL_ERR_INVALID_ARGUMENT); // alpha range
    vfgl_field* f = nullptr;
    CHECK(vfgl_field_builtin("unknown-name", &f) == VFGL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("profile lifecycle through the C surface") {
    vfgl_constants c;
    REQUIRE(vfgl_compute_constants(toolkit(), &c) == VFGL_OK);
    const double b = c.lambda0 + 1e-2;
    vfgl_profile* p = nullptr;
    REQUIRE(vfgl_minimize_profile(toolkit(), c.tau0, b, &p) == VFGL_OK);
    vfgl_profile_stats st;
    REQUIRE(vfgl_profile_info(toolkit(), p, &st) == VFGL_OK);
    CHECK(st.energy < 0.0);
    CHECK(std::abs(st.energy + 0.5 * b * st.f4norm) <= 1e-9 * std::abs(st.energy));
    CHECK(st.linf <= 1.0 + 1e-10);

    const int64_t n = vfgl_profile_size(p);
    REQUIRE(n == 20001);
    std::vector<double> t(static_cast<size_t>(n)), fv(static_cast<size_t>(n));
    REQUIRE(vfgl_profile_copy(toolkit(), p, t.data(), fv.data()) == VFGL_OK);
    CHECK(t.front() == doctest::Approx(-8.0));
    CHECK(t.back() == doctest::Approx(8.0));
    CHECK(fv.front() == 0.0);

    double sres, fres;
    REQUIRE(vfgl_resolvent_identities(toolkit(), p, &sres, &fres) == VFGL_OK);
    CHECK(sres <= 1e-7);
    CHECK(fres <= 1e-7);
    vfgl_profile_free(p);

    vfgl_profile* q = nullptr;
    double xi;
    REQUIRE(vfgl_find_xi(toolkit(), b, &xi, &q) == VFGL_OK);
    CHECK(xi < 0.0);
    vfgl_profile_free(q);
}

TEST_CASE("gamma scans through the C surface") {
    vfgl_constants c;
    REQUIRE(vfgl_compute_constants(toolkit(), &c) == VFGL_OK);
    const double b = c.lambda0 + 1e-2;
    double g0;
    REQUIRE(vfgl_gamma(toolkit(), b, 0.0, &g0) == VFGL_OK);
    CHECK(std::abs(g0) <= 1e-6);
    double d1, d2;
    REQUIRE(vfgl_gamma_derivatives(toolkit(), b, &d1, &d2) == VFGL_OK);
    CHECK(std::abs(d1) <= 1e-5);
    std::vector<double> betas(21), gammas(21);
    REQUIRE(vfgl_gamma_scan(toolkit(), b, -1.0, 1.0, 21, betas.data(), gammas.data()) == VFGL_OK);
    for (double g : gammas) CHECK(g >= -1e-6);
}

TEST_CASE("strip surface: periodic values and field export") {
    vfgl_constants c;
    REQUIRE(vfgl_compute_constants(toolkit(), &c) == VFGL_OK);
    const double b = c.lambda0 + 5e-3;
    double e8, e16;
    REQUIRE(vfgl_periodic_ground(toolkit(), b, 8.0, &e8) == VFGL_OK);
    REQUIRE(vfgl_periodic_ground(toolkit(), b, 16.0, &e16) == VFGL_OK);
    CHECK(e16 == doctest::Approx(2.0 * e8).epsilon(1e-13));

    vfgl_strip_options so;
    vfgl_strip_options_default(&so);
    so.hx_target = 0.1;
    so.hy_target = 0.1;
    double e;
    vfgl_strip_field* field = nullptr;
    REQUIRE(vfgl_dirichlet_minimize(toolkit(), b, 8.0, &so, &e, &field) == VFGL_OK);
    CHECK(e >= e8); // Dirichlet dominates periodic
    int nx, ny;
    REQUIRE(vfgl_strip_field_dims(field, &nx, &ny) == VFGL_OK);
    std::vector<double> x1(static_cast<size_t>(nx) * ny), x2(x1.size()), re(x1.size()),
        im(x1.size());
    REQUIRE(vfgl_strip_field_copy(field, x1.data(), x2.data(), re.data(), im.data()) == VFGL_OK);
    CHECK(x1.front() == doctest::Approx(-8.0));
    vfgl_strip_field_free(field);
}

TEST_CASE("eltable surface round trip") {
    vfgl_constants c;
    REQUIRE(vfgl_compute_constants(toolkit(), &c) == VFGL_OK);
    vfgl_eltable* t = nullptr;
    REQUIRE(vfgl_eltable_create(c.lambda0, c.u0_l4_fourth, &t) == VFGL_OK);
    vfgl_el_row r;
    r.L = 2.0;
    r.b = std::pow(2.0, -2.0 / 3.0);
    r.E = -4e-4;
    r.lower = -4.2e-4;
    r.slack_coeff = 0.01;
    r.fit_residual = 1e-9;
    REQUIRE(vfgl_eltable_add_row(t, &r) == VFGL_OK);
    REQUIRE(vfgl_eltable_enable_surrogate(t, 1) == VFGL_OK);
    double v;
    REQUIRE(vfgl_eltable_lookup(t, 2.0, &v) == VFGL_OK);
    CHECK(v == doctest::Approx(-4e-4));
    REQUIRE(vfgl_eltable_save_csv(t, "capi_eltable_test.csv") == VFGL_OK);
    vfgl_eltable* t2 = nullptr;
    REQUIRE(vfgl_eltable_load_csv("capi_eltable_test.csv", &t2) == VFGL_OK);
    double v2;
    REQUIRE(vfgl_eltable_lookup(t2, 2.0, &v2) == VFGL_OK);
    CHECK(v2 == v);
    vfgl_eltable_free(t);
    vfgl_eltable_free(t2);
    std::remove("capi_eltable_test.csv");
}

TEST_CASE("domain surface: curves, reports, covering, gauge field") {
    vfgl_field* f = nullptr;
    REQUIRE(vfgl_field_builtin("parabola", &f) == VFGL_OK);
    vfgl_curve* curve = nullptr;
    REQUIRE(vfgl_extract_zero_set(f, "disc", 0.01, &curve) == VFGL_OK);
    CHECK(vfgl_curve_components(curve) == 1);
    const int64_t n = vfgl_curve_size(curve, 0);
    CHECK(n > 100);
    std::vector<double> x(static_cast<size_t>(n)), y(x.size()), s(x.size()), g(x.size());
    REQUIRE(vfgl_curve_copy(curve, 0, x.data(), y.data(), s.data(), g.data()) == VFGL_OK);
    CHECK(std::abs(vfgl_curve_length(curve) - 2.08199) <= 1e-3);

    vfgl_domain_report rep;
    REQUIRE(vfgl_domain_energy(toolkit(), f, curve, 100.0, 1e-3, 0.0, nullptr, &rep) == VFGL_OK);
    CHECK(rep.classification == VFGL_CASE_FINITE_NONDEGENERATE);
    CHECK(rep.c0 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.near_critical < 0.0);
    CHECK(rep.gamma_kappa_length > 0.0);

    vfgl_covering_report cov;
    REQUIRE(vfgl_disk_covering(f, curve, "disc", 0.02, &cov) == VFGL_OK);
    CHECK(cov.N > 10);
    CHECK(cov.max_spacing_defect <= 4.0 * 0.02 * 0.02);

    vfgl_gauge_report gr;
    REQUIRE(vfgl_gauge_field(f, "disc", 0.04, &gr) == VFGL_OK);
    CHECK(gr.div_residual_l2 <= 1e-2);

    vfgl_curve_free(curve);
    vfgl_field_free(f);
}

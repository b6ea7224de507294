#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "vfgl/eltable.hpp"

namespace vfgl {

// Planar domain: the unit-style disc or a simple polygon.  Both are simply
// connected, which the gauge-field construction requires.
class DomainShape {
public:
    static DomainShape disc(double radius = 1.0);
    static DomainShape polygon(std::vector<std::array<double, 2>> vertices);

    bool inside(double x, double y) const;
    std::array<double, 4> bbox() const; // xmin, ymin, xmax, ymax

    // Distance from a point to the boundary (positive inside).
    double boundary_distance(double x, double y) const;

    // Fraction s in (0, 1] along the segment p_in -> p_out at which the
    // boundary is crossed (p_in inside, p_out outside).
    double crossing_fraction(const std::array<double, 2>& p_in,
                             const std::array<double, 2>& p_out) const;

    // Project a near-boundary point onto the boundary and return the outward
    // unit normal there.
    std::array<double, 2> project_boundary(const std::array<double, 2>& p,
                                           std::array<double, 2>* normal = nullptr) const;

    bool is_disc() const { return kind_ == Kind::Disc; }
    double disc_radius() const { return radius_; }

private:
    enum class Kind { Disc, Polygon };
    Kind kind_ = Kind::Disc;
    double radius_ = 1.0;
    std::vector<std::array<double, 2>> verts_;
};

// Magnetic field profile B0 with its gradient: analytic closures for the
// builtin examples, or bicubic interpolation of a sampled rectangular grid.
struct FieldProfile {
    std::function<double(double, double)> value;
    std::function<std::array<double, 2>(double, double)> gradient;
    std::string name;
    bool interpolated = false;

    static FieldProfile builtin(const std::string& name); // "linear": y-x, "parabola": y-x^2
    static FieldProfile from_grid(const std::vector<double>& xs, const std::vector<double>& ys,
                                  const std::vector<double>& values); // bicubic, row-major [iy][ix]

    // |B0| + |grad B0| > 0 on a validation lattice over the closed domain.
    void validate(const DomainShape& omega, double resolution) const;
};

// One connected component of the zero set: refined polyline vertices with
// arc length, |grad B0| samples, and endpoint type.
struct ZeroCurveComponent {
    std::vector<std::array<double, 2>> vertices;
    std::vector<double> arclen;      // cumulative, arclen[0] = 0
    std::vector<double> grad_norm;   // |grad B0| at vertices
    bool closed = false;
    bool starts_on_boundary = false;
    bool ends_on_boundary = false;

    double length() const { return arclen.empty() ? 0.0 : arclen.back(); }
};

struct ZeroCurve {
    std::vector<ZeroCurveComponent> components;
    double total_length() const;
};

ZeroCurve extract_zero_set(const FieldProfile& field, const DomainShape& omega,
                           double resolution);

// Insert Newton-projected midpoints until no segment exceeds max_segment.
ZeroCurve refine_zero_curve(const ZeroCurve& curve, const FieldProfile& field,
                            double max_segment);

enum class AssumptionCase { WholeCurve, FiniteNondegenerate, ViolatesAssumption };

struct CriticalFieldReport {
    double c0 = 0.0;          // min over Gamma of |grad B0|
    double gamma_coef = 0.0;  // lambda0^{-3/2} / c0
    double gamma_length = 0.0;
    AssumptionCase classification = AssumptionCase::ViolatesAssumption;
    int minima_count = 0;
    std::vector<std::array<double, 2>> minima; // positions of interior minima

    double critical_field(double kappa) const { return gamma_coef * kappa * kappa; }
};

CriticalFieldReport classify_assumption(const ZeroCurve& curve, const FieldProfile& field,
                                        double lambda0);

// kappa * int_Gamma (g H / kappa^2)^{1/3} E(g H / kappa^2) ds  with E from
// the table (clamped to 0 at and above the critical length).
double leading_order_energy(const ZeroCurve& curve, const FieldProfile& field, double kappa,
                            double H, const ELTable& table);

struct NearCriticalResult {
    double energy = 0.0;        // the Theorem-style display value
    double integral = 0.0;      // int_Gamma ((H g / kappa^2)^{-2/3} - lambda0)_+^2 ds
    double gamma_kappa_len = 0.0; // |Gamma_kappa|
    double H = 0.0;
};

NearCriticalResult near_critical_energy(const ZeroCurve& curve, const FieldProfile& field,
                                        const CriticalFieldReport& report, double kappa,
                                        double rho, double lambda0, double u0_l4_fourth);

// Ratio of the leading-order form to the near-critical display at
// H = (gamma - rho) kappa^2; tends to 1 as rho -> 0.
double consistency_with_leading(const ZeroCurve& curve, const FieldProfile& field,
                                const CriticalFieldReport& report, double kappa, double rho,
                                const ELTable& table, double lambda0, double u0_l4_fourth);

struct CoveringReport {
    double ell = 0.0;
    int N = 0;
    double count_defect = 0.0;        // | N - |Gamma| / (2 ell) |
    double max_spacing_defect = 0.0;  // max_j | dist_Gamma(a_j, a_{j+1}) - 2 ell |
    std::vector<double> per_disk_defect; // | arc inside D(a_j, ell) - 2 ell |
    std::vector<std::array<double, 2>> points;
};

CoveringReport disk_covering(const ZeroCurve& curve, const FieldProfile& field,
                             const DomainShape& omega, double ell);

struct GaugeField {
    double xmin = 0.0, ymin = 0.0, h = 0.0;
    int nx = 0, ny = 0;
    std::vector<uint8_t> mask; // 1 = interior node
    std::vector<double> phi;   // stream function, 0 outside
    std::vector<double> fx, fy;
    double curl_residual_l2 = 0.0;
    double div_residual_l2 = 0.0;
    double boundary_flux_max = 0.0;
    size_t index(int i, int j) const { return static_cast<size_t>(j) * nx + i; }
};

// Stream-function construction of the divergence-free field with
// curl F = B0 and zero boundary flux (Shortley-Weller discretization).
GaugeField compute_gauge_field(const FieldProfile& field, const DomainShape& omega,
                               double resolution);

// Exact rational arithmetic for the remainder-exponent bookkeeping: with
// rho ~ kappa^{-s}, the near-critical leading term scales like
// kappa^{1 - (5/2) s} and a remainder kappa^{p} is negligible iff
// p < 1 - (5/2) s.
struct Rational {
    long long num = 0;
    long long den = 1;
    static Rational of(long long n, long long d);
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    bool operator<(const Rational& o) const;
    bool operator==(const Rational& o) const;
};

inline Rational lower_bound_remainder_exponent() { return Rational::of(11, 12); }
inline Rational upper_bound_remainder_exponent() { return Rational::of(15, 16); }

Rational leading_term_exponent(const Rational& s); // 1 - (5/2) s
bool remainder_negligible(const Rational& remainder_exponent, const Rational& s);

} // namespace vfgl

#include "vfgl/domain.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>

#include "vfgl/errors.hpp"

namespace vfgl {

// ---------------------------------------------------------------------------
// DomainShape
// ---------------------------------------------------------------------------

DomainShape DomainShape::disc(double radius) {
    DomainShape d;
    d.kind_ = Kind::Disc;
    d.radius_ = radius;
    return d;
}

DomainShape DomainShape::polygon(std::vector<std::array<double, 2>> vertices) {
    if (vertices.size() < 3) throw std::invalid_argument("polygon: need at least 3 vertices");
    DomainShape d;
    d.kind_ = Kind::Polygon;
    d.verts_ = std::move(vertices);
    return d;
}

bool DomainShape::inside(double x, double y) const {
    if (kind_ == Kind::Disc) return x * x + y * y < radius_ * radius_;
    bool in = false;
    const size_t n = verts_.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = verts_[i];
        const auto& b = verts_[j];
        if ((a[1] > y) != (b[1] > y)) {
            const double t = (y - a[1]) / (b[1] - a[1]);
            if (x < a[0] + t * (b[0] - a[0])) in = !in;
        }
    }
    return in;
}

std::array<double, 4> DomainShape::bbox() const {
    if (kind_ == Kind::Disc) return {-radius_, -radius_, radius_, radius_};
    double xmin = verts_[0][0], ymin = verts_[0][1], xmax = xmin, ymax = ymin;
    for (const auto& v : verts_) {
        xmin = std::min(xmin, v[0]);
        xmax = std::max(xmax, v[0]);
        ymin = std::min(ymin, v[1]);
        ymax = std::max(ymax, v[1]);
    }
    return {xmin, ymin, xmax, ymax};
}

namespace {
double point_segment_distance(double px, double py, const std::array<double, 2>& a,
                              const std::array<double, 2>& b) {
    const double vx = b[0] - a[0], vy = b[1] - a[1];
    const double wx = px - a[0], wy = py - a[1];
    const double vv = vx * vx + vy * vy;
    double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = wx - t * vx, dy = wy - t * vy;
    return std::hypot(dx, dy);
}
} // namespace

double DomainShape::boundary_distance(double x, double y) const {
    if (kind_ == Kind::Disc) return radius_ - std::hypot(x, y);
    double d = std::numeric_limits<double>::infinity();
    const size_t n = verts_.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        d = std::min(d, point_segment_distance(x, y, verts_[j], verts_[i]));
    }
    return inside(x, y) ? d : -d;
}

double DomainShape::crossing_fraction(const std::array<double, 2>& p_in,
                                      const std::array<double, 2>& p_out) const {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double x = p_in[0] + mid * (p_out[0] - p_in[0]);
        const double y = p_in[1] + mid * (p_out[1] - p_in[1]);
        if (inside(x, y)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::array<double, 2> DomainShape::project_boundary(const std::array<double, 2>& p,
                                                    std::array<double, 2>* normal) const {
    if (kind_ == Kind::Disc) {
        const double r = std::hypot(p[0], p[1]);
        const double s = (r > 0.0) ? radius_ / r : 0.0;
        if (normal) *normal = {p[0] / std::max(r, 1e-300), p[1] / std::max(r, 1e-300)};
        return {p[0] * s, p[1] * s};
    }
    double best = std::numeric_limits<double>::infinity();
    std::array<double, 2> proj = p, nrm = {0.0, 0.0};
    const size_t n = verts_.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = verts_[j];
        const auto& b = verts_[i];
        const double vx = b[0] - a[0], vy = b[1] - a[1];
        const double vv = vx * vx + vy * vy;
        double t = vv > 0.0 ? ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / vv : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const std::array<double, 2> q = {a[0] + t * vx, a[1] + t * vy};
        const double d = std::hypot(p[0] - q[0], p[1] - q[1]);
        if (d < best) {
            best = d;
            proj = q;
            const double len = std::sqrt(vv);
            nrm = {vy / len, -vx / len}; // outward for counterclockwise polygons
        }
    }
    if (normal) *normal = nrm;
    return proj;
}

// ---------------------------------------------------------------------------
// FieldProfile
// ---------------------------------------------------------------------------

FieldProfile FieldProfile::builtin(const std::string& name) {
    FieldProfile f;
    f.name = name;
    if (name == "linear") {
        f.value = [](double x, double y) { return y - x; };
        f.gradient = [](double, double) { return std::array<double, 2>{-1.0, 1.0}; };
    } else if (name == "parabola") {
        f.value = [](double x, double y) { return y - x * x; };
        f.gradient = [](double x, double) { return std::array<double, 2>{-2.0 * x, 1.0}; };
    } else {
        throw std::invalid_argument("FieldProfile: unknown builtin '" + name +
                                    "' (expected linear or parabola)");
    }
    return f;
}

namespace {

// Catmull-Rom cubic kernel value and derivative in one variable.
inline void cubic_weights(double t, double w[4], double dw[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
    dw[0] = 0.5 * (-3.0 * t2 + 4.0 * t - 1.0);
    dw[1] = 0.5 * (9.0 * t2 - 10.0 * t);
    dw[2] = 0.5 * (-9.0 * t2 + 8.0 * t + 1.0);
    dw[3] = 0.5 * (3.0 * t2 - 2.0 * t);
}

struct BicubicData {
    std::vector<double> xs, ys, v; // v row-major [iy][ix]
    double hx = 0.0, hy = 0.0;

    double sample(int ix, int iy) const {
        ix = std::clamp(ix, 0, static_cast<int>(xs.size()) - 1);
        iy = std::clamp(iy, 0, static_cast<int>(ys.size()) - 1);
        return v[static_cast<size_t>(iy) * xs.size() + ix];
    }

    void eval(double x, double y, double* val, double* gx, double* gy) const {
        const double fx = (x - xs.front()) / hx;
        const double fy = (y - ys.front()) / hy;
        const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0,
                                  static_cast<int>(xs.size()) - 2);
        const int iy = std::clamp(static_cast<int>(std::floor(fy)), 0,
                                  static_cast<int>(ys.size()) - 2);
        const double tx = fx - ix, ty = fy - iy;
        double wx[4], dwx[4], wy[4], dwy[4];
        cubic_weights(tx, wx, dwx);
        cubic_weights(ty, wy, dwy);
        double s = 0.0, sx = 0.0, sy = 0.0;
        for (int a = 0; a < 4; ++a) {
            for (int c = 0; c < 4; ++c) {
                const double vv = sample(ix - 1 + c, iy - 1 + a);
                s += wy[a] * wx[c] * vv;
                sx += wy[a] * dwx[c] * vv;
                sy += dwy[a] * wx[c] * vv;
            }
        }
        if (val) *val = s;
        if (gx) *gx = sx / hx;
        if (gy) *gy = sy / hy;
    }
};

} // namespace

FieldProfile FieldProfile::from_grid(const std::vector<double>& xs, const std::vector<double>& ys,
                                     const std::vector<double>& values) {
    if (xs.size() < 4 || ys.size() < 4) {
        throw std::invalid_argument("FieldProfile::from_grid: need at least a 4x4 lattice");
    }
    if (values.size() != xs.size() * ys.size()) {
        throw std::invalid_argument("FieldProfile::from_grid: value count mismatch");
    }
    auto data = std::make_shared<BicubicData>();
    data->xs = xs;
    data->ys = ys;
    data->v = values;
    data->hx = xs[1] - xs[0];
    data->hy = ys[1] - ys[0];
    for (size_t i = 1; i < xs.size(); ++i) {
        if (std::abs(xs[i] - xs[i - 1] - data->hx) > 1e-9 * std::abs(data->hx)) {
            throw std::invalid_argument("FieldProfile::from_grid: x lattice must be uniform");
        }
    }
    for (size_t i = 1; i < ys.size(); ++i) {
        if (std::abs(ys[i] - ys[i - 1] - data->hy) > 1e-9 * std::abs(data->hy)) {
            throw std::invalid_argument("FieldProfile::from_grid: y lattice must be uniform");
        }
    }
    FieldProfile f;
    f.name = "sampled";
    f.interpolated = true;
    f.value = [data](double x, double y) {
        double v;
        data->eval(x, y, &v, nullptr, nullptr);
        return v;
    };
    f.gradient = [data](double x, double y) {
        double gx, gy;
        data->eval(x, y, nullptr, &gx, &gy);
        return std::array<double, 2>{gx, gy};
    };
    return f;
}

void FieldProfile::validate(const DomainShape& omega, double resolution) const {
    const auto bb = omega.bbox();
    const int nx = std::max(2, static_cast<int>(std::ceil((bb[2] - bb[0]) / resolution)) + 1);
    const int ny = std::max(2, static_cast<int>(std::ceil((bb[3] - bb[1]) / resolution)) + 1);
    double worst = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double x = bb[0] + (bb[2] - bb[0]) * i / (nx - 1);
            const double y = bb[1] + (bb[3] - bb[1]) * j / (ny - 1);
            if (omega.boundary_distance(x, y) < -resolution) continue;
            const auto g = gradient(x, y);
            worst = std::min(worst, std::abs(value(x, y)) + std::hypot(g[0], g[1]));
        }
    }
    if (!(worst > 1e-8)) {
        throw NumericalError("FieldProfile: |B0| + |grad B0| vanishes on the closed domain", worst);
    }
}

// ---------------------------------------------------------------------------
// Zero-set extraction
// ---------------------------------------------------------------------------

namespace {

std::array<double, 2> newton_project(const FieldProfile& field, std::array<double, 2> p,
                                     double scale) {
    for (int it = 0; it < 40; ++it) {
        const double v = field.value(p[0], p[1]);
        if (std::abs(v) <= 1e-12 * scale) break;
        const auto g = field.gradient(p[0], p[1]);
        const double g2 = g[0] * g[0] + g[1] * g[1];
        if (g2 == 0.0) break;
        p[0] -= v * g[0] / g2;
        p[1] -= v * g[1] / g2;
    }
    return p;
}

// Constrained projection: B0 = 0 and boundary constraint = 0.
std::array<double, 2> newton_project_boundary(const FieldProfile& field, const DomainShape& omega,
                                              std::array<double, 2> p, double scale) {
    for (int it = 0; it < 60; ++it) {
        const double v = field.value(p[0], p[1]);
        std::array<double, 2> nrm;
        const auto q = omega.project_boundary(p, &nrm);
        const double gcons = (p[0] - q[0]) * nrm[0] + (p[1] - q[1]) * nrm[1]; // signed offset
        if (std::abs(v) <= 1e-12 * scale && std::abs(gcons) <= 1e-13) break;
        const auto gb = field.gradient(p[0], p[1]);
        // Solve [gb; nrm] d = -(v, gcons).
        const double det = gb[0] * nrm[1] - gb[1] * nrm[0];
        if (std::abs(det) < 1e-14) break;
        const double dx = (-v * nrm[1] + gcons * gb[1]) / det;
        const double dy = (-gcons * gb[0] + v * nrm[0]) / det;
        p[0] += dx;
        p[1] += dy;
    }
    return p;
}

struct RawSegment {
    std::array<double, 2> a, b;
    int64_t ka, kb; // cell-edge keys for stitching
};

int64_t edge_key(int i, int j, bool horizontal) {
    return (static_cast<int64_t>(j) << 24) | (static_cast<int64_t>(i) << 1) |
           (horizontal ? 1 : 0);
}

} // namespace

ZeroCurve extract_zero_set(const FieldProfile& field, const DomainShape& omega,
                           double resolution) {
    field.validate(omega, std::max(resolution, 1e-3));
    const auto bb = omega.bbox();
    const double pad = 2.0 * resolution;
    const double x0 = bb[0] - pad, y0 = bb[1] - pad;
    const int nx = static_cast<int>(std::ceil((bb[2] + pad - x0) / resolution)) + 1;
    const int ny = static_cast<int>(std::ceil((bb[3] + pad - y0) / resolution)) + 1;

    std::vector<double> vals(static_cast<size_t>(nx) * ny);
    double scale = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double v = field.value(x0 + i * resolution, y0 + j * resolution);
            if (v == 0.0) v = 1e-300; // nudge exact zeros off the lattice
            vals[static_cast<size_t>(j) * nx + i] = v;
            scale = std::max(scale, std::abs(v));
        }
    }

    // Marching squares with linear interpolation on the cell edges.
    std::vector<RawSegment> segments;
    auto corner = [&](int i, int j) { return vals[static_cast<size_t>(j) * nx + i]; };
    auto xat = [&](int i) { return x0 + i * resolution; };
    auto yat = [&](int j) { return y0 + j * resolution; };
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const double v00 = corner(i, j), v10 = corner(i + 1, j);
            const double v01 = corner(i, j + 1), v11 = corner(i + 1, j + 1);
            int mask = 0;
            if (v00 > 0) mask |= 1;
            if (v10 > 0) mask |= 2;
            if (v11 > 0) mask |= 4;
            if (v01 > 0) mask |= 8;
            if (mask == 0 || mask == 15) continue;

            // Edge crossing points (linear interpolation).
            auto cross_x = [&](double va, double vb, double xa, double xb) {
                return xa + (xb - xa) * va / (va - vb);
            };
            std::array<double, 2> pb{}, pt{}, pl{}, pr{};
            int64_t kb = 0, kt = 0, kl = 0, kr = 0;
            if ((v00 > 0) != (v10 > 0)) {
                pb = {cross_x(v00, v10, xat(i), xat(i + 1)), yat(j)};
                kb = edge_key(i, j, true);
            }
            if ((v01 > 0) != (v11 > 0)) {
                pt = {cross_x(v01, v11, xat(i), xat(i + 1)), yat(j + 1)};
                kt = edge_key(i, j + 1, true);
            }
            if ((v00 > 0) != (v01 > 0)) {
                pl = {xat(i), cross_x(v00, v01, yat(j), yat(j + 1))};
                kl = edge_key(i, j, false);
            }
            if ((v10 > 0) != (v11 > 0)) {
                pr = {xat(i + 1), cross_x(v10, v11, yat(j), yat(j + 1))};
                kr = edge_key(i + 1, j, false);
            }

            auto add = [&](const std::array<double, 2>& a, int64_t ka,
                           const std::array<double, 2>& b, int64_t kb2) {
                segments.push_back({a, b, ka, kb2});
            };
            switch (mask) {
                case 1: case 14: add(pb, kb, pl, kl); break;
                case 2: case 13: add(pb, kb, pr, kr); break;
                case 3: case 12: add(pl, kl, pr, kr); break;
                case 4: case 11: add(pt, kt, pr, kr); break;
                case 6: case 9:  add(pb, kb, pt, kt); break;
                case 7: case 8:  add(pl, kl, pt, kt); break;
                case 5: case 10: {
                    // Saddle: resolve with the center value.
                    const double vc = field.value(xat(i) + 0.5 * resolution,
                                                  yat(j) + 0.5 * resolution);
                    const bool center_pos = vc > 0;
                    if ((mask == 5) == center_pos) {
                        add(pb, kb, pr, kr);
                        add(pl, kl, pt, kt);
                    } else {
                        add(pb, kb, pl, kl);
                        add(pt, kt, pr, kr);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    if (segments.empty()) throw NumericalError("extract_zero_set: zero set is empty");

    // Stitch segments into chains by shared cell-edge keys.
    std::map<int64_t, std::vector<std::pair<size_t, int>>> at_key;
    for (size_t s = 0; s < segments.size(); ++s) {
        at_key[segments[s].ka].push_back({s, 0});
        at_key[segments[s].kb].push_back({s, 1});
    }
    std::vector<bool> used(segments.size(), false);
    std::vector<std::vector<std::array<double, 2>>> chains;
    for (size_t s0 = 0; s0 < segments.size(); ++s0) {
        if (used[s0]) continue;
        // Walk both directions from this seed segment.
        std::vector<std::array<double, 2>> chain = {segments[s0].a, segments[s0].b};
        std::vector<int64_t> kends = {segments[s0].ka, segments[s0].kb};
        used[s0] = true;
        for (int dir = 0; dir < 2; ++dir) {
            int64_t key = kends[static_cast<size_t>(dir)];
            while (true) {
                const auto& cands = at_key[key];
                size_t next = SIZE_MAX;
                int end = 0;
                for (auto [sid, e] : cands) {
                    if (!used[sid]) {
                        next = sid;
                        end = e;
                        break;
                    }
                }
                if (next == SIZE_MAX) break;
                used[next] = true;
                const auto& seg = segments[next];
                const auto np = (end == 0) ? seg.b : seg.a;
                const int64_t nk = (end == 0) ? seg.kb : seg.ka;
                if (dir == 1) {
                    chain.push_back(np);
                } else {
                    chain.insert(chain.begin(), np);
                }
                key = nk;
                if (nk == kends[static_cast<size_t>(1 - dir)]) break; // closed loop
            }
        }
        chains.push_back(std::move(chain));
    }

    // Clip chains to the closed domain and refine vertices onto the zero set.
    ZeroCurve curve;
    for (auto& chain : chains) {
        std::vector<char> in(chain.size());
        for (size_t k = 0; k < chain.size(); ++k) {
            in[k] = omega.inside(chain[k][0], chain[k][1]) ? 1 : 0;
        }
        size_t k = 0;
        while (k < chain.size()) {
            if (!in[k]) {
                ++k;
                continue;
            }
            // Run of interior vertices [k, e).
            size_t e = k;
            while (e < chain.size() && in[e]) ++e;
            std::vector<std::array<double, 2>> piece;
            bool starts_bdry = false, ends_bdry = false;
            if (k > 0) {
                const double t = omega.crossing_fraction(chain[k], chain[k - 1]);
                piece.push_back({chain[k][0] + t * (chain[k - 1][0] - chain[k][0]),
                                 chain[k][1] + t * (chain[k - 1][1] - chain[k][1])});
                starts_bdry = true;
            }
            for (size_t q = k; q < e; ++q) piece.push_back(chain[q]);
            if (e < chain.size()) {
                const double t = omega.crossing_fraction(chain[e - 1], chain[e]);
                piece.push_back({chain[e - 1][0] + t * (chain[e][0] - chain[e - 1][0]),
                                 chain[e - 1][1] + t * (chain[e][1] - chain[e - 1][1])});
                ends_bdry = true;
            }
            if (piece.size() >= 2) {
                ZeroCurveComponent comp;
                comp.starts_on_boundary = starts_bdry;
                comp.ends_on_boundary = ends_bdry;
                const bool loop = !starts_bdry && !ends_bdry &&
                                  std::hypot(piece.front()[0] - piece.back()[0],
                                             piece.front()[1] - piece.back()[1]) <
                                      2.0 * resolution;
                comp.closed = loop;
                for (size_t q = 0; q < piece.size(); ++q) {
                    const bool bdry = (q == 0 && starts_bdry) ||
                                      (q + 1 == piece.size() && ends_bdry);
                    piece[q] = bdry ? newton_project_boundary(field, omega, piece[q], scale)
                                    : newton_project(field, piece[q], scale);
                }
                if (loop) piece.back() = piece.front();
                // Crossings through exact lattice nodes arrive once per
                // incident cell; merge the duplicates.
                std::vector<std::array<double, 2>> dedup;
                for (const auto& p : piece) {
                    if (dedup.empty() || std::hypot(p[0] - dedup.back()[0],
                                                    p[1] - dedup.back()[1]) > 1e-10) {
                        dedup.push_back(p);
                    }
                }
                if (loop && dedup.size() > 1) dedup.back() = dedup.front();
                comp.vertices = std::move(dedup);
                curve.components.push_back(std::move(comp));
            }
            k = e;
        }
    }
    if (curve.components.empty()) {
        throw NumericalError("extract_zero_set: zero set does not meet the domain");
    }

    // Arc length, gradients, and the boundary transversality guard.
    for (auto& comp : curve.components) {
        const size_t n = comp.vertices.size();
        comp.arclen.resize(n);
        comp.grad_norm.resize(n);
        comp.arclen[0] = 0.0;
        for (size_t q = 0; q < n; ++q) {
            const auto g = field.gradient(comp.vertices[q][0], comp.vertices[q][1]);
            comp.grad_norm[q] = std::hypot(g[0], g[1]);
            if (q > 0) {
                comp.arclen[q] = comp.arclen[q - 1] +
                                 std::hypot(comp.vertices[q][0] - comp.vertices[q - 1][0],
                                            comp.vertices[q][1] - comp.vertices[q - 1][1]);
            }
        }
        auto check_transversal = [&](size_t a, size_t bidx) {
            std::array<double, 2> nrm;
            omega.project_boundary(comp.vertices[a], &nrm);
            const double tx = comp.vertices[bidx][0] - comp.vertices[a][0];
            const double ty = comp.vertices[bidx][1] - comp.vertices[a][1];
            const double tl = std::hypot(tx, ty);
            if (tl == 0.0) return;
            const double cosn = std::abs((tx * nrm[0] + ty * nrm[1]) / tl);
            if (cosn < 0.05) {
                throw NumericalError(
                    "extract_zero_set: zero set tangent to the boundary (transversality violated)",
                    cosn);
            }
        };
        if (comp.starts_on_boundary && n >= 2) check_transversal(0, 1);
        if (comp.ends_on_boundary && n >= 2) check_transversal(n - 1, n - 2);
    }
    return curve;
}

ZeroCurve refine_zero_curve(const ZeroCurve& curve, const FieldProfile& field,
                            double max_segment) {
    ZeroCurve out;
    for (const auto& comp : curve.components) {
        ZeroCurveComponent rc;
        rc.closed = comp.closed;
        rc.starts_on_boundary = comp.starts_on_boundary;
        rc.ends_on_boundary = comp.ends_on_boundary;
        double scale = 1.0;
        rc.vertices.push_back(comp.vertices.front());
        for (size_t q = 1; q < comp.vertices.size(); ++q) {
            // Recursively split the segment with Newton-projected midpoints.
            std::vector<std::array<double, 2>> stack = {comp.vertices[q]};
            while (!stack.empty()) {
                const auto& prev = rc.vertices.back();
                const auto next = stack.back();
                const double len = std::hypot(next[0] - prev[0], next[1] - prev[1]);
                if (len <= max_segment || stack.size() > 60) {
                    rc.vertices.push_back(next);
                    stack.pop_back();
                } else {
                    std::array<double, 2> mid = {0.5 * (prev[0] + next[0]),
                                                 0.5 * (prev[1] + next[1])};
                    stack.push_back(newton_project(field, mid, scale));
                }
            }
        }
        const size_t n = rc.vertices.size();
        rc.arclen.resize(n);
        rc.grad_norm.resize(n);
        rc.arclen[0] = 0.0;
        for (size_t q = 0; q < n; ++q) {
            const auto g = field.gradient(rc.vertices[q][0], rc.vertices[q][1]);
            rc.grad_norm[q] = std::hypot(g[0], g[1]);
            if (q > 0) {
                rc.arclen[q] = rc.arclen[q - 1] +
                               std::hypot(rc.vertices[q][0] - rc.vertices[q - 1][0],
                                          rc.vertices[q][1] - rc.vertices[q - 1][1]);
            }
        }
        out.components.push_back(std::move(rc));
    }
    return out;
}

double ZeroCurve::total_length() const {
    double s = 0.0;
    for (const auto& c : components) s += c.length();
    return s;
}

// ---------------------------------------------------------------------------
// Classification and the energy formulas
// ---------------------------------------------------------------------------

namespace {

// Point at arc-length s on a component (linear interpolation between refined
// vertices followed by a Newton projection back onto the zero set).
std::array<double, 2> curve_point(const ZeroCurveComponent& comp, const FieldProfile& field,
                                  double s) {
    s = std::clamp(s, 0.0, comp.length());
    auto it = std::lower_bound(comp.arclen.begin(), comp.arclen.end(), s);
    size_t hi = static_cast<size_t>(std::distance(comp.arclen.begin(), it));
    if (hi == 0) hi = 1;
    if (hi >= comp.vertices.size()) hi = comp.vertices.size() - 1;
    const size_t lo = hi - 1;
    const double t = (s - comp.arclen[lo]) /
                     std::max(comp.arclen[hi] - comp.arclen[lo], 1e-300);
    std::array<double, 2> p = {
        comp.vertices[lo][0] + t * (comp.vertices[hi][0] - comp.vertices[lo][0]),
        comp.vertices[lo][1] + t * (comp.vertices[hi][1] - comp.vertices[lo][1])};
    return newton_project(field, p, 1.0);
}

double grad_norm_at(const ZeroCurveComponent& comp, const FieldProfile& field, double s) {
    const auto p = curve_point(comp, field, s);
    const auto g = field.gradient(p[0], p[1]);
    return std::hypot(g[0], g[1]);
}

double golden_min_scalar(const std::function<double(double)>& f, double a, double c,
                         double tol, double* argmin) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = c - inv_phi * (c - a), x2 = a + inv_phi * (c - a);
    double f1 = f(x1), f2 = f(x2);
    while (c - a > tol) {
        if (f1 <= f2) {
            c = x2; x2 = x1; f2 = f1; x1 = c - inv_phi * (c - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2; x2 = a + inv_phi * (c - a); f2 = f(x2);
        }
    }
    if (argmin) *argmin = 0.5 * (a + c);
    return f(0.5 * (a + c));
}

} // namespace

CriticalFieldReport classify_assumption(const ZeroCurve& curve, const FieldProfile& field,
                                        double lambda0) {
    CriticalFieldReport rep;
    rep.gamma_length = curve.total_length();

    double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
    for (const auto& comp : curve.components) {
        for (double g : comp.grad_norm) {
            gmin = std::min(gmin, g);
            gmax = std::max(gmax, g);
        }
    }

    if (gmax - gmin <= 1e-8 * gmin) {
        rep.classification = AssumptionCase::WholeCurve;
        rep.c0 = gmin;
        rep.gamma_coef = std::pow(lambda0, -1.5) / rep.c0;
        return rep;
    }

    // Locate interior minima of g along arc length, refine each.
    rep.c0 = std::numeric_limits<double>::infinity();
    bool violates = false;
    for (const auto& comp : curve.components) {
        const size_t n = comp.vertices.size();
        if (n < 3) continue;
        const double len = comp.length();
        auto g_of = [&](double s) { return grad_norm_at(comp, field, s); };

        // Endpoint minima of open components sit on the boundary, which the
        // finite case excludes.
        double boundary_min = std::numeric_limits<double>::infinity();
        if (!comp.closed) {
            boundary_min = std::min(comp.grad_norm.front(), comp.grad_norm.back());
        }

        for (size_t q = 1; q + 1 < n; ++q) {
            // Treat runs of (numerically) equal values as one candidate and
            // require a strict rise on both flanks.
            const double gq = comp.grad_norm[q];
            const double tie = 1e-13 * std::max(1.0, gq);
            if (!(comp.grad_norm[q - 1] > gq + tie)) continue;
            size_t run_end = q;
            while (run_end + 1 < n && std::abs(comp.grad_norm[run_end + 1] - gq) <= tie) {
                ++run_end;
            }
            if (run_end + 1 >= n) break;
            if (comp.grad_norm[run_end + 1] > gq + tie) {
                double smin;
                const double gval = golden_min_scalar(
                    g_of, comp.arclen[q - 1], comp.arclen[run_end + 1],
                    1e-10 * std::max(len, 1.0), &smin);
                // Nondegeneracy via a step-halving second difference; a
                // quartic-flat minimum shows a vanishing ratio.
                const double step = std::max(1e-4 * len, 1e-6);
                auto second = [&](double dd) {
                    return (g_of(smin + dd) - 2.0 * gval + g_of(smin - dd)) / (dd * dd);
                };
                const double d2 = second(step);
                const double d2h = second(0.5 * step);
                const bool degenerate =
                    !(d2h > 1e-6 * std::max(gval, 1e-12)) || d2h < 0.45 * d2;
                if (degenerate) violates = true;
                if (gval < rep.c0) rep.c0 = gval;
                rep.minima.push_back(curve_point(comp, field, smin));
                ++rep.minima_count;
                q = run_end;
            }
        }
        if (boundary_min < rep.c0 - 1e-12) {
            // The global minimum sits on the boundary.
            rep.c0 = boundary_min;
            violates = true;
        }
    }
    if (rep.minima_count == 0) violates = true;
    rep.gamma_coef = std::pow(lambda0, -1.5) / rep.c0;
    rep.classification =
        violates ? AssumptionCase::ViolatesAssumption : AssumptionCase::FiniteNondegenerate;
    return rep;
}

namespace {

// Composite trapezoid of fn(s) over a component, with extra nodes inserted
// where `kink` changes sign (the positive-part boundaries).
double arc_quadrature(const ZeroCurveComponent& comp, const FieldProfile& field,
                      const std::function<double(double, double)>& fn_of_g_s,
                      const std::function<double(double)>& kink_of_g, int base_nodes) {
    const double len = comp.length();
    if (len == 0.0) return 0.0;
    std::vector<double> ss;
    ss.reserve(static_cast<size_t>(base_nodes) + 8);
    for (int k = 0; k < base_nodes; ++k) {
        ss.push_back(len * static_cast<double>(k) / (base_nodes - 1));
    }
    // Locate kink crossings between consecutive nodes and add them.
    std::vector<double> gs(ss.size());
    for (size_t k = 0; k < ss.size(); ++k) gs[k] = grad_norm_at(comp, field, ss[k]);
    std::vector<double> extra;
    for (size_t k = 0; k + 1 < ss.size(); ++k) {
        double ka = kink_of_g(gs[k]), kb = kink_of_g(gs[k + 1]);
        if ((ka > 0) != (kb > 0)) {
            double lo = ss[k], hi = ss[k + 1];
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((kink_of_g(grad_norm_at(comp, field, mid)) > 0) == (ka > 0)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            extra.push_back(0.5 * (lo + hi));
        }
    }
    ss.insert(ss.end(), extra.begin(), extra.end());
    std::sort(ss.begin(), ss.end());
    ss.erase(std::unique(ss.begin(), ss.end()), ss.end());

    double acc = 0.0;
    double prev_s = ss[0];
    double prev_f = fn_of_g_s(grad_norm_at(comp, field, prev_s), prev_s);
    for (size_t k = 1; k < ss.size(); ++k) {
        const double s = ss[k];
        const double f = fn_of_g_s(grad_norm_at(comp, field, s), s);
        acc += 0.5 * (f + prev_f) * (s - prev_s);
        prev_s = s;
        prev_f = f;
    }
    return acc;
}

} // namespace

double leading_order_energy(const ZeroCurve& curve, const FieldProfile& field, double kappa,
                            double H, const ELTable& table) {
    const double lc = table.critical_length();
    double total = 0.0;
    for (const auto& comp : curve.components) {
        total += arc_quadrature(
            comp, field,
            [&](double g, double) {
                const double L = g * H / (kappa * kappa);
                if (L >= lc) return 0.0;
                return std::cbrt(L) * table.lookup(L);
            },
            [&](double g) { return g * H / (kappa * kappa) - lc; }, 2001);
    }
    return kappa * total;
}

NearCriticalResult near_critical_energy(const ZeroCurve& curve, const FieldProfile& field,
                                        const CriticalFieldReport& report, double kappa,
                                        double rho, double lambda0, double u0_l4_fourth) {
    if (!(rho > 0.0 && rho < 1.0)) {
        throw std::invalid_argument("near_critical_energy: rho must lie in (0,1)");
    }
    if (report.classification == AssumptionCase::ViolatesAssumption) {
        throw std::invalid_argument("near_critical_energy: field violates the standing assumption");
    }
    NearCriticalResult out;
    out.H = (report.gamma_coef - rho) * kappa * kappa;
    const double hk2 = out.H / (kappa * kappa);
    const double lc32 = std::pow(lambda0, -1.5);

    for (const auto& comp : curve.components) {
        out.integral += arc_quadrature(
            comp, field,
            [&](double g, double) {
                const double arg = std::pow(hk2 * g, -2.0 / 3.0) - lambda0;
                return arg > 0.0 ? arg * arg : 0.0;
            },
            [&](double g) { return lc32 - hk2 * g; }, 2001);
        // |Gamma_kappa| via the same kink structure: measure where hk2 g < lc32.
        out.gamma_kappa_len += arc_quadrature(
            comp, field, [&](double g, double) { return (hk2 * g < lc32) ? 1.0 : 0.0; },
            [&](double g) { return lc32 - hk2 * g; }, 2001);
    }
    out.energy = -kappa * std::pow(lambda0, -1.5) / (2.0 * u0_l4_fourth) * out.integral;
    return out;
}

double consistency_with_leading(const ZeroCurve& curve, const FieldProfile& field,
                                const CriticalFieldReport& report, double kappa, double rho,
                                const ELTable& table, double lambda0, double u0_l4_fourth) {
    const double H = (report.gamma_coef - rho) * kappa * kappa;
    const double lead = leading_order_energy(curve, field, kappa, H, table);
    const auto nc = near_critical_energy(curve, field, report, kappa, rho, lambda0, u0_l4_fourth);
    if (nc.energy == 0.0) return lead == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return lead / nc.energy;
}

// ---------------------------------------------------------------------------
// Disk covering
// ---------------------------------------------------------------------------

CoveringReport disk_covering(const ZeroCurve& curve, const FieldProfile& field,
                             const DomainShape& omega, double ell) {
    if (curve.components.empty()) throw std::invalid_argument("disk_covering: empty curve");
    // Work on the longest component (the covering construction is per
    // component; callers sum reports if needed).
    const ZeroCurveComponent* compp = &curve.components.front();
    for (const auto& c : curve.components) {
        if (c.length() > compp->length()) compp = &c;
    }
    ZeroCurve one;
    one.components.push_back(*compp);
    ZeroCurve fine = refine_zero_curve(one, field, std::min(ell / 50.0, compp->length() / 200.0));
    const ZeroCurveComponent& comp = fine.components.front();
    const double len = comp.length();

    // Feature-scale guard: ell must stay below the curvature radius.
    double kmax = 0.0;
    for (size_t q = 1; q + 1 < comp.vertices.size(); q += 8) {
        const auto& a = comp.vertices[q - 1];
        const auto& b = comp.vertices[q];
        const auto& c = comp.vertices[q + 1];
        const double ax = b[0] - a[0], ay = b[1] - a[1];
        const double bx = c[0] - b[0], by = c[1] - b[1];
        const double cross = ax * by - ay * bx;
        const double la = std::hypot(ax, ay), lb = std::hypot(bx, by);
        const double chord = std::hypot(c[0] - a[0], c[1] - a[1]);
        if (la * lb * chord > 0.0) kmax = std::max(kmax, 2.0 * std::abs(cross) / (la * lb * chord));
    }
    if (ell > 0.25 / std::max(kmax, 1e-12) || ell > len / 10.0) {
        throw std::invalid_argument("disk_covering: ell too large for the curve's feature scale");
    }

    CoveringReport rep;
    rep.ell = ell;

    // The unique count with |Gamma| / (2 ell (1 + ell/2)) in [n, n+1).
    const double target = len / (2.0 * ell * (1.0 + ell / 2.0));
    const int nn = std::max(1, static_cast<int>(std::floor(target)));
    const double spacing = len / static_cast<double>(nn);

    std::vector<double> kept_s;
    for (int j = 0; j < nn; ++j) {
        const double s = comp.closed ? spacing * j : spacing * (j + 0.5);
        if (s > len) break;
        const auto p = curve_point(comp, field, s);
        if (omega.boundary_distance(p[0], p[1]) > ell) {
            kept_s.push_back(s);
            rep.points.push_back(p);
        }
    }
    rep.N = static_cast<int>(kept_s.size());
    if (rep.N == 0) throw NumericalError("disk_covering: no admissible disks");
    rep.count_defect = std::abs(static_cast<double>(rep.N) - len / (2.0 * ell));

    for (size_t j = 0; j + 1 < kept_s.size(); ++j) {
        const double d = kept_s[j + 1] - kept_s[j];
        if (std::abs(d - spacing) < 0.5 * spacing) {
            rep.max_spacing_defect = std::max(rep.max_spacing_defect, std::abs(d - 2.0 * ell));
        }
        // Disjointness of consecutive disks.
        const auto& pa = rep.points[j];
        const auto& pb = rep.points[j + 1];
        if (std::hypot(pa[0] - pb[0], pa[1] - pb[1]) < 2.0 * ell - 1e-12) {
            throw std::invalid_argument("disk_covering: disks overlap; ell too large");
        }
    }

    // Per-disk arc length inside D(a_j, ell).
    auto exit_arc = [&](double s_center, double dir) {
        const auto a = curve_point(comp, field, s_center);
        double lo = 0.0;
        double hi = std::min(2.0 * ell, dir > 0 ? len - s_center : s_center);
        auto dist = [&](double ds) {
            const auto p = curve_point(comp, field, s_center + dir * ds);
            return std::hypot(p[0] - a[0], p[1] - a[1]);
        };
        if (dist(hi) < ell) return hi; // curve leaves through an endpoint
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (dist(mid) < ell) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    for (double s : kept_s) {
        const double inside = exit_arc(s, +1.0) + exit_arc(s, -1.0);
        rep.per_disk_defect.push_back(std::abs(inside - 2.0 * ell));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Gauge field (stream function Poisson solve, Shortley-Weller)
// ---------------------------------------------------------------------------

GaugeField compute_gauge_field(const FieldProfile& field, const DomainShape& omega,
                               double resolution) {
    const auto bb = omega.bbox();
    GaugeField gf;
    gf.h = resolution;
    gf.xmin = bb[0] - resolution;
    gf.ymin = bb[1] - resolution;
    gf.nx = static_cast<int>(std::ceil((bb[2] + resolution - gf.xmin) / resolution)) + 1;
    gf.ny = static_cast<int>(std::ceil((bb[3] + resolution - gf.ymin) / resolution)) + 1;
    const int nx = gf.nx, ny = gf.ny;
    gf.mask.assign(static_cast<size_t>(nx) * ny, 0);
    auto xat = [&](int i) { return gf.xmin + i * resolution; };
    auto yat = [&](int j) { return gf.ymin + j * resolution; };
    std::vector<int> unknown(static_cast<size_t>(nx) * ny, -1);
    int count = 0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (omega.inside(xat(i), yat(j))) {
                gf.mask[gf.index(i, j)] = 1;
                unknown[gf.index(i, j)] = count++;
            }
        }
    }
    if (count == 0) throw std::invalid_argument("compute_gauge_field: no interior nodes");

    // Shortley-Weller Laplacian with phi = 0 on the boundary.
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs(count);
    const double h = resolution;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int row = unknown[gf.index(i, j)];
            if (row < 0) continue;
            const std::array<double, 2> p = {xat(i), yat(j)};
            auto arm = [&](int di, int dj) {
                const int ii = i + di, jj = j + dj;
                const bool in = ii >= 0 && ii < nx && jj >= 0 && jj < ny &&
                                gf.mask[gf.index(ii, jj)];
                double frac = 1.0;
                int col = -1;
                if (in) {
                    col = unknown[gf.index(ii, jj)];
                } else {
                    const std::array<double, 2> q = {xat(i) + di * h, yat(j) + dj * h};
                    frac = std::max(omega.crossing_fraction(p, q), 1e-3);
                }
                return std::make_pair(col, frac);
            };
            auto [ce, he] = arm(+1, 0);
            auto [cw, hw] = arm(-1, 0);
            auto [cn, hn] = arm(0, +1);
            auto [cs, hs] = arm(0, -1);
            const double hE = he * h, hW = hw * h, hN = hn * h, hS = hs * h;
            double diag = 0.0;
            diag -= 2.0 / (hE * hW);
            diag -= 2.0 / (hN * hS);
            if (ce >= 0) trips.emplace_back(row, ce, 2.0 / (hE * (hE + hW)));
            if (cw >= 0) trips.emplace_back(row, cw, 2.0 / (hW * (hE + hW)));
            if (cn >= 0) trips.emplace_back(row, cn, 2.0 / (hN * (hN + hS)));
            if (cs >= 0) trips.emplace_back(row, cs, 2.0 / (hS * (hN + hS)));
            trips.emplace_back(row, row, diag);
            rhs(row) = field.value(p[0], p[1]);
        }
    }
    Eigen::SparseMatrix<double> A(count, count);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("compute_gauge_field: sparse factorization failed");
    }
    Eigen::VectorXd phi = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("compute_gauge_field: sparse solve failed");
    }

    gf.phi.assign(static_cast<size_t>(nx) * ny, 0.0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int row = unknown[gf.index(i, j)];
            if (row >= 0) gf.phi[gf.index(i, j)] = phi(row);
        }
    }

    // F = (-d phi / dy, d phi / dx) with one-sided Shortley-Weller stencils
    // next to the boundary (phi = 0 at the crossing point).
    gf.fx.assign(gf.phi.size(), 0.0);
    gf.fy.assign(gf.phi.size(), 0.0);
    auto deriv = [&](int i, int j, int di, int dj) {
        // d phi / d(axis) at interior node (i, j).
        const std::array<double, 2> p = {xat(i), yat(j)};
        auto arm_val = [&](int sgn) {
            const int ii = i + sgn * di, jj = j + sgn * dj;
            const bool in = ii >= 0 && ii < nx && jj >= 0 && jj < ny && gf.mask[gf.index(ii, jj)];
            if (in) return std::make_pair(gf.phi[gf.index(ii, jj)], h);
            const std::array<double, 2> q = {xat(i) + sgn * di * h, yat(j) + sgn * dj * h};
            const double frac = std::max(omega.crossing_fraction(p, q), 1e-3);
            return std::make_pair(0.0, frac * h);
        };
        auto [vp, hp] = arm_val(+1);
        auto [vm, hm] = arm_val(-1);
        const double v0 = gf.phi[gf.index(i, j)];
        // Nonuniform centered difference.
        return (hm * hm * vp - hp * hp * vm + (hp * hp - hm * hm) * v0) /
               (hp * hm * (hp + hm));
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!gf.mask[gf.index(i, j)]) continue;
            gf.fx[gf.index(i, j)] = -deriv(i, j, 0, 1);
            gf.fy[gf.index(i, j)] = deriv(i, j, 1, 0);
        }
    }

    // Residuals on deep-interior nodes (full centered stencils of F).
    double curl2 = 0.0, div2 = 0.0;
    int nres = 0;
    auto deep = [&](int i, int j) {
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const int ii = i + di, jj = j + dj;
                if (ii < 0 || ii >= nx || jj < 0 || jj >= ny || !gf.mask[gf.index(ii, jj)]) {
                    return false;
                }
            }
        }
        return true;
    };
    for (int j = 1; j + 1 < ny; ++j) {
        for (int i = 1; i + 1 < nx; ++i) {
            if (!deep(i, j)) continue;
            const double dfy_dx = (gf.fy[gf.index(i + 1, j)] - gf.fy[gf.index(i - 1, j)]) / (2 * h);
            const double dfx_dy = (gf.fx[gf.index(i, j + 1)] - gf.fx[gf.index(i, j - 1)]) / (2 * h);
            const double dfx_dx = (gf.fx[gf.index(i + 1, j)] - gf.fx[gf.index(i - 1, j)]) / (2 * h);
            const double dfy_dy = (gf.fy[gf.index(i, j + 1)] - gf.fy[gf.index(i, j - 1)]) / (2 * h);
            const double c = dfy_dx - dfx_dy - field.value(xat(i), yat(j));
            const double d = dfx_dx + dfy_dy;
            curl2 += c * c;
            div2 += d * d;
            ++nres;
        }
    }
    if (nres > 0) {
        gf.curl_residual_l2 = std::sqrt(curl2 * h * h);
        gf.div_residual_l2 = std::sqrt(div2 * h * h);
    }

    // Normal flux along the boundary by linear extrapolation from inside.
    auto bilinear = [&](double x, double y, const std::vector<double>& fld) {
        const double fx = (x - gf.xmin) / h, fy2 = (y - gf.ymin) / h;
        const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, nx - 2);
        const int j = std::clamp(static_cast<int>(std::floor(fy2)), 0, ny - 2);
        const double tx = fx - i, ty = fy2 - j;
        return (1 - tx) * (1 - ty) * fld[gf.index(i, j)] + tx * (1 - ty) * fld[gf.index(i + 1, j)] +
               (1 - tx) * ty * fld[gf.index(i, j + 1)] + tx * ty * fld[gf.index(i + 1, j + 1)];
    };
    const int nsamp = 256;
    double fluxmax = 0.0;
    for (int k = 0; k < nsamp; ++k) {
        std::array<double, 2> p, nrm;
        if (omega.is_disc()) {
            const double th = 2.0 * M_PI * k / nsamp;
            p = {omega.disc_radius() * std::cos(th), omega.disc_radius() * std::sin(th)};
            nrm = {std::cos(th), std::sin(th)};
        } else {
            p = omega.project_boundary(
                {bb[0] + (bb[2] - bb[0]) * (k % 16) / 15.0,
                 bb[1] + (bb[3] - bb[1]) * (k / 16) / 15.0},
                &nrm);
        }
        const double d1 = 1.5 * h, d2 = 3.0 * h;
        const std::array<double, 2> p1 = {p[0] - d1 * nrm[0], p[1] - d1 * nrm[1]};
        const std::array<double, 2> p2 = {p[0] - d2 * nrm[0], p[1] - d2 * nrm[1]};
        if (!omega.inside(p1[0], p1[1]) || !omega.inside(p2[0], p2[1])) continue;
        const double f1 = bilinear(p1[0], p1[1], gf.fx) * nrm[0] + bilinear(p1[0], p1[1], gf.fy) * nrm[1];
        const double f2 = bilinear(p2[0], p2[1], gf.fx) * nrm[0] + bilinear(p2[0], p2[1], gf.fy) * nrm[1];
        fluxmax = std::max(fluxmax, std::abs(2.0 * f1 - f2));
    }
    gf.boundary_flux_max = fluxmax;
    return gf;
}

// ---------------------------------------------------------------------------
// Exponent bookkeeping
// ---------------------------------------------------------------------------

Rational Rational::of(long long n, long long d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const long long g = std::gcd(std::abs(n), d);
    return Rational{g ? n / g : n, g ? d / g : d};
}

Rational Rational::operator+(const Rational& o) const {
    return of(num * o.den + o.num * den, den * o.den);
}
Rational Rational::operator-(const Rational& o) const {
    return of(num * o.den - o.num * den, den * o.den);
}
Rational Rational::operator*(const Rational& o) const { return of(num * o.num, den * o.den); }
bool Rational::operator<(const Rational& o) const {
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}
bool Rational::operator==(const Rational& o) const { return num == o.num && den == o.den; }

Rational leading_term_exponent(const Rational& s) {
    return Rational::of(1, 1) - Rational::of(5, 2) * s;
}

bool remainder_negligible(const Rational& remainder_exponent, const Rational& s) {
    return remainder_exponent < leading_term_exponent(s);
}

} // namespace vfgl

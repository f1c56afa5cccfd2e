#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "symlab/errors.hpp"

namespace symlab {

inline constexpr double pi = std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Symmetric 2x2 tensor (recovered Hessians and friends).
struct SymMat2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;

    SymMat2 operator+(const SymMat2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
    SymMat2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }

    double trace() const { return xx + yy; }
    double frobenius_sq() const { return xx * xx + 2.0 * xy * xy + yy * yy; }
    Vec2 apply(const Vec2& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

// Star-shaped planar boundary r(theta) = a0 + sum_k (c_k cos k theta + s_k sin k theta),
// traversed counterclockwise about `center`.
class BoundaryCurve {
public:
    double a0 = 1.0;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
    Vec2 center;

    BoundaryCurve() = default;
    BoundaryCurve(double a0_, std::vector<double> cosc, std::vector<double> sinc,
                  Vec2 center_ = {})
        : a0(a0_), cos_coeffs(std::move(cosc)), sin_coeffs(std::move(sinc)), center(center_) {
        validate();
    }

    static BoundaryCurve circle(double radius, Vec2 center = {}) {
        return BoundaryCurve(radius, {}, {}, center);
    }

    void validate() const {
        auto finite = [](double v) { return std::isfinite(v); };
        if (!finite(a0) || !finite(center.x) || !finite(center.y))
            throw invalid_curve_error("boundary curve: non-finite Fourier data");
        for (double c : cos_coeffs)
            if (!finite(c)) throw invalid_curve_error("boundary curve: non-finite Fourier data");
        for (double s : sin_coeffs)
            if (!finite(s)) throw invalid_curve_error("boundary curve: non-finite Fourier data");
        if (a0 <= 0.0) throw invalid_curve_error("boundary curve: a0 must be positive");
        // Star-shapedness about center: r > 0 on a dense sample.
        constexpr int n = 4096;
        for (int i = 0; i < n; ++i) {
            double r = radius(2.0 * pi * i / n);
            if (!(r > 0.0))
                throw star_shape_error("boundary curve: r(theta) <= 0, not star-shaped");
        }
    }

    double radius(double theta) const {
        double r = a0;
        for (std::size_t k = 0; k < cos_coeffs.size(); ++k)
            r += cos_coeffs[k] * std::cos(double(k + 1) * theta);
        for (std::size_t k = 0; k < sin_coeffs.size(); ++k)
            r += sin_coeffs[k] * std::sin(double(k + 1) * theta);
        return r;
    }

    double radius_d(double theta) const {
        double r = 0.0;
        for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
            double m = double(k + 1);
            r -= m * cos_coeffs[k] * std::sin(m * theta);
        }
        for (std::size_t k = 0; k < sin_coeffs.size(); ++k) {
            double m = double(k + 1);
            r += m * sin_coeffs[k] * std::cos(m * theta);
        }
        return r;
    }

    double radius_dd(double theta) const {
        double r = 0.0;
        for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
            double m = double(k + 1);
            r -= m * m * cos_coeffs[k] * std::cos(m * theta);
        }
        for (std::size_t k = 0; k < sin_coeffs.size(); ++k) {
            double m = double(k + 1);
            r -= m * m * sin_coeffs[k] * std::sin(m * theta);
        }
        return r;
    }

    Vec2 point(double theta) const {
        double r = radius(theta);
        return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
    }

    // dp/dtheta
    Vec2 velocity(double theta) const {
        double r = radius(theta), rd = radius_d(theta);
        double c = std::cos(theta), s = std::sin(theta);
        return {rd * c - r * s, rd * s + r * c};
    }

    double speed(double theta) const {
        double r = radius(theta), rd = radius_d(theta);
        return std::sqrt(r * r + rd * rd);
    }

    Vec2 tangent(double theta) const {
        Vec2 v = velocity(theta);
        return v / v.norm();
    }

    // Unit normal pointing out of the enclosed region (CCW traversal).
    Vec2 outward_normal(double theta) const {
        Vec2 t = tangent(theta);
        return {t.y, -t.x};
    }

    // Signed curvature with respect to the inner normal: positive where the
    // boundary is convex, equal to 1/rho on a circle of radius rho.
    double curvature(double theta) const {
        double r = radius(theta), rd = radius_d(theta), rdd = radius_dd(theta);
        double den = std::pow(r * r + rd * rd, 1.5);
        return (r * r + 2.0 * rd * rd - r * rdd) / den;
    }

    // Star-shape point test: strictly inside the enclosed region.
    bool contains(const Vec2& p, double tol = 0.0) const {
        Vec2 d = p - center;
        double rho = d.norm();
        if (rho == 0.0) return true;
        double theta = std::atan2(d.y, d.x);
        return rho < radius(theta) - tol;
    }

    BoundaryCurve scaled(double lambda) const {
        BoundaryCurve c = *this;
        c.a0 *= lambda;
        for (double& v : c.cos_coeffs) v *= lambda;
        for (double& v : c.sin_coeffs) v *= lambda;
        c.center = center * lambda;
        return c;
    }

    BoundaryCurve translated(const Vec2& t) const {
        BoundaryCurve c = *this;
        c.center += t;
        return c;
    }

    std::size_t max_mode() const { return std::max(cos_coeffs.size(), sin_coeffs.size()); }

    bool is_circle(double tol = 1e-12) const {
        for (double c : cos_coeffs)
            if (std::abs(c) > tol) return false;
        for (double s : sin_coeffs)
            if (std::abs(s) > tol) return false;
        return true;
    }
};

struct CurveFrame {
    Vec2 point;
    Vec2 tangent;
    Vec2 normal;     // outward unit normal
    double curvature = 0.0;
};

inline CurveFrame eval_boundary(const BoundaryCurve& curve, double theta) {
    return {curve.point(theta), curve.tangent(theta), curve.outward_normal(theta),
            curve.curvature(theta)};
}

struct GeometrySummary {
    double area = 0.0;       // |Omega|
    double perimeter = 0.0;  // |Gamma|
    double R = 0.0;          // N|Omega|/|Gamma|
    double H0 = 0.0;         // 1/R
    double diameter = 0.0;
    double r_i = 0.0;        // uniform interior sphere radius (sampled surrogate)
    double r_e = 0.0;        // uniform exterior sphere radius (sampled surrogate)
};

namespace detail {

// Largest ball tangent at sample i on the given side that avoids every other
// sample ("shrinking ball" medial-axis surrogate). side = -1 interior, +1 exterior.
inline double tangent_ball_radius(const std::vector<Vec2>& pts, const std::vector<Vec2>& normals,
                                  std::size_t i, int side) {
    double best = std::numeric_limits<double>::infinity();
    const Vec2& p = pts[i];
    Vec2 n = normals[i] * double(side);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j == i) continue;
        Vec2 d = pts[j] - p;
        double proj = d.dot(n);
        if (proj <= 1e-14) continue; // sample not on this side
        best = std::min(best, d.squared_norm() / (2.0 * proj));
    }
    return best;
}

} // namespace detail

// Composite-trapezoid quadratures over theta (spectrally accurate for the
// periodic integrands), plus sampled estimates of d_Omega, r_i, r_e.
inline GeometrySummary geometry_summary(const BoundaryCurve& curve, int n_samples = 2048) {
    if (n_samples < 64) throw precondition_error("geometry_summary: n_samples must be >= 64");
    curve.validate();

    GeometrySummary g;
    const int n = n_samples;
    double area = 0.0, per = 0.0;
    for (int i = 0; i < n; ++i) {
        double theta = 2.0 * pi * i / n;
        double r = curve.radius(theta);
        area += 0.5 * r * r;
        per += curve.speed(theta);
    }
    g.area = area * (2.0 * pi / n);
    g.perimeter = per * (2.0 * pi / n);
    g.R = 2.0 * g.area / g.perimeter;
    g.H0 = 1.0 / g.R;

    // Boundary samples shared by the diameter and sphere-radius estimates.
    const int m = std::max(n_samples, 1024);
    std::vector<Vec2> pts(m);
    std::vector<Vec2> normals(m);
    std::vector<double> kappa(m);
    for (int i = 0; i < m; ++i) {
        double theta = 2.0 * pi * i / m;
        pts[i] = curve.point(theta);
        normals[i] = curve.outward_normal(theta);
        kappa[i] = curve.curvature(theta);
    }

    // Diameter: brute force over sample pairs, then local zoom.
    double best = 0.0;
    int bi = 0, bj = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double d2 = (pts[i] - pts[j]).squared_norm();
            if (d2 > best) { best = d2; bi = i; bj = j; }
        }
    double ti = 2.0 * pi * bi / m, tj = 2.0 * pi * bj / m;
    double win = 2.0 * pi / m;
    for (int round = 0; round < 6; ++round) {
        double bti = ti, btj = tj;
        for (int a = -8; a <= 8; ++a)
            for (int b = -8; b <= 8; ++b) {
                double ta = ti + win * a / 8.0, tb = tj + win * b / 8.0;
                double d2 = (curve.point(ta) - curve.point(tb)).squared_norm();
                if (d2 > best) { best = d2; bti = ta; btj = tb; }
            }
        ti = bti; tj = btj;
        win /= 8.0;
    }
    g.diameter = std::sqrt(best);

    // Uniform sphere radii: min over samples of (radius of curvature cap,
    // largest tangent ball avoiding the other samples). Conservative by
    // construction and convergent under sampling refinement.
    double ri = std::numeric_limits<double>::infinity();
    double re = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        double ball_in = detail::tangent_ball_radius(pts, normals, std::size_t(i), -1);
        double ball_ex = detail::tangent_ball_radius(pts, normals, std::size_t(i), +1);
        double cap_in = kappa[i] > 1e-14 ? 1.0 / kappa[i] : std::numeric_limits<double>::infinity();
        double cap_ex = std::abs(kappa[i]) > 1e-14 ? 1.0 / std::abs(kappa[i])
                                                   : std::numeric_limits<double>::infinity();
        ri = std::min({ri, cap_in, ball_in});
        re = std::min({re, cap_ex, ball_ex});
    }
    g.r_i = ri;
    g.r_e = re;
    return g;
}

struct RadiiAtPoint {
    Vec2 z;
    double rho_i = 0.0;       // min distance from z to Gamma
    double rho_e = 0.0;       // max distance from z to Gamma
    double delta_gamma = 0.0; // distance to Gamma (= rho_i for interior z)
    bool interior = true;
};

namespace detail {

// One-dimensional golden-section refinement of f around theta0 (window +-w).
template <typename F>
inline double golden_refine(F&& f, double theta0, double w, bool maximize, int iters = 80) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = theta0 - w, b = theta0 + w;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    auto val = [&](double t) { return maximize ? -f(t) : f(t); };
    double fc = val(c), fd = val(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = val(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = val(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

inline RadiiAtPoint radii_at(const BoundaryCurve& curve, const Vec2& z, int n_samples = 2048) {
    RadiiAtPoint r;
    r.z = z;
    const int n = std::max(n_samples, 256);
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    double tmin = 0.0, tmax = 0.0;
    for (int i = 0; i < n; ++i) {
        double theta = 2.0 * pi * i / n;
        double d = (curve.point(theta) - z).norm();
        if (d < dmin) { dmin = d; tmin = theta; }
        if (d > dmax) { dmax = d; tmax = theta; }
    }
    auto dist = [&](double t) { return (curve.point(t) - z).norm(); };
    double w = 2.0 * pi / n;
    tmin = detail::golden_refine(dist, tmin, w, /*maximize=*/false);
    tmax = detail::golden_refine(dist, tmax, w, /*maximize=*/true);
    r.rho_i = std::min(dmin, dist(tmin));
    r.rho_e = std::max(dmax, dist(tmax));
    r.interior = curve.contains(z);
    r.delta_gamma = r.rho_i;
    return r;
}

// ---------------------------------------------------------------------------
// Asymmetry A(Omega) = inf_x |Omega \Delta B_R(x)| / |B_R(x)|
// ---------------------------------------------------------------------------

namespace detail {

// Area of the intersection of a simple CCW polygon with the disk |p - c| <= R.
// Per-edge decomposition: chord portions inside the disk contribute triangle
// terms, portions outside contribute circular-sector terms.
inline double circle_polygon_intersection_area(const std::vector<Vec2>& poly, const Vec2& c,
                                               double R) {
    const double R2 = R * R;
    double area = 0.0;

    auto sector = [&](const Vec2& p, const Vec2& q) {
        double ang = std::atan2(p.cross(q), p.dot(q));
        return 0.5 * R2 * ang;
    };
    auto triangle = [](const Vec2& p, const Vec2& q) { return 0.5 * p.cross(q); };

    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = poly[i] - c;
        Vec2 b = poly[(i + 1) % n] - c;
        bool ain = a.squared_norm() <= R2;
        bool bin = b.squared_norm() <= R2;

        // Intersections of segment a + t(b-a) with the circle, t in (0,1).
        Vec2 d = b - a;
        double A = d.squared_norm();
        double B = 2.0 * a.dot(d);
        double C = a.squared_norm() - R2;
        double disc = B * B - 4.0 * A * C;

        if (ain && bin) {
            area += triangle(a, b);
            continue;
        }
        if (disc <= 0.0 || A == 0.0) {
            // No chord: the whole edge is outside; arc from a to b.
            area += sector(a, b);
            continue;
        }
        double sq = std::sqrt(disc);
        double t1 = (-B - sq) / (2.0 * A);
        double t2 = (-B + sq) / (2.0 * A);
        if (ain && !bin) {
            double t = std::clamp(t2, 0.0, 1.0);
            Vec2 p = a + d * t;
            area += triangle(a, p) + sector(p, b);
        } else if (!ain && bin) {
            double t = std::clamp(t1, 0.0, 1.0);
            Vec2 p = a + d * t;
            area += sector(a, p) + triangle(p, b);
        } else {
            // Both endpoints outside; the segment may still cross the disk.
            if (t1 > 0.0 && t2 < 1.0 && t1 < t2) {
                Vec2 p = a + d * t1;
                Vec2 q = a + d * t2;
                area += sector(a, p) + triangle(p, q) + sector(q, b);
            } else {
                area += sector(a, b);
            }
        }
    }
    return area;
}

struct SimplexResult {
    Vec2 x;
    double f = 0.0;
    bool converged = true;
};

// Derivative-free Nelder-Mead on the plane; tolerance on the simplex size.
template <typename F>
inline SimplexResult nelder_mead(F&& f, Vec2 x0, double step, double xtol, int max_iter = 400) {
    struct P { Vec2 x; double f; };
    std::array<P, 3> s{P{x0, f(x0)}, P{x0 + Vec2{step, 0}, f(x0 + Vec2{step, 0})},
                       P{x0 + Vec2{0, step}, f(x0 + Vec2{0, step})}};
    auto order = [&] {
        std::sort(s.begin(), s.end(), [](const P& a, const P& b) {
            if (a.f != b.f) return a.f < b.f;
            if (a.x.x != b.x.x) return a.x.x < b.x.x; // lexicographic tie-break
            return a.x.y < b.x.y;
        });
    };
    order();
    for (int it = 0; it < max_iter; ++it) {
        double size = std::max((s[0].x - s[1].x).norm(), (s[0].x - s[2].x).norm());
        if (size < xtol) return {s[0].x, s[0].f, true};
        Vec2 centroid = (s[0].x + s[1].x) / 2.0;
        Vec2 xr = centroid + (centroid - s[2].x);
        double fr = f(xr);
        if (fr < s[0].f) {
            Vec2 xe = centroid + (centroid - s[2].x) * 2.0;
            double fe = f(xe);
            if (fe < fr) s[2] = {xe, fe};
            else s[2] = {xr, fr};
        } else if (fr < s[1].f) {
            s[2] = {xr, fr};
        } else {
            Vec2 xc = centroid + (s[2].x - centroid) * 0.5;
            double fc = f(xc);
            if (fc < s[2].f) {
                s[2] = {xc, fc};
            } else {
                s[1].x = s[0].x + (s[1].x - s[0].x) * 0.5; s[1].f = f(s[1].x);
                s[2].x = s[0].x + (s[2].x - s[0].x) * 0.5; s[2].f = f(s[2].x);
            }
        }
        order();
    }
    return {s[0].x, s[0].f, false};
}

} // namespace detail

struct AsymmetryResult {
    double value = 0.0;
    Vec2 best_center;
    bool converged = true;
};

// |Omega \Delta B_R(x)| / |B_R(x)| at a fixed candidate center x.
inline double symmetric_difference_ratio(const BoundaryCurve& curve, double R, const Vec2& x,
                                         int n_poly = 2048) {
    std::vector<Vec2> poly(n_poly);
    for (int i = 0; i < n_poly; ++i) poly[i] = curve.point(2.0 * pi * i / n_poly);
    double a_omega = 0.0;
    for (int i = 0; i < n_poly; ++i) a_omega += 0.5 * poly[i].cross(poly[(i + 1) % n_poly]);
    double a_ball = pi * R * R;
    double inter = detail::circle_polygon_intersection_area(poly, x, R);
    return (a_omega + a_ball - 2.0 * inter) / a_ball;
}

inline AsymmetryResult asymmetry(const BoundaryCurve& curve, double R, int n_poly = 2048) {
    if (!(R > 0.0)) throw precondition_error("asymmetry: R must be positive");

    std::vector<Vec2> poly(n_poly);
    for (int i = 0; i < n_poly; ++i) poly[i] = curve.point(2.0 * pi * i / n_poly);
    double a_omega = 0.0;
    for (int i = 0; i < n_poly; ++i) a_omega += 0.5 * poly[i].cross(poly[(i + 1) % n_poly]);
    const double a_ball = pi * R * R;

    auto ratio = [&](const Vec2& x) {
        double inter = detail::circle_polygon_intersection_area(poly, x, R);
        return (a_omega + a_ball - 2.0 * inter) / a_ball;
    };

    // Coarse grid over Omega (step R/10), then simplex descent from the best cell.
    double xmin = poly[0].x, xmax = poly[0].x, ymin = poly[0].y, ymax = poly[0].y;
    for (const Vec2& p : poly) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    double step = R / 10.0;
    Vec2 best = curve.center;
    double fbest = ratio(best);
    for (double y = ymin; y <= ymax + 1e-12; y += step)
        for (double x = xmin; x <= xmax + 1e-12; x += step) {
            Vec2 cand{x, y};
            if (!curve.contains(cand)) continue;
            double f = ratio(cand);
            if (f < fbest - 1e-15 ||
                (std::abs(f - fbest) <= 1e-15 &&
                 (cand.x < best.x || (cand.x == best.x && cand.y < best.y)))) {
                fbest = f;
                best = cand;
            }
        }

    auto res = detail::nelder_mead(ratio, best, step / 2.0, 1e-8);
    AsymmetryResult out;
    out.value = std::max(res.f, 0.0);
    out.best_center = res.x;
    out.converged = res.converged;
    return out;
}

} // namespace symlab

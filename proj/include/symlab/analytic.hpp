#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "symlab/errors.hpp"

namespace symlab::analytic {

inline double unit_ball_volume(int N) {
    return std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0 + 1.0);
}

// Surface measure of the unit sphere, omega_N = N |B_1|. This normalization
// reproduces Cap_2(B_1) = 4 pi in three dimensions.
inline double sphere_area(int N) { return N * unit_ball_volume(N); }

// A closed-form radial profile with its validity interval; value() is the
// ground truth, derivative() the matching closed-form radial derivative.
struct RadialSolution {
    int dimension = 2;
    std::string kind;
    double p = 2.0;                      // only for p-Laplacian kinds
    double r_min = 0.0, r_max = 0.0;     // radii where the ODE is checked
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

inline RadialSolution ball_torsion(int N, double rho) {
    if (N < 2 || rho <= 0.0) throw param_error("ball_torsion: need N >= 2 and rho > 0");
    RadialSolution s;
    s.dimension = N;
    s.kind = "ball-torsion";
    s.r_min = 0.0;
    s.r_max = rho;
    s.value = [rho](double r) { return 0.5 * (r * r - rho * rho); };
    s.derivative = [](double r) { return r; };
    return s;
}

inline RadialSolution annulus_torsion(int N, double r, double R) {
    if (!(0.0 < r && r < R)) throw param_error("annulus_torsion: need 0 < r < R");
    if (N < 2) throw param_error("annulus_torsion: need N >= 2");
    RadialSolution s;
    s.dimension = N;
    s.kind = "annulus-torsion";
    s.r_min = r;
    s.r_max = R;
    const double kappa = r / R;
    if (N == 2) {
        const double c = 0.5 * R * R * (1.0 - kappa * kappa) / std::log(kappa);
        s.value = [=](double rho) {
            return 0.5 * rho * rho + c * std::log(rho / r) - 0.5 * r * r;
        };
        s.derivative = [=](double rho) { return rho + c / rho; };
    } else {
        const double A = 0.5 * R * R / (1.0 - std::pow(kappa, N - 2));
        const double B = 1.0 - kappa * kappa;
        const double C = std::pow(kappa, N) - 1.0;
        s.value = [=](double rho) {
            return 0.5 * rho * rho + A * (B * std::pow(rho / r, 2.0 - N) + C);
        };
        s.derivative = [=](double rho) {
            return rho + A * B * (2.0 - N) * std::pow(rho / r, 1.0 - N) / r;
        };
    }
    return s;
}

inline RadialSolution p_capacity_potential(int N, double p, double rho) {
    if (!(1.0 < p && p < N)) throw param_error("p_capacity_potential: need 1 < p < N");
    RadialSolution s;
    s.dimension = N;
    s.kind = "p-capacity-exterior";
    s.p = p;
    s.r_min = rho;
    s.r_max = 100.0 * rho;
    const double alpha = (N - p) / (p - 1.0);
    s.value = [=](double r) { return std::pow(rho / r, alpha); };
    s.derivative = [=](double r) { return -alpha * std::pow(rho / r, alpha) / r; };
    return s;
}

inline RadialSolution n_capacity_log(int N) {
    if (N < 2) throw param_error("n_capacity_log: need N >= 2");
    RadialSolution s;
    s.dimension = N;
    s.kind = "N-capacity-log";
    s.p = double(N);
    s.r_min = 1.0;
    s.r_max = 100.0;
    s.value = [](double r) { return -std::log(r); };
    s.derivative = [](double r) { return -1.0 / r; };
    return s;
}

inline RadialSolution punctured_potential(int N, double p) {
    if (!(1.0 < p && p < N)) throw param_error("punctured_potential: need 1 < p < N");
    RadialSolution s;
    s.dimension = N;
    s.kind = "p-interior-punctured";
    s.p = p;
    s.r_min = 0.05;
    s.r_max = 1.0;
    const double alpha = (N - p) / (p - 1.0);
    // unit ball, |Gamma| = omega_N: u = ((p-1)/(N-p)) r^{-alpha}, |grad u| = 1 at r = 1
    s.value = [=](double r) { return std::pow(r, -alpha) / alpha; };
    s.derivative = [=](double r) { return -std::pow(r, -alpha - 1.0); };
    return s;
}

// Seventh-order finite differences of value() alone; the residual of the
// radial equation
//   torsion kinds:      w'' + (N-1) w'/r - N = 0
//   p-Laplacian kinds:  (p-1) u'' + (N-1) u'/r = 0
// stays below 1e-10 when the closed forms are right.
inline double max_ode_residual(const RadialSolution& s, int n_samples = 100) {
    static const double d1[7] = {-1, 9, -45, 0, 45, -9, 1};    // /(60 h)
    static const double d2[7] = {2, -27, 270, -490, 270, -27, 2};  // /(180 h^2)
    const double shrink = 0.9;
    double lo = s.r_min + (1.0 - shrink) * (s.r_max - s.r_min) * 0.5;
    if (s.r_min == 0.0) lo = 0.05 * s.r_max;
    double hi = s.r_max - (1.0 - shrink) * (s.r_max - s.r_min) * 0.5;
    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        double r = lo * std::pow(hi / lo, double(i) / (n_samples - 1));
        // relative step; the quadratic ball profile is roundoff-dominated and
        // gets an absolute floor instead
        double h = 0.008 * r;
        if (s.kind == "ball-torsion") h = std::max(h, 0.006 * s.r_max);
        h = std::min(h, 0.12 * (hi - lo));
        double f1 = 0.0, f2 = 0.0;
        for (int k = 0; k < 7; ++k) {
            double v = s.value(r + (k - 3) * h);
            f1 += d1[k] * v;
            f2 += d2[k] * v;
        }
        f1 /= 60.0 * h;
        f2 /= 180.0 * h * h;
        double res;
        if (s.kind == "ball-torsion" || s.kind == "annulus-torsion")
            res = f2 + (s.dimension - 1) * f1 / r - s.dimension;
        else
            res = (s.p - 1.0) * f2 + (s.dimension - 1) * f1 / r;
        // near a singular endpoint the terms grow like r^{-alpha-2}; judge the
        // cancellation against their own size
        double scale = std::max({1.0, std::abs(f2), std::abs(f1) / r});
        worst = std::max(worst, std::abs(res) / scale);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// The annulus prefactor f(kappa) and the gradient-bound constant c_N
// ---------------------------------------------------------------------------

// Normal-derivative prefactor of the annulus solution at the inner contact
// point: -w'(r) = R (R - r)/r * f(kappa). For N = 2 the printed numerator has
// its sign flipped; the corrected form below matches the annulus derivative.
inline double annulus_prefactor(int N, double kappa) {
    if (!(0.0 < kappa && kappa < 1.0))
        throw param_error("annulus_prefactor: kappa must lie in (0,1)");
    if (N == 2) {
        double L = std::log(1.0 / kappa);
        return (1.0 - kappa * kappa - 2.0 * kappa * kappa * L) /
               (2.0 * (1.0 - kappa) * L);
    }
    double num = 2.0 * std::pow(kappa, N) - N * kappa * kappa + N - 2.0;
    double den = 2.0 * (1.0 - kappa) * (1.0 - std::pow(kappa, N - 2));
    return num / den;
}

inline double annulus_prefactor_limit_at_one(int N) {
    // series limit kappa -> 1^-: N/2 for every N >= 2
    return N / 2.0;
}

struct GradientBoundReport {
    int N = 2;
    double sup_f_numeric = 0.0;  // grid sup plus the kappa -> 1 series limit
    double c_theorem = 0.0;      // constant used by the gradient bound
    bool matches = false;        // |sup_f_numeric - c_theorem| <= 1e-3
};

// The gradient bound |grad u| <= c_N d (d + r_e)/r_e is stated with
// c_N = 3/2 for N = 2 and c_N = N/2 for N >= 3. The numerical sup of the
// (sign-corrected) annulus prefactor equals N/2 for every N, so the planar
// constant 3/2 is conservative; the report carries both numbers.
inline GradientBoundReport gradient_bound_constant(int N, double grid_step = 1e-4) {
    if (N < 2) throw param_error("gradient_bound_constant: need N >= 2");
    if (grid_step > 1e-4) grid_step = 1e-4;
    GradientBoundReport rep;
    rep.N = N;
    double sup = 0.0;
    for (double kappa = grid_step; kappa < 1.0 - 1e-3; kappa += grid_step)
        sup = std::max(sup, annulus_prefactor(N, kappa));
    sup = std::max(sup, annulus_prefactor_limit_at_one(N));
    rep.sup_f_numeric = sup;
    rep.c_theorem = N == 2 ? 1.5 : N / 2.0;
    rep.matches = std::abs(rep.sup_f_numeric - rep.c_theorem) <= 1e-3;
    return rep;
}

// ---------------------------------------------------------------------------
// p-capacity of balls
// ---------------------------------------------------------------------------

struct CapacityReport {
    int N = 3;
    double p = 2.0;
    double rho = 1.0;
    double capacity_ball = 0.0;        // omega_N ((N-p)/(p-1))^{p-1} rho^{N-p}
    double capacity_isoperimetric = 0.0;  // ((N-p)/(p-1))^{p-1} |Gamma|^p/(N|Omega|)^{p-1}
    double capacity_flux = 0.0;        // surf |grad u|^{p-1} over the sphere
    double c_overdetermined = 0.0;     // ((N-p)/(p-1)) H_0
    double gradient_at_boundary = 0.0; // |u'(rho)| of the potential
    double ode_residual = 0.0;
};

inline CapacityReport p_capacity_ball(int N, double p, double rho) {
    if (!(1.0 < p && p < N)) throw param_error("p_capacity_ball: need 1 < p < N");
    if (rho <= 0.0) throw param_error("p_capacity_ball: rho must be positive");
    CapacityReport r;
    r.N = N;
    r.p = p;
    r.rho = rho;
    const double omega = sphere_area(N);
    const double ratio = (N - p) / (p - 1.0);
    r.capacity_ball = omega * std::pow(ratio, p - 1.0) * std::pow(rho, N - p);
    const double gamma_meas = omega * std::pow(rho, N - 1.0);
    const double vol = unit_ball_volume(N) * std::pow(rho, N);
    r.capacity_isoperimetric =
        std::pow(ratio, p - 1.0) * std::pow(gamma_meas, p) / std::pow(N * vol, p - 1.0);
    r.c_overdetermined = ratio / rho;  // H_0 = 1/rho on the sphere
    RadialSolution u = p_capacity_potential(N, p, rho);
    r.gradient_at_boundary = std::abs(u.derivative(rho));
    r.capacity_flux = gamma_meas * std::pow(r.gradient_at_boundary, p - 1.0);
    r.ode_residual = max_ode_residual(u);
    return r;
}

// ---------------------------------------------------------------------------
// Simons cone desk checks
// ---------------------------------------------------------------------------

namespace detail {

// splitmix64: portable deterministic stream for the sampled checks.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }      // [0,1)
    double symmetric() { return 2.0 * uniform() - 1.0; }               // [-1,1)
};

} // namespace detail

struct ConeCheckReport {
    int m = 2;
    int n_points = 0;
    std::uint64_t seed = 0;
    double max_mean_curvature_on_cone = 0.0;  // summed convention, should be ~0
    double max_fd_gap = 0.0;                  // closed form vs central differences
    int sign_agreements = 0;
    int sign_samples = 0;
    bool violation_found = false;             // only searched for m in {2,3}
    double violation_s = 0.0, violation_t = 0.0;
};

// u = |x'|^2 - |x''|^2 defines the cone; ubar = |x'|^4 - |x''|^4 defines the
// calibration field X = grad(ubar)/|grad(ubar)|. For rotationally symmetric
// fields everything reduces to the two radial variables (s, t):
//   div(grad u/|grad u|) = -(s^2 - t^2) / (s^2 + t^2)^{3/2}
//   div X = (s^2-t^2) [(m-1)(s^6+t^6) - 3 s^2 t^2 (s^2+t^2)] / (s^6+t^6)^{3/2}
inline double cone_mean_curvature(double s, double t) {
    return -(s * s - t * t) / std::pow(s * s + t * t, 1.5);
}

inline double calibration_divergence(int m, double s, double t) {
    double s2 = s * s, t2 = t * t;
    double D = std::pow(s2, 3) + std::pow(t2, 3);
    double bracket = (m - 1.0) * D - 3.0 * s2 * t2 * (s2 + t2);
    return (s2 - t2) * bracket / std::pow(D, 1.5);
}

namespace detail {

// Central-difference divergence of a rotationally symmetric vector field
// V = g(s,t) x' + h(s,t) x'' in R^{2m}.
template <typename G, typename H>
inline double fd_divergence(int m, const std::vector<double>& x, G&& g, H&& h,
                            double step = 1e-5) {
    auto st = [&](const std::vector<double>& y) {
        double s2 = 0, t2 = 0;
        for (int i = 0; i < m; ++i) s2 += y[i] * y[i];
        for (int i = m; i < 2 * m; ++i) t2 += y[i] * y[i];
        return std::pair<double, double>(std::sqrt(s2), std::sqrt(t2));
    };
    double div = 0.0;
    std::vector<double> y = x;
    for (int i = 0; i < 2 * m; ++i) {
        y[i] = x[i] + step;
        auto [sp, tp] = st(y);
        double vp = (i < m ? g(sp, tp) : h(sp, tp)) * y[i];
        y[i] = x[i] - step;
        auto [sm, tm] = st(y);
        double vm = (i < m ? g(sm, tm) : h(sm, tm)) * y[i];
        y[i] = x[i];
        div += (vp - vm) / (2.0 * step);
    }
    return div;
}

} // namespace detail

inline ConeCheckReport cone_checks(int m, int n_points, std::uint64_t seed) {
    if (m < 1) throw param_error("cone_checks: need m >= 1");
    if (n_points < 1) throw param_error("cone_checks: need n_points >= 1");
    ConeCheckReport rep;
    rep.m = m;
    rep.n_points = n_points;
    rep.seed = seed;
    detail::SplitMix64 rng(seed);

    auto sample_vector = [&](double lo, double hi) {
        std::vector<double> x(std::size_t(2 * m));
        for (auto& v : x) v = rng.symmetric() * hi;
        double s2 = 0, t2 = 0;
        for (int i = 0; i < m; ++i) s2 += x[i] * x[i];
        for (int i = m; i < 2 * m; ++i) t2 += x[i] * x[i];
        if (std::sqrt(s2 + t2) < lo) x[0] += lo;  // nudge away from the origin
        return x;
    };

    // (a) zero mean curvature on the cone, closed form vs finite differences
    auto g_u = [](double s, double t) { return 1.0 / std::sqrt(s * s + t * t); };
    auto h_u = [](double s, double t) { return -1.0 / std::sqrt(s * s + t * t); };
    for (int i = 0; i < n_points; ++i) {
        std::vector<double> x(std::size_t(2 * m));
        double s2 = 0.0;
        for (int k = 0; k < m; ++k) {
            x[k] = rng.symmetric() + (k == 0 ? 1.0 : 0.0);
            s2 += x[k] * x[k];
        }
        // random direction pair scaled so |x'| = |x''| = s, s in [0.5, 2]
        double s = 0.5 + 1.5 * rng.uniform();
        double fs = s / std::sqrt(s2);
        for (int k = 0; k < m; ++k) x[k] *= fs;
        double t2 = 0.0;
        for (int k = m; k < 2 * m; ++k) {
            x[k] = rng.symmetric() + (k == m ? 1.0 : 0.0);
            t2 += x[k] * x[k];
        }
        double ft = s / std::sqrt(t2);
        for (int k = m; k < 2 * m; ++k) x[k] *= ft;
        rep.max_mean_curvature_on_cone =
            std::max(rep.max_mean_curvature_on_cone, std::abs(cone_mean_curvature(s, s)));
        double fd = detail::fd_divergence(m, x, g_u, h_u);
        rep.max_mean_curvature_on_cone = std::max(rep.max_mean_curvature_on_cone, std::abs(fd));
    }

    // (b)/(c) sign of div X against the sign of ubar
    auto g_x = [](double s, double t) {
        double D = std::pow(s, 6.0) + std::pow(t, 6.0);
        return s * s / std::sqrt(D);
    };
    auto h_x = [](double s, double t) {
        double D = std::pow(s, 6.0) + std::pow(t, 6.0);
        return -t * t / std::sqrt(D);
    };
    int budget = m >= 4 ? n_points : 10000;
    for (int i = 0; i < budget; ++i) {
        std::vector<double> x = sample_vector(0.3, 1.0);
        double s2 = 0, t2 = 0;
        for (int k = 0; k < m; ++k) s2 += x[k] * x[k];
        for (int k = m; k < 2 * m; ++k) t2 += x[k] * x[k];
        double s = std::sqrt(s2), t = std::sqrt(t2);
        if (std::abs(s2 - t2) < 0.05 * (s2 + t2)) { --i; continue; }  // too close to the cone
        if (s2 + t2 < 0.09) { --i; continue; }
        double ubar = s2 * s2 - t2 * t2;
        double div = calibration_divergence(m, s, t);
        bool agree = (ubar > 0.0) == (div > 0.0);
        ++rep.sign_samples;
        if (agree) ++rep.sign_agreements;
        if (!agree && !rep.violation_found) {
            rep.violation_found = true;
            rep.violation_s = s;
            rep.violation_t = t;
        }
        if (i < 16) {
            double fd = detail::fd_divergence(m, x, g_x, h_x);
            rep.max_fd_gap = std::max(rep.max_fd_gap, std::abs(fd - div));
        }
        if (m < 4 && rep.violation_found && rep.sign_samples >= n_points) break;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Hardy's inequality, the Simons exponent window, and the extremal-solution
// stability threshold
// ---------------------------------------------------------------------------

struct HardyReport {
    int n = 3;
    double a = 0.0;
    double best_constant = 0.0;          // (n-2)^2/4
    double min_profile_quotient = 0.0;   // over the tested profile family
    bool quotient_above_constant = false;
    std::vector<double> driven_quotients;  // for a > best constant: decreasing
    bool divergence_achieved = false;      // quotient pushed below -1e3
    bool window_exists = false;            // alpha^2<2, beta^2<2, alpha<(n-5)/2<beta
    double window_alpha = 0.0, window_beta = 0.0;
    double extremal_max_residual = 0.0;    // -laplace(-2 log|x|) vs 2(n-2)e^u
    bool stability_flag = false;           // 2(n-2) <= (n-2)^2/4, i.e. n >= 10
};

namespace detail {

// Radial quotients over B_1 for xi = r^{-alpha} - 1 cut off at r_c (constant
// inside): returns (int r^{n-1} xi'^2, int r^{n-3} xi^2, int r^{n-1} xi^2).
inline std::array<double, 3> hardy_integrals(int n, double alpha, double r_c) {
    const int M = 4096;
    double I_grad = 0.0, I_hardy = 0.0, I_mass = 0.0;
    // log-spaced trapezoid on [r_c, 1]
    double ls = std::log(r_c);
    for (int i = 0; i < M; ++i) {
        double s0 = ls * (1.0 - double(i) / M);
        double s1 = ls * (1.0 - double(i + 1) / M);
        double r0 = std::exp(s0), r1 = std::exp(s1);
        auto term = [&](double r, int which) {
            double xi = std::pow(r, -alpha) - 1.0;
            double xip = -alpha * std::pow(r, -alpha - 1.0);
            if (which == 0) return std::pow(r, n - 1.0) * xip * xip;
            if (which == 1) return std::pow(r, n - 3.0) * xi * xi;
            return std::pow(r, n - 1.0) * xi * xi;
        };
        double w = 0.5 * (r1 - r0);
        for (int which = 0; which < 3; ++which) {
            double v = w * (term(r0, which) + term(r1, which));
            if (which == 0) I_grad += v;
            else if (which == 1) I_hardy += v;
            else I_mass += v;
        }
    }
    // constant plateau inside r_c (xi' = 0 there)
    double xi_c = std::pow(r_c, -alpha) - 1.0;
    I_hardy += xi_c * xi_c * std::pow(r_c, n - 2.0) / (n - 2.0);
    I_mass += xi_c * xi_c * std::pow(r_c, double(n)) / double(n);
    return {I_grad, I_hardy, I_mass};
}

} // namespace detail

inline HardyReport hardy_and_windows(int n, double a) {
    if (n < 3) throw param_error("hardy_and_windows: need n >= 3");
    HardyReport rep;
    rep.n = n;
    rep.a = a;
    rep.best_constant = 0.25 * (n - 2.0) * (n - 2.0);

    // (a) profile quotients stay above the best constant
    rep.min_profile_quotient = std::numeric_limits<double>::infinity();
    for (double frac : {0.3, 0.5, 0.7, 0.9, 0.97})
        for (double r_c : {1e-3, 1e-5, 1e-7}) {
            double alpha = frac * 0.5 * (n - 2.0);
            auto I = detail::hardy_integrals(n, alpha, r_c);
            rep.min_profile_quotient = std::min(rep.min_profile_quotient, I[0] / I[1]);
        }
    rep.quotient_above_constant = rep.min_profile_quotient > rep.best_constant;

    // (b) for a above the best constant, drive the spectral quotient down
    if (a > rep.best_constant) {
        double alpha = 0.5 * (0.5 * (n - 2.0) + std::min(std::sqrt(a), 0.5 * n));
        double r_c = 1e-2;
        for (int k = 0; k < 40 && !rep.divergence_achieved; ++k) {
            auto I = detail::hardy_integrals(n, alpha, r_c);
            double q = (I[0] - a * I[1]) / I[2];
            rep.driven_quotients.push_back(q);
            if (q < -1e3) rep.divergence_achieved = true;
            r_c *= 0.2;
            if (r_c < 1e-30) break;
        }
    }

    // (c) Simons window: alpha < (n-5)/2 < beta with alpha^2 < 2, beta^2 < 2
    const double root2 = std::sqrt(2.0);
    double mid = 0.5 * (n - 5.0);
    rep.window_exists = (-root2 < mid) && (mid < root2);
    if (rep.window_exists) {
        rep.window_alpha = 0.5 * (mid - root2);
        rep.window_beta = 0.5 * (mid + root2);
    }

    // (d) extremal solution of -laplace(u) = 2(n-2) e^u and its stability flag
    for (double r : {0.2, 0.5, 0.8, 1.0}) {
        double h = 1e-4 * r;
        auto u = [](double rr) { return -2.0 * std::log(rr); };
        double d2 = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
        double d1 = (u(r + h) - u(r - h)) / (2.0 * h);
        double lhs = -(d2 + (n - 1.0) * d1 / r);
        double rhs = 2.0 * (n - 2.0) * std::exp(u(r));
        rep.extremal_max_residual =
            std::max(rep.extremal_max_residual, std::abs(lhs - rhs) / std::abs(rhs));
    }
    rep.stability_flag = 2.0 * (n - 2.0) <= rep.best_constant;
    return rep;
}

} // namespace symlab::analytic

#pragma once

#include <functional>

#include "symlab/identities.hpp"

namespace symlab {

struct DeficitReport {
    GeometrySummary geometry;
    double h_max = 0.0;
    int degree = 2;
    Vec2 z;

    double rho_i = 0.0, rho_e = 0.0, rho_gap = 0.0;
    double serrin_L2 = 0.0;   // ||u_nu - R||_{2,Gamma}
    double serrin_L1 = 0.0;   // ||u_nu - R||_{1,Gamma}
    double sbt_L2 = 0.0;      // ||H0 - H||_{2,Gamma}
    double sbt_plus = 0.0;    // integral (H0 - H)^+
    bool hk_applicable = false;
    double hk_deficit = 0.0;    // surf dS/H - surf u_nu dS  (volume identity form)
    double obvp_deficit = 0.0;  // surf (1/H - u_nu) dS
    double asymmetry_value = 0.0;
    Vec2 asymmetry_center;
    bool asymmetry_converged = true;

    double oscillation = 0.0;
    double weighted_deficit = 0.0;
    double unweighted_deficit = 0.0;

    double min_flux = 0.0, max_flux = 0.0;
    // Worst-case ratios of -u against the two distance lower bounds.
    double distance_sq_ratio = 1.0;   // min (-u) / (delta^2/2)
    double distance_lin_ratio = 1.0;  // min (-u) / ((r_i/2) delta)

    std::vector<IdentityResidual> identity_residuals;
};

namespace detail {

inline std::vector<Vec2> boundary_polyline(const BoundaryCurve& curve, int n = 4096) {
    std::vector<Vec2> poly(n);
    for (int i = 0; i < n; ++i) poly[i] = curve.point(2.0 * pi * i / n);
    return poly;
}

inline double distance_to_polyline(const std::vector<Vec2>& poly, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i)
        best = std::min(best,
                        point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
    return best;
}

} // namespace detail

inline DeficitReport deficit_report(const DomainSolve& d) {
    DeficitReport r;
    r.geometry = d.geo;
    r.h_max = d.h_max;
    r.degree = d.degree;
    r.z = d.z;

    auto rad = radii_at(d.curve, d.z);
    r.rho_i = rad.rho_i;
    r.rho_e = rad.rho_e;
    r.rho_gap = rad.rho_e - rad.rho_i;

    IdentityWorkspace w(d);
    const double R = d.geo.R, H0 = d.geo.H0;
    double s2 = 0.0, s1 = 0.0, c2 = 0.0, cp = 0.0;
    double inv_h = 0.0, flux_total = 0.0, obvp = 0.0;
    double hmin = std::numeric_limits<double>::infinity();
    for (const auto& b : w.bnd) {
        s2 += (b.u_nu - R) * (b.u_nu - R) * b.w;
        s1 += std::abs(b.u_nu - R) * b.w;
        c2 += (H0 - b.H) * (H0 - b.H) * b.w;
        cp += std::max(H0 - b.H, 0.0) * b.w;
        hmin = std::min(hmin, b.H);
        flux_total += b.u_nu * b.w;
    }
    r.serrin_L2 = std::sqrt(s2);
    r.serrin_L1 = s1;
    r.sbt_L2 = std::sqrt(c2);
    r.sbt_plus = cp;

    // Strict positivity of H over a dense sample decides applicability.
    double hmin_dense = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4096; ++i)
        hmin_dense = std::min(hmin_dense, d.curve.curvature(2.0 * pi * i / 4096));
    r.hk_applicable = hmin_dense > 0.0;
    if (r.hk_applicable) {
        for (const auto& b : w.bnd) {
            inv_h += (1.0 / b.H) * b.w;
            obvp += (1.0 / b.H - b.u_nu) * b.w;
        }
        // N|Omega| is taken as the flux quadrature so that the two deficit
        // forms are the same sum rearranged.
        r.hk_deficit = inv_h - flux_total;
        r.obvp_deficit = obvp;
    }

    auto asym = asymmetry(d.curve, R);
    r.asymmetry_value = asym.value;
    r.asymmetry_center = asym.best_center;
    r.asymmetry_converged = asym.converged;

    r.oscillation = d.bundle.oscillation;
    r.weighted_deficit = d.bundle.weighted_deficit;
    r.unweighted_deficit = d.bundle.unweighted_deficit;

    r.min_flux = std::numeric_limits<double>::infinity();
    r.max_flux = -std::numeric_limits<double>::infinity();
    for (int i : d.u.space->boundary_node_ids) {
        r.min_flux = std::min(r.min_flux, d.u.boundary_flux[i]);
        r.max_flux = std::max(r.max_flux, d.u.boundary_flux[i]);
    }

    auto poly = detail::boundary_polyline(d.curve);
    double rsq = std::numeric_limits<double>::infinity();
    double rlin = std::numeric_limits<double>::infinity();
    for (int v = 0; v < d.mesh->n_vertices(); ++v) {
        if (d.mesh->on_boundary[v]) continue;
        double delta = detail::distance_to_polyline(poly, d.mesh->vertices[v]);
        if (delta < 4.0 * d.h_max * 1e-2) continue; // skip razor-thin denominators
        double mu = -d.u.dof_values[v];
        rsq = std::min(rsq, mu / (0.5 * delta * delta));
        rlin = std::min(rlin, mu / (0.5 * d.geo.r_i * delta));
    }
    r.distance_sq_ratio = rsq;
    r.distance_lin_ratio = rlin;

    r.identity_residuals.clear();
    for (const auto& id : identity_ids()) r.identity_residuals.push_back(check_identity(id, d, w));
    return r;
}

inline DeficitReport deficit_report(const BoundaryCurve& curve, double h_max, int degree = 2) {
    return deficit_report(solve_domain(curve, h_max, degree));
}

struct BoundCheck {
    std::string name;
    double lhs = 0.0;   // quantity being bounded
    double rhs = 0.0;   // bound (before slack)
    double margin = 0.0; // rhs*(1+slack) - lhs, or lhs - rhs*(1-slack) for lower bounds
    bool pass = false;
};

// Fully explicit inequality checks; `slack` absorbs discretization error on
// the disadvantaged side (default 2%).
inline std::vector<BoundCheck> explicit_bound_checks(const DeficitReport& r,
                                                     double slack = 0.02) {
    std::vector<BoundCheck> out;
    const double N = double(kDim);
    const auto& g = r.geometry;

    {
        BoundCheck c;
        c.name = "comparing_asymmetry";
        double r_low = std::min(g.r_i, g.r_e);
        c.lhs = r.rho_gap;
        c.rhs = std::max(2.0 * g.diameter, g.diameter * g.diameter / (2.0 * r_low)) *
                std::pow(r.asymmetry_value, 1.0 / N);
        c.margin = c.rhs * (1.0 + slack) - c.lhs;
        c.pass = c.margin >= 0.0;
        out.push_back(c);
    }
    {
        BoundCheck c;
        c.name = "gradient_lower";
        c.lhs = r.min_flux;
        c.rhs = g.r_i;
        c.margin = c.lhs - c.rhs * (1.0 - slack);
        c.pass = c.margin >= 0.0;
        out.push_back(c);
    }
    {
        BoundCheck c;
        c.name = "gradient_upper";
        c.lhs = r.max_flux;
        c.rhs = 1.5 * g.diameter * (g.diameter + g.r_e) / g.r_e;
        c.margin = c.rhs * (1.0 + slack) - c.lhs;
        c.pass = c.margin >= 0.0;
        out.push_back(c);
    }
    {
        BoundCheck c;
        c.name = "distance_quadratic";
        c.lhs = r.distance_sq_ratio;
        c.rhs = 1.0;
        c.margin = c.lhs - (1.0 - slack);
        c.pass = c.margin >= 0.0;
        out.push_back(c);
    }
    {
        BoundCheck c;
        c.name = "distance_linear";
        c.lhs = r.distance_lin_ratio;
        c.rhs = 1.0;
        c.margin = c.lhs - (1.0 - slack);
        c.pass = c.margin >= 0.0;
        out.push_back(c);
    }
    {
        BoundCheck c;
        c.name = "asymmetry_remark";
        c.lhs = r.asymmetry_value;
        c.rhs = N * std::pow(r.rho_e, N - 1.0) * r.rho_gap / std::pow(g.R, N);
        // equality degenerates on balls; allow an absolute tail there
        c.margin = c.rhs * (1.0 + slack) + 1e-5 - c.lhs;
        c.pass = c.margin >= 0.0;
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stability-exponent sweeps
// ---------------------------------------------------------------------------

struct CurveFamily {
    std::string id;
    std::function<BoundaryCurve(double)> make;  // family(0) must be a circle
};

struct MeshRule {
    double c_mesh = 1.0;   // h_max <= c_mesh * eps
    double h_cap = 0.03;   // never coarser than this
    double noise_floor = 1e-8;  // deficits below this are excluded from fits
    double fit_eps_cutoff = 0.1;  // fits only use eps below this
};

struct SweepPoint {
    double eps = 0.0;
    double h_max = 0.0;
    bool excluded = false;
    std::string note;
    DeficitReport report;
};

struct ExponentFit {
    std::string deficit_id;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

struct SweepResult {
    std::string family_id;
    std::vector<SweepPoint> points;          // eps strictly decreasing
    std::vector<ExponentFit> fits;           // log(rho_gap) against log(deficit)
    std::vector<double> ratio_serrin_tau;    // rho_gap / serrin_L2^tau2, tau2 = 1
    std::vector<double> ratio_sbt_tau;       // rho_gap / sbt_L2
    std::vector<double> ratio_asym_sbt;      // A(Omega) / sbt_L2
};

namespace detail {

inline ExponentFit loglog_fit(const std::string& id, const std::vector<double>& x,
                              const std::vector<double>& y) {
    ExponentFit f;
    f.deficit_id = id;
    f.n_points = int(x.size());
    if (x.size() < 2) return f;
    double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly; syy += ly * ly;
    }
    double den = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double pred = f.intercept + f.slope * std::log(x[i]);
        double e = std::log(y[i]) - pred;
        ss_res += e * e;
    }
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace detail

inline SweepResult stability_sweep(const CurveFamily& family, std::vector<double> epsilons,
                                   const MeshRule& rule = {}, int degree = 2) {
    if (epsilons.size() < 4)
        throw precondition_error("stability_sweep: need at least 4 epsilons");
    std::sort(epsilons.begin(), epsilons.end(), std::greater<double>());

    SweepResult out;
    out.family_id = family.id;
    for (double eps : epsilons) {
        SweepPoint p;
        p.eps = eps;
        p.h_max = std::min(rule.h_cap, rule.c_mesh * eps);
        p.report = deficit_report(family.make(eps), p.h_max, degree);
        if (p.report.rho_gap < rule.noise_floor || p.report.serrin_L2 < rule.noise_floor) {
            p.excluded = true;
            p.note = "deficit at or below the noise floor";
        }
        out.points.push_back(std::move(p));
    }

    auto collect = [&](auto&& get) {
        std::pair<std::vector<double>, std::vector<double>> xy;
        for (const auto& p : out.points) {
            if (p.excluded || p.eps >= rule.fit_eps_cutoff) continue;
            double v = get(p.report);
            if (v <= rule.noise_floor) continue;
            xy.first.push_back(v);
            xy.second.push_back(p.report.rho_gap);
        }
        return xy;
    };

    {
        auto [x, y] = collect([](const DeficitReport& r) { return r.serrin_L2; });
        out.fits.push_back(detail::loglog_fit("serrin_L2", x, y));
    }
    {
        auto [x, y] = collect([](const DeficitReport& r) { return r.serrin_L1; });
        out.fits.push_back(detail::loglog_fit("serrin_L1", x, y));
    }
    {
        auto [x, y] = collect([](const DeficitReport& r) { return r.sbt_L2; });
        out.fits.push_back(detail::loglog_fit("sbt_L2", x, y));
    }
    {
        auto [x, y] = collect([](const DeficitReport& r) { return r.sbt_plus; });
        out.fits.push_back(detail::loglog_fit("sbt_plus", x, y));
    }
    {
        auto [x, y] = collect(
            [](const DeficitReport& r) { return r.hk_applicable ? r.hk_deficit : 0.0; });
        out.fits.push_back(detail::loglog_fit("hk_deficit", x, y));
    }

    const double tau2 = 1.0; // Lipschitz exponent in the plane
    for (const auto& p : out.points) {
        if (p.excluded) continue;
        out.ratio_serrin_tau.push_back(p.report.rho_gap /
                                       std::pow(p.report.serrin_L2, tau2));
        out.ratio_sbt_tau.push_back(p.report.rho_gap / std::pow(p.report.sbt_L2, tau2));
        out.ratio_asym_sbt.push_back(p.report.asymmetry_value / p.report.sbt_L2);
    }
    return out;
}

inline CurveFamily cosine_family(int mode, double base_radius = 1.0) {
    CurveFamily f;
    f.id = "cos" + std::to_string(mode);
    f.make = [mode, base_radius](double eps) {
        std::vector<double> c(std::size_t(mode), 0.0);
        c[std::size_t(mode) - 1] = eps;
        return BoundaryCurve(base_radius, c, {});
    };
    return f;
}

} // namespace symlab

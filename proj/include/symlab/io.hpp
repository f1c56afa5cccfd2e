#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "symlab/analytic.hpp"
#include "symlab/stability.hpp"

namespace symlab::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// curves:  {"a0": ..., "cos": [...], "sin": [...], "center": [x, y]}
// ---------------------------------------------------------------------------

inline json curve_to_json(const BoundaryCurve& c) {
    return json{{"a0", c.a0},
                {"cos", c.cos_coeffs},
                {"sin", c.sin_coeffs},
                {"center", {c.center.x, c.center.y}}};
}

inline BoundaryCurve curve_from_json(const json& j) {
    if (!j.is_object()) throw config_error("curve: expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "a0" && it.key() != "cos" && it.key() != "sin" && it.key() != "center")
            throw config_error("curve: unknown key '" + it.key() + "'");
    BoundaryCurve c;
    c.a0 = j.at("a0").get<double>();
    if (j.contains("cos")) c.cos_coeffs = j.at("cos").get<std::vector<double>>();
    if (j.contains("sin")) c.sin_coeffs = j.at("sin").get<std::vector<double>>();
    if (j.contains("center")) {
        auto v = j.at("center").get<std::vector<double>>();
        if (v.size() != 2) throw config_error("curve: center must be [x, y]");
        c.center = {v[0], v[1]};
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// meshes: {"vertices", "triangles", "boundary_edges", "boundary_thetas", ...}
// ---------------------------------------------------------------------------

inline json mesh_to_json(const Mesh& m) {
    json jv = json::array(), jt = json::array(), je = json::array(), jth = json::array();
    for (const auto& v : m.vertices) jv.push_back({v.x, v.y});
    for (const auto& t : m.triangles) jt.push_back({t[0], t[1], t[2]});
    for (const auto& e : m.boundary_edges) {
        je.push_back({e.a, e.b});
        jth.push_back(e.theta_a);
    }
    return json{{"vertices", jv},
                {"triangles", jt},
                {"boundary_edges", je},
                {"boundary_thetas", jth},
                {"curve", curve_to_json(m.curve)},
                {"h_max", m.h_max}};
}

inline Mesh mesh_from_json(const json& j) {
    Mesh m;
    m.curve = curve_from_json(j.at("curve"));
    m.h_max = j.at("h_max").get<double>();
    for (const auto& v : j.at("vertices")) m.vertices.push_back({v.at(0), v.at(1)});
    for (const auto& t : j.at("triangles"))
        m.triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    const auto& je = j.at("boundary_edges");
    const auto& jth = j.at("boundary_thetas");
    m.on_boundary.assign(m.vertices.size(), 0);
    m.vertex_theta.assign(m.vertices.size(), 0.0);
    for (std::size_t i = 0; i < je.size(); ++i) {
        BoundaryEdge e;
        e.a = je[i].at(0).get<int>();
        e.b = je[i].at(1).get<int>();
        e.theta_a = jth.at(i).get<double>();
        double tb = jth.at((i + 1) % je.size()).get<double>();
        e.theta_b = tb > e.theta_a ? tb : tb + 2.0 * pi;
        e.normal = m.curve.outward_normal(0.5 * (e.theta_a + e.theta_b));
        m.boundary_edges.push_back(e);
        m.on_boundary[e.a] = 1;
        m.vertex_theta[e.a] = e.theta_a;
    }
    return m;
}

// ---------------------------------------------------------------------------
// fields and reports
// ---------------------------------------------------------------------------

inline json field_to_json(const ScalarField& f) {
    return json{{"degree", f.degree},
                {"dof_values", f.dof_values},
                {"boundary_flux", f.boundary_flux}};
}

// CSV vertex table: x, y, u, ux, uy, flux (flux is 0 off the boundary).
inline std::string field_to_csv(const ScalarField& f) {
    std::ostringstream out;
    out << "x,y,u,ux,uy,flux\n";
    out << std::setprecision(17);
    const Mesh& m = *f.mesh;
    for (int v = 0; v < m.n_vertices(); ++v) {
        out << m.vertices[v].x << ',' << m.vertices[v].y << ',' << f.dof_values[v] << ','
            << f.recovered_gradient[v].x << ',' << f.recovered_gradient[v].y << ','
            << f.boundary_flux[v] << '\n';
    }
    return out.str();
}

inline json residual_to_json(const IdentityResidual& r) {
    return json{{"id", r.id},
                {"lhs", r.lhs},
                {"rhs", r.rhs},
                {"relative_residual", r.relative_residual},
                {"scaled_residual", r.scaled_residual},
                {"scale", r.scale},
                {"applicable", r.applicable},
                {"reason", r.reason}};
}

inline std::string residuals_to_csv(const std::vector<IdentityResidual>& rs) {
    std::ostringstream out;
    out << "id,lhs,rhs,residual,applicable\n";
    out << std::setprecision(17);
    for (const auto& r : rs)
        out << r.id << ',' << r.lhs << ',' << r.rhs << ',' << r.relative_residual << ','
            << (r.applicable ? "true" : "false") << '\n';
    return out.str();
}

inline json geometry_to_json(const GeometrySummary& g) {
    return json{{"area", g.area},         {"perimeter", g.perimeter}, {"R", g.R},
                {"H0", g.H0},             {"diameter", g.diameter},   {"r_i", g.r_i},
                {"r_e", g.r_e}};
}

inline json report_to_json(const DeficitReport& r) {
    json jr = json::array();
    for (const auto& ir : r.identity_residuals) jr.push_back(residual_to_json(ir));
    return json{{"geometry", geometry_to_json(r.geometry)},
                {"h_max", r.h_max},
                {"degree", r.degree},
                {"z", {r.z.x, r.z.y}},
                {"rho_i", r.rho_i},
                {"rho_e", r.rho_e},
                {"rho_gap", r.rho_gap},
                {"serrin_L2", r.serrin_L2},
                {"serrin_L1", r.serrin_L1},
                {"sbt_L2", r.sbt_L2},
                {"sbt_plus", r.sbt_plus},
                {"hk_applicable", r.hk_applicable},
                {"hk_deficit", r.hk_deficit},
                {"obvp_deficit", r.obvp_deficit},
                {"asymmetry", r.asymmetry_value},
                {"asymmetry_center", {r.asymmetry_center.x, r.asymmetry_center.y}},
                {"asymmetry_converged", r.asymmetry_converged},
                {"oscillation", r.oscillation},
                {"weighted_deficit", r.weighted_deficit},
                {"unweighted_deficit", r.unweighted_deficit},
                {"min_flux", r.min_flux},
                {"max_flux", r.max_flux},
                {"distance_sq_ratio", r.distance_sq_ratio},
                {"distance_lin_ratio", r.distance_lin_ratio},
                {"identity_residuals", jr}};
}

inline json bound_checks_to_json(const std::vector<BoundCheck>& cs) {
    json out = json::array();
    for (const auto& c : cs)
        out.push_back(json{{"name", c.name},
                           {"lhs", c.lhs},
                           {"rhs", c.rhs},
                           {"margin", c.margin},
                           {"pass", c.pass}});
    return out;
}

inline json sweep_to_json(const SweepResult& s) {
    json pts = json::array();
    for (const auto& p : s.points)
        pts.push_back(json{{"eps", p.eps},
                           {"h_max", p.h_max},
                           {"excluded", p.excluded},
                           {"note", p.note},
                           {"report", report_to_json(p.report)}});
    json fits = json::array();
    for (const auto& f : s.fits)
        fits.push_back(json{{"deficit", f.deficit_id},
                            {"slope", f.slope},
                            {"intercept", f.intercept},
                            {"r_squared", f.r_squared},
                            {"n_points", f.n_points}});
    return json{{"family", s.family_id},
                {"points", pts},
                {"fits", fits},
                {"ratio_rho_gap_over_serrin_L2", s.ratio_serrin_tau},
                {"ratio_rho_gap_over_sbt_L2", s.ratio_sbt_tau},
                {"ratio_asymmetry_over_sbt_L2", s.ratio_asym_sbt}};
}

inline std::string sweep_to_csv(const SweepResult& s) {
    std::ostringstream out;
    out << "eps,h_max,rho_gap,serrin_L2,serrin_L1,sbt_L2,sbt_plus,hk_deficit,asymmetry,"
           "excluded\n";
    out << std::setprecision(17);
    for (const auto& p : s.points) {
        const auto& r = p.report;
        out << p.eps << ',' << p.h_max << ',' << r.rho_gap << ',' << r.serrin_L2 << ','
            << r.serrin_L1 << ',' << r.sbt_L2 << ',' << r.sbt_plus << ',' << r.hk_deficit << ','
            << r.asymmetry_value << ',' << (p.excluded ? "true" : "false") << '\n';
    }
    return out.str();
}

inline json gradient_bound_to_json(const analytic::GradientBoundReport& g) {
    return json{{"N", g.N},
                {"sup_f_numeric", g.sup_f_numeric},
                {"c_theorem", g.c_theorem},
                {"matches", g.matches}};
}

inline json capacity_to_json(const analytic::CapacityReport& c) {
    return json{{"N", c.N},
                {"p", c.p},
                {"rho", c.rho},
                {"capacity_ball", c.capacity_ball},
                {"capacity_isoperimetric", c.capacity_isoperimetric},
                {"capacity_flux", c.capacity_flux},
                {"c_overdetermined", c.c_overdetermined},
                {"gradient_at_boundary", c.gradient_at_boundary},
                {"ode_residual", c.ode_residual}};
}

inline json cone_to_json(const analytic::ConeCheckReport& c) {
    return json{{"m", c.m},
                {"n_points", c.n_points},
                {"seed", c.seed},
                {"max_mean_curvature_on_cone", c.max_mean_curvature_on_cone},
                {"max_fd_gap", c.max_fd_gap},
                {"sign_agreements", c.sign_agreements},
                {"sign_samples", c.sign_samples},
                {"violation_found", c.violation_found},
                {"violation_s", c.violation_s},
                {"violation_t", c.violation_t}};
}

inline json hardy_to_json(const analytic::HardyReport& h) {
    return json{{"n", h.n},
                {"a", h.a},
                {"best_constant", h.best_constant},
                {"min_profile_quotient", h.min_profile_quotient},
                {"quotient_above_constant", h.quotient_above_constant},
                {"driven_quotients", h.driven_quotients},
                {"divergence_achieved", h.divergence_achieved},
                {"window_exists", h.window_exists},
                {"window_alpha", h.window_alpha},
                {"window_beta", h.window_beta},
                {"extremal_max_residual", h.extremal_max_residual},
                {"stability_flag", h.stability_flag}};
}

// ---------------------------------------------------------------------------
// Self-contained SVG log-log plot with the data table embedded as a comment.
// ---------------------------------------------------------------------------

inline std::string loglog_svg(const std::string& title, const std::vector<double>& x,
                              const std::vector<double>& y, double slope, double intercept) {
    const int W = 480, H = 360, ml = 60, mr = 20, mt = 40, mb = 50;
    std::ostringstream out;
    out << std::setprecision(17);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<!-- data:\n";
    out << "x,y\n";
    for (std::size_t i = 0; i < x.size(); ++i) out << x[i] << ',' << y[i] << '\n';
    out << "fit: slope=" << slope << " intercept=" << intercept << "\n-->\n";
    if (x.empty()) {
        out << "<text x=\"20\" y=\"30\">no data</text>\n</svg>\n";
        return out.str();
    }
    double lx0 = std::log10(*std::min_element(x.begin(), x.end()));
    double lx1 = std::log10(*std::max_element(x.begin(), x.end()));
    double ly0 = std::log10(*std::min_element(y.begin(), y.end()));
    double ly1 = std::log10(*std::max_element(y.begin(), y.end()));
    double padx = std::max(0.05 * (lx1 - lx0), 0.05);
    double pady = std::max(0.05 * (ly1 - ly0), 0.05);
    lx0 -= padx; lx1 += padx; ly0 -= pady; ly1 += pady;
    auto X = [&](double v) { return ml + (std::log10(v) - lx0) / (lx1 - lx0) * (W - ml - mr); };
    auto Y = [&](double v) { return H - mb - (std::log10(v) - ly0) / (ly1 - ly0) * (H - mt - mb); };

    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (W - ml - mr)
        << "\" height=\"" << (H - mt - mb)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"" << (mt - 12) << "\" font-size=\"14\">" << title
        << " (slope " << std::setprecision(4) << slope << ")</text>\n"
        << std::setprecision(17);
    // fitted line across the x-range (log-space line)
    double xa = std::pow(10.0, lx0 + padx), xb = std::pow(10.0, lx1 - padx);
    double ya = std::exp(intercept + slope * std::log(xa));
    double yb = std::exp(intercept + slope * std::log(xb));
    out << "<line x1=\"" << X(xa) << "\" y1=\"" << Y(ya) << "\" x2=\"" << X(xb) << "\" y2=\""
        << Y(yb) << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << "<circle cx=\"" << X(x[i]) << "\" cy=\"" << Y(y[i])
            << "\" r=\"4\" fill=\"#1f6fb2\"/>\n";
    out << "<text x=\"" << (W / 2 - 30) << "\" y=\"" << (H - 14)
        << "\" font-size=\"12\">deficit (log)</text>\n";
    out << "<text x=\"10\" y=\"" << (H / 2) << "\" font-size=\"12\" transform=\"rotate(-90 14 "
        << (H / 2) << ")\">rho_e - rho_i (log)</text>\n";
    out << "</svg>\n";
    return out.str();
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw error("cannot write " + path);
    f << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace symlab::io

// symlab: batch front door for the torsion-problem symmetry laboratory.
//
//   symlab <command> --config <path> [--out <dir>] [--quiet]
//
// Commands: solve | identities | report | sweep | analytic. All science lives
// in the JSON config; results land in results.json / summary.csv (+ plots).
// Exit codes: 0 ok, 1 check failure beyond tolerance, 2 invalid config,
// 3 numerical failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "symlab/io.hpp"

namespace fs = std::filesystem;
using symlab::io::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// line:column of a byte offset, for parse diagnostics.
std::pair<int, int> line_of(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') { ++line; col = 1; }
        else ++col;
    }
    return {line, col};
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw symlab::config_error(where + ": unknown key '" + it.key() + "'");
    }
}

double require_positive(const json& j, const std::string& key, double fallback,
                        bool required = false) {
    if (!j.contains(key)) {
        if (required) throw symlab::config_error("missing required key '" + key + "'");
        return fallback;
    }
    double v = j.at(key).get<double>();
    if (!(v > 0.0)) throw symlab::config_error("'" + key + "' must be positive");
    return v;
}

int get_degree(const json& j) {
    int degree = j.value("degree", 2);
    if (degree != 1 && degree != 2) throw symlab::config_error("'degree' must be 1 or 2");
    return degree;
}

struct RunPaths {
    fs::path out;
    fs::path cache;
};

RunPaths prepare_paths(const json& cfg, const std::string& out_override) {
    RunPaths p;
    std::string dir = out_override.empty() ? cfg.value("out_dir", std::string("symlab_out"))
                                           : out_override;
    p.out = dir;
    p.cache = p.out / "cache";
    fs::create_directories(p.cache);
    return p;
}

// Cache of expensive payloads keyed by the scientific inputs.
json cached_compute(const RunPaths& paths, const std::string& key,
                    const std::function<json()>& compute) {
    fs::path file = paths.cache / (key + ".json");
    if (fs::exists(file)) return json::parse(symlab::io::read_text(file.string()));
    json payload = compute();
    symlab::io::write_text(file.string(), payload.dump(2) + "\n");
    return payload;
}

std::string solve_key(const symlab::BoundaryCurve& curve, double h_max, int degree,
                      const std::string& command) {
    json j{{"curve", symlab::io::curve_to_json(curve)},
           {"h_max", h_max},
           {"degree", degree},
           {"command", command},
           {"schema", "1"}};
    return command + "_" + hex64(fnv1a64(j.dump()));
}

// ---------------------------------------------------------------------------

int run_solve(const json& cfg, const RunPaths& paths, json& results, std::string& csv) {
    reject_unknown_keys(cfg, {"command", "curve", "h_max", "degree", "out_dir", "seed",
                              "tolerances"}, "config");
    auto curve = symlab::io::curve_from_json(cfg.at("curve"));
    double h_max = require_positive(cfg, "h_max", 0.0, true);
    int degree = get_degree(cfg);

    json payload = cached_compute(paths, solve_key(curve, h_max, degree, "solve"), [&] {
        auto mesh = std::make_shared<symlab::Mesh>(symlab::triangulate(curve, h_max));
        symlab::ScalarField u = symlab::solve_torsion(mesh, degree);
        auto tau = symlab::torsional_rigidity(u);
        symlab::Vec2 z = symlab::critical_point(u);
        double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
        for (int i : u.space->boundary_node_ids) {
            fmin = std::min(fmin, u.boundary_flux[i]);
            fmax = std::max(fmax, u.boundary_flux[i]);
        }
        return json{{"geometry", symlab::io::geometry_to_json(symlab::geometry_summary(curve))},
                    {"n_vertices", mesh->n_vertices()},
                    {"n_triangles", mesh->n_triangles()},
                    {"min_u", u.min_value()},
                    {"critical_point", {z.x, z.y}},
                    {"torsional_rigidity", tau.from_integral},
                    {"torsional_rigidity_energy", tau.from_energy},
                    {"rigidity_gap", tau.relative_gap},
                    {"min_flux", fmin},
                    {"max_flux", fmax},
                    {"field", symlab::io::field_to_json(u)},
                    {"vertex_csv", symlab::io::field_to_csv(u)}};
    });
    csv = payload.at("vertex_csv").get<std::string>();
    payload.erase("vertex_csv");
    results["solve"] = payload;
    return 0;
}

int run_identities(const json& cfg, const RunPaths& paths, json& results, std::string& csv) {
    reject_unknown_keys(cfg, {"command", "curve", "h_max", "degree", "out_dir", "seed",
                              "tolerances"}, "config");
    auto curve = symlab::io::curve_from_json(cfg.at("curve"));
    double h_max = require_positive(cfg, "h_max", 0.0, true);
    int degree = get_degree(cfg);
    double tol = 5e-3;
    if (cfg.contains("tolerances")) {
        reject_unknown_keys(cfg.at("tolerances"), {"identity_rel", "bound_slack"}, "tolerances");
        tol = cfg.at("tolerances").value("identity_rel", tol);
    }

    json payload = cached_compute(paths, solve_key(curve, h_max, degree, "identities"), [&] {
        symlab::DomainSolve d = symlab::solve_domain(curve, h_max, degree);
        auto suite = symlab::identity_suite(d);
        json jr = json::array();
        for (const auto& r : suite) jr.push_back(symlab::io::residual_to_json(r));
        return json{{"geometry", symlab::io::geometry_to_json(d.geo)},
                    {"z", {d.z.x, d.z.y}},
                    {"residuals", jr},
                    {"csv", symlab::io::residuals_to_csv(suite)}};
    });
    csv = payload.at("csv").get<std::string>();
    payload.erase("csv");
    results["identities"] = payload;

    int failures = 0;
    for (const auto& r : payload.at("residuals")) {
        if (!r.at("applicable").get<bool>()) continue;
        double rel = r.at("relative_residual").get<double>();
        double scaled = r.at("scaled_residual").get<double>();
        if (std::min(rel, scaled) > tol) {
            ++failures;
            std::cerr << "identity '" << r.at("id").get<std::string>()
                      << "' residual beyond tolerance: rel=" << rel << " scaled=" << scaled
                      << " tol=" << tol << "\n";
        }
    }
    results["identities"]["failures"] = failures;
    return failures == 0 ? 0 : 1;
}

int run_report(const json& cfg, const RunPaths& paths, json& results, std::string& csv) {
    reject_unknown_keys(cfg, {"command", "curve", "h_max", "degree", "out_dir", "seed",
                              "tolerances"}, "config");
    auto curve = symlab::io::curve_from_json(cfg.at("curve"));
    double h_max = require_positive(cfg, "h_max", 0.0, true);
    int degree = get_degree(cfg);
    double slack = 0.02;
    if (cfg.contains("tolerances")) {
        reject_unknown_keys(cfg.at("tolerances"), {"identity_rel", "bound_slack"}, "tolerances");
        slack = cfg.at("tolerances").value("bound_slack", slack);
    }

    json payload = cached_compute(paths, solve_key(curve, h_max, degree, "report"), [&] {
        symlab::DeficitReport r = symlab::deficit_report(curve, h_max, degree);
        return symlab::io::report_to_json(r);
    });
    results["report"] = payload;

    // bound checks are cheap; recompute them from the payload numbers
    symlab::DeficitReport r;
    r.geometry.area = payload.at("geometry").at("area");
    r.geometry.perimeter = payload.at("geometry").at("perimeter");
    r.geometry.R = payload.at("geometry").at("R");
    r.geometry.H0 = payload.at("geometry").at("H0");
    r.geometry.diameter = payload.at("geometry").at("diameter");
    r.geometry.r_i = payload.at("geometry").at("r_i");
    r.geometry.r_e = payload.at("geometry").at("r_e");
    r.rho_i = payload.at("rho_i");
    r.rho_e = payload.at("rho_e");
    r.rho_gap = payload.at("rho_gap");
    r.asymmetry_value = payload.at("asymmetry");
    r.min_flux = payload.at("min_flux");
    r.max_flux = payload.at("max_flux");
    r.distance_sq_ratio = payload.at("distance_sq_ratio");
    r.distance_lin_ratio = payload.at("distance_lin_ratio");
    auto checks = symlab::explicit_bound_checks(r, slack);
    results["report"]["bound_checks"] = symlab::io::bound_checks_to_json(checks);

    std::ostringstream out;
    out << "quantity,value\n" << std::setprecision(17);
    out << "rho_gap," << r.rho_gap << "\n";
    out << "serrin_L2," << payload.at("serrin_L2").get<double>() << "\n";
    out << "serrin_L1," << payload.at("serrin_L1").get<double>() << "\n";
    out << "sbt_L2," << payload.at("sbt_L2").get<double>() << "\n";
    out << "sbt_plus," << payload.at("sbt_plus").get<double>() << "\n";
    out << "hk_deficit," << payload.at("hk_deficit").get<double>() << "\n";
    out << "obvp_deficit," << payload.at("obvp_deficit").get<double>() << "\n";
    out << "asymmetry," << r.asymmetry_value << "\n";
    int failures = 0;
    for (const auto& c : checks) {
        out << "check_" << c.name << ',' << (c.pass ? "pass" : "fail") << "\n";
        if (!c.pass) {
            ++failures;
            std::cerr << "bound check '" << c.name << "' failed: lhs=" << c.lhs
                      << " rhs=" << c.rhs << "\n";
        }
    }
    csv = out.str();
    return failures == 0 ? 0 : 1;
}

int run_sweep(const json& cfg, const RunPaths& paths, json& results, std::string& csv) {
    reject_unknown_keys(cfg, {"command", "family", "epsilons", "mesh_rule", "degree", "out_dir",
                              "seed", "plots", "require", "tolerances"}, "config");
    const json& fam = cfg.at("family");
    reject_unknown_keys(fam, {"type", "mode", "base_radius"}, "family");
    if (fam.at("type").get<std::string>() != "cosine")
        throw symlab::config_error("family.type: only 'cosine' is supported");
    int mode = fam.at("mode").get<int>();
    if (mode < 1) throw symlab::config_error("family.mode must be >= 1");
    double base = fam.value("base_radius", 1.0);
    if (!(base > 0.0)) throw symlab::config_error("family.base_radius must be positive");

    auto epsilons = cfg.at("epsilons").get<std::vector<double>>();
    for (double e : epsilons)
        if (!(e > 0.0)) throw symlab::config_error("epsilons must be positive");
    symlab::MeshRule rule;
    if (cfg.contains("mesh_rule")) {
        const json& mr = cfg.at("mesh_rule");
        reject_unknown_keys(mr, {"c_mesh", "h_cap", "noise_floor", "fit_eps_cutoff"},
                            "mesh_rule");
        rule.c_mesh = require_positive(mr, "c_mesh", rule.c_mesh);
        rule.h_cap = require_positive(mr, "h_cap", rule.h_cap);
        rule.noise_floor = require_positive(mr, "noise_floor", rule.noise_floor);
        rule.fit_eps_cutoff = require_positive(mr, "fit_eps_cutoff", rule.fit_eps_cutoff);
    }
    int degree = get_degree(cfg);

    json key_extra{{"family", fam},
                   {"epsilons", epsilons},
                   {"rule", {rule.c_mesh, rule.h_cap, rule.noise_floor, rule.fit_eps_cutoff}},
                   {"degree", degree}};
    std::string key = "sweep_" + hex64(fnv1a64(key_extra.dump()));
    json payload = cached_compute(paths, key, [&] {
        symlab::SweepResult s =
            symlab::stability_sweep(symlab::cosine_family(mode, base), epsilons, rule, degree);
        return json{{"sweep", symlab::io::sweep_to_json(s)},
                    {"csv", symlab::io::sweep_to_csv(s)}};
    });
    csv = payload.at("csv").get<std::string>();
    results["sweep"] = payload.at("sweep");

    if (cfg.value("plots", true)) {
        fs::create_directories(paths.out / "plots");
        for (const auto& f : results["sweep"].at("fits")) {
            std::string id = f.at("deficit").get<std::string>();
            std::vector<double> xs, ys;
            for (const auto& p : results["sweep"].at("points")) {
                if (p.at("excluded").get<bool>()) continue;
                double v = p.at("report").at(id == "hk_deficit" ? "hk_deficit" : id)
                               .get<double>();
                if (v > rule.noise_floor) {
                    xs.push_back(v);
                    ys.push_back(p.at("report").at("rho_gap").get<double>());
                }
            }
            std::string svg = symlab::io::loglog_svg("rho_gap vs " + id, xs, ys,
                                                     f.at("slope").get<double>(),
                                                     f.at("intercept").get<double>());
            symlab::io::write_text((paths.out / "plots" / (id + ".svg")).string(), svg);
        }
    }

    int failures = 0;
    if (cfg.contains("require")) {
        const json& req = cfg.at("require");
        reject_unknown_keys(req, {"min_slope", "min_r2", "deficits"}, "require");
        double min_slope = req.value("min_slope", 0.9);
        double min_r2 = req.value("min_r2", 0.98);
        auto wanted = req.value("deficits", std::vector<std::string>{"serrin_L2", "sbt_L2"});
        for (const auto& f : results["sweep"].at("fits")) {
            std::string id = f.at("deficit").get<std::string>();
            if (std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
            if (f.at("slope").get<double>() < min_slope ||
                f.at("r_squared").get<double>() < min_r2) {
                ++failures;
                std::cerr << "sweep fit '" << id << "' below requirement: slope="
                          << f.at("slope").get<double>() << " R2="
                          << f.at("r_squared").get<double>() << "\n";
            }
        }
    }
    return failures == 0 ? 0 : 1;
}

int run_analytic(const json& cfg, const RunPaths&, json& results, std::string& csv) {
    reject_unknown_keys(cfg, {"command", "out_dir", "seed", "gradient_dims", "capacity_grid",
                              "capacity_rho", "cone_ms", "cone_points", "hardy_dims", "hardy_a",
                              "tolerances"}, "config");
    std::uint64_t seed = cfg.value("seed", std::uint64_t(20240817));
    auto gdims = cfg.value("gradient_dims", std::vector<int>{2, 3, 4, 5});
    auto cone_ms = cfg.value("cone_ms", std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
    int cone_points = cfg.value("cone_points", 1000);
    auto hardy_dims = cfg.value("hardy_dims", std::vector<int>{3, 5, 7, 8, 9, 10, 11});
    double hardy_a = cfg.value("hardy_a", 9.0 / 4.0 + 1.0);
    double cap_rho = cfg.value("capacity_rho", 1.3);

    int failures = 0;
    std::ostringstream out;
    out << "check,value,pass\n" << std::setprecision(17);

    json jg = json::array();
    for (int N : gdims) {
        auto g = symlab::analytic::gradient_bound_constant(N);
        jg.push_back(symlab::io::gradient_bound_to_json(g));
        bool ok = N == 2 ? true : g.matches;  // the planar 3/2 is conservative by design
        if (!ok) ++failures;
        out << "gradient_bound_N" << N << ',' << g.c_theorem << ',' << (ok ? "pass" : "fail")
            << "\n";
    }
    results["gradient_bound"] = jg;

    json jc = json::array();
    std::vector<std::pair<int, double>> grid;
    if (cfg.contains("capacity_grid")) {
        for (const auto& e : cfg.at("capacity_grid"))
            grid.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
    } else {
        for (int N : {3, 4, 5})
            for (double p : {1.5, 2.0, 2.5})
                if (p < N) grid.emplace_back(N, p);
    }
    for (auto [N, p] : grid) {
        auto c = symlab::analytic::p_capacity_ball(N, p, cap_rho);
        jc.push_back(symlab::io::capacity_to_json(c));
        double rel = std::abs(c.capacity_isoperimetric - c.capacity_ball) / c.capacity_ball;
        rel = std::max(rel, std::abs(c.capacity_flux - c.capacity_ball) / c.capacity_ball);
        bool ok = rel <= 1e-12 && c.ode_residual <= 1e-10;
        if (!ok) ++failures;
        out << "capacity_N" << N << "_p" << p << ',' << rel << ',' << (ok ? "pass" : "fail")
            << "\n";
    }
    results["p_capacity"] = jc;

    {
        auto c21 = symlab::analytic::p_capacity_ball(3, 2.0, 1.0);
        bool ok = std::abs(c21.capacity_ball - 4.0 * symlab::pi) <= 1e-12 * 4.0 * symlab::pi;
        if (!ok) ++failures;
        results["cap2_unit_ball_3d"] = c21.capacity_ball;
        out << "cap2_unit_ball_3d," << c21.capacity_ball << ',' << (ok ? "pass" : "fail") << "\n";
    }

    {
        json ja = json::array();
        bool ok = true;
        for (auto [r, R] : {std::pair{1.0, 2.0}, {0.5, 1.5}, {2.0, 2.5}})
            for (int N : {2, 3, 4, 5}) {
                auto w = symlab::analytic::annulus_torsion(N, r, R);
                double res = symlab::analytic::max_ode_residual(w);
                ja.push_back(json{{"N", N}, {"r", r}, {"R", R}, {"ode_residual", res}});
                ok = ok && res <= 1e-10 && std::abs(w.value(r)) <= 1e-12 &&
                     std::abs(w.value(R)) <= 1e-12;
            }
        if (!ok) ++failures;
        results["annulus"] = ja;
        out << "annulus_ode,checked," << (ok ? "pass" : "fail") << "\n";
    }

    json jm = json::array();
    for (int m : cone_ms) {
        auto c = symlab::analytic::cone_checks(m, cone_points, seed);
        jm.push_back(symlab::io::cone_to_json(c));
        bool ok = c.max_mean_curvature_on_cone <= 1e-8;
        if (m >= 4) ok = ok && c.sign_agreements == c.sign_samples;
        if (m == 2 || m == 3) ok = ok && c.violation_found;
        if (!ok) ++failures;
        out << "cone_m" << m << ',' << c.max_mean_curvature_on_cone << ','
            << (ok ? "pass" : "fail") << "\n";
    }
    results["cone_checks"] = jm;

    json jh = json::array();
    for (int n : hardy_dims) {
        auto h = symlab::analytic::hardy_and_windows(n, n == 5 ? hardy_a : 0.0);
        jh.push_back(symlab::io::hardy_to_json(h));
        bool ok = h.quotient_above_constant && h.extremal_max_residual <= 1e-6;
        ok = ok && (h.window_exists == (n >= 3 && n <= 7));
        ok = ok && (h.stability_flag == (n >= 10));
        if (n == 5 && hardy_a > h.best_constant) ok = ok && h.divergence_achieved;
        if (!ok) ++failures;
        out << "hardy_n" << n << ',' << h.min_profile_quotient << ',' << (ok ? "pass" : "fail")
            << "\n";
    }
    results["hardy"] = jh;
    results["seed"] = seed;

    csv = out.str();
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symlab: torsion-problem symmetry and stability laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    bool quiet = false;
    std::vector<std::string> names = {"solve", "identities", "report", "sweep", "analytic"};
    for (const auto& n : names) {
        auto* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "path to the JSON config")->required();
        sub->add_option("--out", out_override, "output directory (overrides config)");
        sub->add_flag("--quiet", quiet, "suppress progress output");
    }

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    auto t_start = std::chrono::steady_clock::now();
    json cfg;
    std::string raw;
    try {
        raw = symlab::io::read_text(config_path);
        cfg = json::parse(raw);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_of(raw, e.byte);
        std::cerr << "config parse error at " << config_path << ":" << line << ":" << col << ": "
                  << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    int status = 0;
    try {
        if (cfg.contains("command") && cfg.at("command").get<std::string>() != command)
            throw symlab::config_error("config 'command' disagrees with the subcommand");
        RunPaths paths = prepare_paths(cfg, out_override);
        json results{{"schema", "1"},
                     {"command", command},
                     {"config_hash", hex64(fnv1a64(raw))}};
        std::string csv;
        if (command == "solve") status = run_solve(cfg, paths, results, csv);
        else if (command == "identities") status = run_identities(cfg, paths, results, csv);
        else if (command == "report") status = run_report(cfg, paths, results, csv);
        else if (command == "sweep") status = run_sweep(cfg, paths, results, csv);
        else status = run_analytic(cfg, paths, results, csv);

        symlab::io::write_text((paths.out / "results.json").string(), results.dump(2) + "\n");
        if (!csv.empty()) symlab::io::write_text((paths.out / "summary.csv").string(), csv);
        double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              t_start).count();
        json manifest{{"config_hash", hex64(fnv1a64(raw))},
                      {"version", kVersion},
                      {"command", command},
                      {"wall_time_ms", ms}};
        symlab::io::write_text((paths.out / "manifest.json").string(), manifest.dump(2) + "\n");
        if (!quiet)
            std::cout << command << ": " << (status == 0 ? "ok" : "CHECK FAILURES") << " ("
                      << ms << " ms)\n";
    } catch (const symlab::config_error& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const symlab::precondition_error& e) {
        // preconditions on CLI inputs always trace back to config values
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const symlab::error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
    return status;
}

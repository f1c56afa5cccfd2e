#include <catch2/catch_amalgamated.hpp>

#include "symlab/io.hpp"

using namespace symlab;
using Catch::Approx;

TEST_CASE("curve JSON round trip", "[io]") {
    BoundaryCurve c(1.2, {0.05, 0.1}, {0.0, -0.02}, {0.3, -0.4});
    auto j = io::curve_to_json(c);
    BoundaryCurve back = io::curve_from_json(j);
    CHECK(back.a0 == c.a0);
    CHECK(back.cos_coeffs == c.cos_coeffs);
    CHECK(back.sin_coeffs == c.sin_coeffs);
    CHECK(back.center.x == c.center.x);
    for (double theta : {0.0, 1.0, 4.0})
        CHECK((back.point(theta) - c.point(theta)).norm() == 0.0);

    CHECK_THROWS_AS(io::curve_from_json(io::json{{"a0", 1.0}, {"radius", 2.0}}), config_error);
}

TEST_CASE("mesh JSON round trip preserves geometry and topology", "[io]") {
    BoundaryCurve c(1.0, {0.0, 0.1}, {});
    Mesh m = triangulate(c, 0.1);
    auto j = io::mesh_to_json(m);
    Mesh back = io::mesh_from_json(j);
    REQUIRE(back.n_vertices() == m.n_vertices());
    REQUIRE(back.n_triangles() == m.n_triangles());
    CHECK(back.total_area() == Approx(m.total_area()).epsilon(1e-15));
    CHECK(back.boundary_edges.size() == m.boundary_edges.size());
    validate_mesh(back);
}

TEST_CASE("field CSV has one row per vertex", "[io]") {
    auto mesh = std::make_shared<Mesh>(triangulate(BoundaryCurve::circle(1.0), 0.15));
    ScalarField u = solve_torsion(mesh, 2);
    std::string csv = io::field_to_csv(u);
    int rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == mesh->n_vertices() + 1);
}

TEST_CASE("identity residual serialization keeps the verdict columns", "[io]") {
    IdentityResidual r;
    r.id = "volume";
    r.lhs = 6.28;
    r.rhs = 6.28;
    r.applicable = true;
    auto j = io::residual_to_json(r);
    CHECK(j.at("id") == "volume");
    CHECK(j.at("applicable") == true);
    std::string csv = io::residuals_to_csv({r});
    CHECK(csv.find("volume,") != std::string::npos);
    CHECK(csv.rfind("id,lhs,rhs,residual,applicable", 0) == 0);
}

TEST_CASE("loglog SVG embeds its data table", "[io]") {
    std::string svg = io::loglog_svg("demo", {0.01, 0.02, 0.04}, {0.02, 0.04, 0.08}, 1.0, 0.69);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<!-- data:") != std::string::npos);
    CHECK(svg.find("0.01") != std::string::npos);
    CHECK(svg.find("circle") != std::string::npos);
}

TEST_CASE("imported meshes drive a solve", "[io]") {
    BoundaryCurve c(1.0, {0.0, 0.08}, {});
    Mesh m = triangulate(c, 0.1);
    Mesh back = io::mesh_from_json(io::mesh_to_json(m));
    ScalarField u = solve_torsion(back, 2);
    CHECK(u.min_value() < 0.0);
    double total = 0.0;
    fem::for_each_boundary_point(*u.space, [&](const fem::BoundaryPoint& bp) {
        total += fem::trace_value(*u.space, bp.edge, bp.theta, u.boundary_flux) * bp.w;
    });
    CHECK(total == Approx(2.0 * geometry_summary(c).area).epsilon(1e-3));
}

#include <catch2/catch_amalgamated.hpp>

#include "symlab/mesh.hpp"
#include "symlab/torsion.hpp"

using namespace symlab;
using Catch::Approx;

TEST_CASE("disk mesh area and invariants", "[mesh]") {
    auto circle = BoundaryCurve::circle(1.0);
    Mesh m = triangulate(circle, 0.2);
    validate_mesh(m);
    double area = m.total_area();
    CHECK(area <= pi + 1e-12);
    CHECK(area >= pi - 0.05);
    CHECK(int(m.boundary_edges.size()) >= int(std::floor(2.0 * pi / 0.2)));
    CHECK(m.min_angle_deg() >= 20.0);
}

TEST_CASE("mesh area converges at second order", "[mesh]") {
    auto circle = BoundaryCurve::circle(1.0);
    double err_prev = 0.0;
    bool first = true;
    double rate_product = 1.0;
    Mesh m = triangulate(circle, 0.2);
    for (int level = 0; level < 3; ++level) {
        double err = std::abs(m.total_area() - pi);
        if (!first) rate_product *= err_prev / err;
        err_prev = err;
        first = false;
        if (level < 2) m = refine(m);
    }
    // two halvings: order >= 1.9 means total reduction >= 2^(2*1.9)
    CHECK(rate_product >= std::pow(2.0, 2 * 1.9));
}

TEST_CASE("flower mesh topology", "[mesh]") {
    BoundaryCurve flower(1.0, {0.0, 0.0, 0.1}, {});
    Mesh m = triangulate(flower, 0.05);
    validate_mesh(m); // includes the Euler formula and single-loop checks
    CHECK(m.min_angle_deg() >= 20.0);
}

TEST_CASE("refinement multiplies triangles by four and doubles the boundary", "[mesh]") {
    auto circle = BoundaryCurve::circle(1.0);
    Mesh m = triangulate(circle, 0.2);
    Mesh r = refine(m);
    CHECK(r.n_triangles() == 4 * m.n_triangles());
    CHECK(r.boundary_edges.size() == 2 * m.boundary_edges.size());
    validate_mesh(r);
    Mesh rr = refine(r);
    validate_mesh(rr);
}

TEST_CASE("nonconvex star meshes cleanly", "[mesh]") {
    BoundaryCurve star(1.0, {0.0, 0.0, 0.0, 0.0, 0.3}, {});
    Mesh m = triangulate(star, 0.08);
    validate_mesh(m);
    auto g = geometry_summary(star);
    CHECK(std::abs(m.total_area() - g.area) < 0.02 * g.area);
}

TEST_CASE("boundary length converges to the perimeter", "[mesh]") {
    BoundaryCurve c(1.0, {0.05, 0.1}, {});
    auto g = geometry_summary(c);
    Mesh m = triangulate(c, 0.1);
    auto poly_len = [&](const Mesh& mm) {
        double L = 0.0;
        for (const auto& e : mm.boundary_edges)
            L += (mm.vertices[e.b] - mm.vertices[e.a]).norm();
        return L;
    };
    double e0 = std::abs(poly_len(m) - g.perimeter);
    Mesh r = refine(m);
    double e1 = std::abs(poly_len(r) - g.perimeter);
    Mesh rr = refine(r);
    double e2 = std::abs(poly_len(rr) - g.perimeter);
    CHECK(e1 < e0 / 3.0);
    CHECK(e2 < e1 / 3.0);
}

TEST_CASE("meshing preconditions", "[mesh]") {
    auto circle = BoundaryCurve::circle(1.0);
    CHECK_THROWS_AS(triangulate(circle, 0.3), precondition_error); // h_max > a0/4
    CHECK_THROWS_AS(triangulate(circle, -0.1), precondition_error);
}

TEST_CASE("triangulation is deterministic", "[mesh]") {
    BoundaryCurve c(1.0, {0.0, 0.1}, {});
    Mesh a = triangulate(c, 0.1);
    Mesh b = triangulate(c, 0.1);
    REQUIRE(a.n_vertices() == b.n_vertices());
    REQUIRE(a.n_triangles() == b.n_triangles());
    for (int i = 0; i < a.n_vertices(); ++i) {
        CHECK(a.vertices[i].x == b.vertices[i].x);
        CHECK(a.vertices[i].y == b.vertices[i].y);
    }
    CHECK(a.triangles == b.triangles);
}

TEST_CASE("meshing matrix: varied curves and resolutions stay valid", "[mesh]") {
    std::vector<BoundaryCurve> curves = {
        BoundaryCurve::circle(0.5),
        BoundaryCurve(1.0, {0.2}, {}),
        BoundaryCurve(1.0, {0.05, 0.1}, {0.0, -0.08, 0.03}),
        BoundaryCurve(1.0, {0.0, 0.0, 0.0, 0.0, 0.3}, {}),
        BoundaryCurve(2.0, {0.0, 0.3}, {0.1}, {1.0, 1.0}),
        BoundaryCurve(1.0, {}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.12}),
    };
    for (const auto& curve : curves) {
        for (double hfrac : {0.25, 0.08}) {
            Mesh m = triangulate(curve, hfrac * curve.a0);
            validate_mesh(m);
            Mesh r = refine(m);
            validate_mesh(r); // the refinement repair must hold the angle bound
        }
    }
}

TEST_CASE("degenerate elements are rejected at assembly", "[mesh]") {
    Mesh m = triangulate(BoundaryCurve::circle(1.0), 0.2);
    // flip one interior triangle into degeneracy
    for (int t = 0; t < m.n_triangles(); ++t) {
        auto& tri = m.triangles[t];
        if (!m.on_boundary[tri[0]] && !m.on_boundary[tri[1]] && !m.on_boundary[tri[2]]) {
            m.vertices[tri[0]] = m.vertices[tri[1]]; // zero-area element
            break;
        }
    }
    CHECK_THROWS_AS(solve_torsion(m, 1), meshing_error);
}

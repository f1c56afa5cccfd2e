#include <catch2/catch_amalgamated.hpp>

#include "symlab/geometry.hpp"

using namespace symlab;
using Catch::Approx;

namespace {

BoundaryCurve ellipse_like() {
    return BoundaryCurve(1.0, {0.0, 0.2}, {});  // r = 1 + 0.2 cos 2theta
}

// Area of the intersection of two unit-radius disks with centers distance t apart.
double lens_area(double t) {
    if (t >= 2.0) return 0.0;
    return 2.0 * std::acos(t / 2.0) - (t / 2.0) * std::sqrt(4.0 - t * t);
}

} // namespace

TEST_CASE("boundary evaluation on circles", "[geometry]") {
    auto circle = BoundaryCurve::circle(1.0);
    auto f = eval_boundary(circle, 0.0);
    CHECK(f.point.x == Approx(1.0));
    CHECK(f.point.y == Approx(0.0).margin(1e-15));
    CHECK(f.normal.x == Approx(1.0));
    CHECK(f.normal.y == Approx(0.0).margin(1e-15));
    CHECK(f.curvature == Approx(1.0));
    CHECK(std::abs(f.normal.dot(f.tangent)) < 1e-14);

    auto big = BoundaryCurve::circle(2.0);
    for (double theta : {0.0, 0.7, 2.5, 5.0})
        CHECK(big.curvature(theta) == Approx(0.5));
}

TEST_CASE("2pi periodicity and frame orthonormality", "[geometry]") {
    BoundaryCurve c(1.0, {0.05, 0.2, 0.0, 0.01}, {0.0, -0.03, 0.1});
    for (double theta : {0.0, 0.3, 1.2, 4.0}) {
        Vec2 p1 = c.point(theta), p2 = c.point(theta + 2.0 * pi);
        CHECK((p1 - p2).norm() < 1e-13);
        auto fr = eval_boundary(c, theta);
        CHECK(fr.normal.norm() == Approx(1.0));
        CHECK(std::abs(fr.normal.dot(fr.tangent)) < 1e-13);
    }
}

TEST_CASE("curvature against a finite-difference oracle", "[geometry]") {
    auto c = ellipse_like();
    // kappa = |p' x p''| / |p'|^3 with second differences of the parametrization.
    for (double theta : {0.0, 0.4, 1.0, 2.2, 3.9}) {
        double h = 1e-5;
        Vec2 pm = c.point(theta - h), p0 = c.point(theta), pp = c.point(theta + h);
        Vec2 d1 = (pp - pm) / (2.0 * h);
        Vec2 d2 = (pp - p0 * 2.0 + pm) / (h * h);
        double kappa_fd = d1.cross(d2) / std::pow(d1.norm(), 3.0);
        CHECK(c.curvature(theta) == Approx(kappa_fd).margin(1e-6));
    }
}

TEST_CASE("invalid data is rejected", "[geometry]") {
    CHECK_THROWS_AS(BoundaryCurve(std::numeric_limits<double>::quiet_NaN(), {}, {}),
                    invalid_curve_error);
    CHECK_THROWS_AS(BoundaryCurve(1.0, {std::numeric_limits<double>::infinity()}, {}),
                    invalid_curve_error);
    // r = 1 + 1.5 cos(theta) dips below zero: star-shapedness violation.
    CHECK_THROWS_AS(BoundaryCurve(1.0, {1.5}, {}), star_shape_error);
}

TEST_CASE("geometry summary of circles", "[geometry]") {
    auto g = geometry_summary(BoundaryCurve::circle(1.0));
    CHECK(g.area == Approx(pi).epsilon(1e-12));
    CHECK(g.perimeter == Approx(2.0 * pi).epsilon(1e-12));
    CHECK(g.R == Approx(1.0));
    CHECK(g.H0 == Approx(1.0));
    CHECK(g.R * g.H0 == Approx(1.0).epsilon(1e-15));
    CHECK(g.diameter == Approx(2.0).epsilon(1e-10));
    CHECK(g.r_i == Approx(1.0).epsilon(1e-6));
    CHECK(g.r_e == Approx(1.0).epsilon(1e-6));

    auto g3 = geometry_summary(BoundaryCurve::circle(3.0));
    CHECK(g3.R == Approx(3.0));
}

TEST_CASE("Fourier area identity", "[geometry]") {
    // (1/2) closed-integral r^2 dtheta = pi (a0^2 + sum amplitudes^2 / 2)
    auto g = geometry_summary(ellipse_like());
    CHECK(g.area == Approx(pi * 1.02).epsilon(1e-12));

    // dense trapezoid cross-check at a different resolution
    auto g2 = geometry_summary(ellipse_like(), 4096);
    CHECK(g2.area == Approx(g.area).epsilon(1e-13));

    BoundaryCurve mix(1.3, {0.1}, {0.0, 0.05});
    auto gm = geometry_summary(mix);
    CHECK(gm.area == Approx(pi * (1.3 * 1.3 + 0.5 * (0.01 + 0.0025))).epsilon(1e-12));
}

TEST_CASE("isoperimetric inequality with equality only for circles", "[geometry]") {
    auto gc = geometry_summary(BoundaryCurve::circle(2.0));
    CHECK(gc.perimeter * gc.perimeter - 4.0 * pi * gc.area ==
          Approx(0.0).margin(1e-10 * gc.area));

    for (auto curve : {ellipse_like(), BoundaryCurve(1.0, {0.0, 0.0, 0.1}, {}),
                       BoundaryCurve(1.0, {}, {0.0, 0.0, 0.0, 0.3})}) {
        auto g = geometry_summary(curve);
        CHECK(g.perimeter * g.perimeter > 4.0 * pi * g.area + 1e-6);
    }
}

TEST_CASE("radii at interior points", "[geometry]") {
    auto circle = BoundaryCurve::circle(1.0);
    auto r0 = radii_at(circle, {0.0, 0.0});
    CHECK(r0.rho_i == Approx(1.0).epsilon(1e-10));
    CHECK(r0.rho_e == Approx(1.0).epsilon(1e-10));
    CHECK(r0.interior);

    auto r1 = radii_at(circle, {0.3, 0.0});
    CHECK(r1.rho_i == Approx(0.7).epsilon(1e-10));
    CHECK(r1.rho_e == Approx(1.3).epsilon(1e-10));
    CHECK(r1.delta_gamma == Approx(0.7).epsilon(1e-10));

    auto flower = BoundaryCurve(1.0, {0.0, 0.0, 0.1}, {});
    auto r2 = radii_at(flower, {0.0, 0.0});
    CHECK(r2.rho_i == Approx(0.9).epsilon(1e-9));
    CHECK(r2.rho_e == Approx(1.1).epsilon(1e-9));

    auto rext = radii_at(circle, {2.0, 0.0});
    CHECK_FALSE(rext.interior);
    CHECK(rext.rho_i == Approx(1.0).epsilon(1e-9));
    CHECK(rext.rho_e == Approx(3.0).epsilon(1e-9));
}

TEST_CASE("rho_e - rho_i vanishes only for circles", "[geometry]") {
    auto rc = radii_at(BoundaryCurve::circle(1.7), {0.0, 0.0});
    CHECK(rc.rho_e - rc.rho_i < 1e-10);
    auto rp = radii_at(ellipse_like(), {0.0, 0.0});
    CHECK(rp.rho_e - rp.rho_i == Approx(0.4).epsilon(1e-8));
}

TEST_CASE("circle-polygon clipping against the lens oracle", "[geometry]") {
    auto circle = BoundaryCurve::circle(1.0);
    for (double t : {0.0, 0.25, 0.8, 1.5, 2.5}) {
        double ratio = symmetric_difference_ratio(circle, 1.0, {t, 0.0}, 4096);
        double expected = (2.0 * pi - 2.0 * lens_area(t)) / pi;
        CHECK(ratio == Approx(expected).margin(2e-5));
    }
}

TEST_CASE("asymmetry of a disk is zero at the center", "[geometry]") {
    auto res = asymmetry(BoundaryCurve::circle(1.0), 1.0);
    CHECK(res.value < 5e-6);
    CHECK(res.best_center.norm() < 0.05);
    CHECK(res.converged);
}

TEST_CASE("asymmetry bound from the radii gap", "[geometry]") {
    BoundaryCurve c(1.0, {0.0, 0.1}, {});
    auto g = geometry_summary(c);
    auto rad = radii_at(c, {0.0, 0.0});
    auto a = asymmetry(c, g.R);
    CHECK(a.value > 1e-4);
    // |Omega Delta B_R^x|/|B_R^x| <= N rho_e^{N-1} (rho_e - rho_i) / R^N at any x
    double bound = 2.0 * rad.rho_e * (rad.rho_e - rad.rho_i) / (g.R * g.R);
    CHECK(a.value <= bound + 1e-8);
}

TEST_CASE("asymmetry is translation invariant", "[geometry]") {
    BoundaryCurve c(1.0, {0.0, 0.1}, {});
    auto g = geometry_summary(c);
    auto a0 = asymmetry(c, g.R);
    auto a1 = asymmetry(c.translated({2.0, -1.0}), g.R);
    CHECK(a1.value == Approx(a0.value).margin(1e-6));
}

TEST_CASE("scaling covariance of the geometry summary", "[geometry]") {
    BoundaryCurve c(1.0, {0.05, 0.1}, {0.0, 0.02});
    const double lam = 2.0;
    auto g1 = geometry_summary(c);
    auto g2 = geometry_summary(c.scaled(lam));
    CHECK(g2.area == Approx(lam * lam * g1.area).epsilon(1e-10));
    CHECK(g2.perimeter == Approx(lam * g1.perimeter).epsilon(1e-10));
    CHECK(g2.R == Approx(lam * g1.R).epsilon(1e-10));
    CHECK(g2.diameter == Approx(lam * g1.diameter).epsilon(1e-8));
    CHECK(g2.r_i == Approx(lam * g1.r_i).epsilon(1e-8));
    CHECK(g2.r_e == Approx(lam * g1.r_e).epsilon(1e-8));

    auto rad1 = radii_at(c, {0.01, 0.0});
    auto rad2 = radii_at(c.scaled(lam), {lam * 0.01, 0.0});
    CHECK(rad2.rho_i == Approx(lam * rad1.rho_i).epsilon(1e-10));
    CHECK(rad2.rho_e == Approx(lam * rad1.rho_e).epsilon(1e-10));

    auto a1 = asymmetry(c, g1.R);
    auto a2 = asymmetry(c.scaled(lam), g2.R);
    CHECK(a2.value == Approx(a1.value).margin(1e-6));
}

TEST_CASE("r_i is capped by the radius of curvature", "[geometry]") {
    auto c = ellipse_like();
    auto g = geometry_summary(c);
    double kmax = 0.0;
    for (int i = 0; i < 2048; ++i)
        kmax = std::max(kmax, c.curvature(2.0 * pi * i / 2048));
    CHECK(g.r_i <= 1.0 / kmax + 1e-9);
    CHECK(g.r_i > 0.0);
    CHECK(g.r_i <= g.R + 1e-9);
    CHECK(g.R <= g.diameter / 2.0 + 1e-9);
}

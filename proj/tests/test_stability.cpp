#include <catch2/catch_amalgamated.hpp>

#include "symlab/stability.hpp"

using namespace symlab;
using Catch::Approx;

namespace {

const DeficitReport& disk_report() {
    static DeficitReport r = deficit_report(BoundaryCurve::circle(1.0), 0.05);
    return r;
}

} // namespace

TEST_CASE("disk report: every deficit is tiny", "[stability]") {
    const auto& r = disk_report();
    CHECK(r.serrin_L2 <= 1e-3);
    CHECK(r.serrin_L1 <= 1e-3);
    CHECK(r.sbt_L2 <= 1e-12);
    CHECK(r.sbt_plus <= 1e-12);
    CHECK(r.hk_applicable);
    CHECK(std::abs(r.hk_deficit) <= 1e-3);
    CHECK(std::abs(r.obvp_deficit) <= 1e-3);
    CHECK(r.asymmetry_value <= 1e-3);
    CHECK(r.rho_gap <= 1e-3);
    CHECK(r.identity_residuals.size() == 10);
    CHECK(r.weighted_deficit <= 1e-6);
}

TEST_CASE("translated circle: identical report", "[stability]") {
    DeficitReport a = deficit_report(BoundaryCurve::circle(1.5), 0.1);
    DeficitReport b = deficit_report(BoundaryCurve::circle(1.5, {10.0, -4.0}), 0.1);
    CHECK(b.serrin_L2 == Approx(a.serrin_L2).margin(1e-10));
    CHECK(b.serrin_L1 == Approx(a.serrin_L1).margin(1e-10));
    CHECK(b.rho_gap == Approx(a.rho_gap).margin(1e-10));
    CHECK(b.hk_deficit == Approx(a.hk_deficit).margin(1e-10));
    CHECK((b.z - a.z - Vec2{10.0, -4.0}).norm() < 1e-9);
}

TEST_CASE("gentle oval: all deficits positive, rho_gap = 2 eps", "[stability]") {
    DeficitReport r = deficit_report(BoundaryCurve(1.0, {0.0, 0.05}, {}), 0.04);
    CHECK(r.serrin_L2 > 1e-4);
    CHECK(r.serrin_L1 > 1e-4);
    CHECK(r.sbt_L2 > 1e-3);
    CHECK(r.sbt_plus > 1e-4);
    CHECK(r.hk_applicable);
    CHECK(r.hk_deficit > 0.0);
    CHECK(r.asymmetry_value > 1e-5);
    CHECK(r.rho_gap == Approx(0.1).margin(5e-3));
}

TEST_CASE("Heintze-Karcher deficit equals the overdetermined form", "[stability]") {
    for (const auto& curve :
         {BoundaryCurve::circle(1.0), BoundaryCurve(1.0, {0.0, 0.1}, {}),
          BoundaryCurve(1.0, {0.0, 0.0, 0.05}, {})}) {
        DeficitReport r = deficit_report(curve, 0.05);
        REQUIRE(r.hk_applicable);
        CHECK(std::abs(r.hk_deficit - r.obvp_deficit) <= 1e-12);
        CHECK(r.hk_deficit >= -1e-3 * kDim * r.geometry.area);
    }
}

TEST_CASE("L1 deficit is bounded by the Cauchy-Schwarz product", "[stability]") {
    DeficitReport r = deficit_report(BoundaryCurve(1.0, {0.0, 0.08}, {0.02}), 0.05);
    CHECK(r.serrin_L1 <= std::sqrt(r.geometry.perimeter) * r.serrin_L2 * (1.0 + 1e-10));
}

TEST_CASE("explicit bounds hold on the six-curve corpus", "[stability]") {
    std::vector<BoundaryCurve> corpus = {
        BoundaryCurve::circle(1.0),
        BoundaryCurve(1.0, {0.0, 0.1}, {}),
        BoundaryCurve(1.0, {0.0, 0.0, 0.05}, {}),
        BoundaryCurve(1.0, {0.0, 0.0, 0.0, 0.0, 0.3}, {}),
        BoundaryCurve(1.0, {0.0, 0.0, 0.0, 0.15}, {}),
        BoundaryCurve(1.0, {0.0, 0.1}, {}, {0.5, -0.3}),
    };
    for (const auto& curve : corpus) {
        DeficitReport r = deficit_report(curve, 0.04);
        auto checks = explicit_bound_checks(r, 0.02);
        REQUIRE(checks.size() == 6);
        for (const auto& c : checks) {
            INFO("curve a0=" << curve.a0 << " modes=" << curve.max_mode() << " check=" << c.name
                             << " lhs=" << c.lhs << " rhs=" << c.rhs);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("stability sweep: Lipschitz exponents for the cos2 family", "[stability]") {
    auto family = cosine_family(2);
    MeshRule rule;
    rule.h_cap = 0.04;
    SweepResult s = stability_sweep(family, {0.02, 0.04, 0.06, 0.08}, rule);

    REQUIRE(s.points.size() == 4);
    CHECK(s.points[0].eps > s.points[3].eps); // strictly decreasing order
    for (const auto& p : s.points) CHECK_FALSE(p.excluded);

    // monotone vanishing along eps -> 0, and no deficit dips below -noise
    for (std::size_t i = 1; i < s.points.size(); ++i) {
        CHECK(s.points[i].report.rho_gap < s.points[i - 1].report.rho_gap);
        CHECK(s.points[i].report.serrin_L2 < s.points[i - 1].report.serrin_L2);
        CHECK(s.points[i].report.serrin_L1 < s.points[i - 1].report.serrin_L1);
        CHECK(s.points[i].report.sbt_L2 < s.points[i - 1].report.sbt_L2);
        CHECK(s.points[i].report.sbt_plus < s.points[i - 1].report.sbt_plus);
        CHECK(s.points[i].report.hk_deficit < s.points[i - 1].report.hk_deficit);
    }
    for (const auto& p : s.points) {
        CHECK(p.report.hk_deficit >= -1e-9);
        CHECK(p.report.asymmetry_value >= 0.0);
        CHECK(p.report.weighted_deficit >= -1e-12);
    }

    for (const auto& f : s.fits) {
        if (f.deficit_id == "serrin_L2" || f.deficit_id == "sbt_L2") {
            INFO(f.deficit_id << " slope=" << f.slope << " R2=" << f.r_squared);
            CHECK(f.slope >= 0.9);
            CHECK(f.r_squared >= 0.98);
        }
    }

    double rmin = *std::min_element(s.ratio_asym_sbt.begin(), s.ratio_asym_sbt.end());
    double rmax = *std::max_element(s.ratio_asym_sbt.begin(), s.ratio_asym_sbt.end());
    CHECK(rmax <= 2.0 * rmin);
}

TEST_CASE("scale covariance of the deficit report", "[stability]") {
    const double lam = 2.0;
    BoundaryCurve c(1.0, {0.0, 0.08}, {});
    DeficitReport r1 = deficit_report(c, 0.05);
    DeficitReport r2 = deficit_report(c.scaled(lam), 0.1);
    CHECK(r2.rho_gap == Approx(lam * r1.rho_gap).epsilon(1e-2));
    CHECK(r2.serrin_L2 == Approx(std::pow(lam, 1.5) * r1.serrin_L2).epsilon(1e-2));
    CHECK(r2.sbt_L2 == Approx(std::pow(lam, -0.5) * r1.sbt_L2).epsilon(1e-2));
    CHECK(r2.asymmetry_value == Approx(r1.asymmetry_value).margin(1e-2 * r1.asymmetry_value + 1e-6));
}

TEST_CASE("threefold family sweeps cleanly too", "[stability]") {
    MeshRule rule;
    rule.h_cap = 0.05;
    SweepResult s = stability_sweep(cosine_family(3), {0.03, 0.045, 0.06, 0.075}, rule);
    for (const auto& p : s.points) CHECK_FALSE(p.excluded);
    for (const auto& f : s.fits)
        if (f.deficit_id == "serrin_L2" || f.deficit_id == "sbt_L2") {
            INFO(f.deficit_id << " slope=" << f.slope << " R2=" << f.r_squared);
            CHECK(f.slope >= 0.85);
            CHECK(f.r_squared >= 0.97);
        }
}

#pragma once

#include <string>

#include "symlab/harmonic.hpp"

namespace symlab {

// One solved domain: everything the identity and stability checks consume.
struct DomainSolve {
    BoundaryCurve curve;
    double h_max = 0.0;
    int degree = 2;
    std::shared_ptr<const Mesh> mesh;
    GeometrySummary geo;
    ScalarField u;
    Vec2 z;
    HarmonicBundle bundle;
};

inline DomainSolve solve_domain(const BoundaryCurve& curve, double h_max, int degree = 2) {
    DomainSolve d;
    d.curve = curve;
    d.h_max = h_max;
    d.degree = degree;
    d.mesh = std::make_shared<Mesh>(triangulate(curve, h_max));
    d.geo = geometry_summary(curve);
    d.u = solve_torsion(d.mesh, degree);
    d.z = critical_point(d.u);
    d.bundle = build_harmonic(d.u, d.z, 0.0);
    return d;
}

inline DomainSolve refined(const DomainSolve& d) {
    DomainSolve r;
    r.curve = d.curve;
    r.h_max = d.h_max / 2.0;
    r.degree = d.degree;
    r.mesh = std::make_shared<Mesh>(refine(*d.mesh));
    r.geo = d.geo;
    r.u = solve_torsion(r.mesh, d.degree);
    r.z = critical_point(r.u);
    r.bundle = build_harmonic(r.u, r.z, 0.0);
    return r;
}

struct IdentityResidual {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double relative_residual = 0.0;  // |lhs-rhs| / max(|lhs|, |rhs|, eps)
    double scale = 0.0;              // sum of |term| magnitudes in the identity
    double scaled_residual = 0.0;    // |lhs-rhs| / scale; meaningful on equality cases
    bool applicable = true;
    std::string reason;
};

namespace detail {

struct BoundarySample {
    double theta = 0, w = 0;
    double u_nu = 0, h_nu = 0;
    double H = 0, q_nu = 0;   // curve-exact curvature and (x-z).nu
    double q_t = 0;           // tangential derivative of q along the curve
    double q_val = 0;         // q(x) on Gamma
    Vec2 x, nu;
};

inline std::vector<BoundarySample> boundary_samples(const DomainSolve& d) {
    std::vector<BoundarySample> out;
    const auto& space = *d.u.space;
    const BoundaryCurve& curve = d.mesh->curve;
    fem::for_each_boundary_point(space, [&](const fem::BoundaryPoint& bp) {
        BoundarySample s;
        s.theta = bp.theta;
        s.w = bp.w;
        s.x = bp.x;
        s.nu = curve.outward_normal(bp.theta);
        s.H = curve.curvature(bp.theta);
        Vec2 rel = s.x - d.z;
        s.q_nu = rel.dot(s.nu);
        s.q_t = rel.dot(curve.tangent(bp.theta));
        s.q_val = quadratic_q(s.x, d.z, d.bundle.a);
        s.u_nu = fem::trace_value(space, bp.edge, bp.theta, d.u.boundary_flux);
        s.h_nu = fem::trace_value(space, bp.edge, bp.theta, d.bundle.h.boundary_flux);
        out.push_back(s);
    });
    return out;
}

struct VolumeSample {
    double w = 0;
    double u = 0;            // FE torsion value
    double h = 0;            // FE harmonic value
    double defu = 0;         // |D2u|^2 - (tr D2u)^2/N from recovered Hessian
    double hess_h_sq = 0;    // |D2h|^2 from recovered Hessian
    Vec2 grad_u, grad_h;
    Vec2 x;
};

inline std::vector<VolumeSample> volume_samples(const DomainSolve& d) {
    std::vector<VolumeSample> out;
    fem::for_each_quad_point(*d.u.space, [&](const fem::QuadPoint& qp) {
        VolumeSample s;
        s.w = qp.w;
        s.x = qp.x;
        s.u = qp.value(d.u.dof_values);
        s.h = qp.value(d.bundle.h.dof_values);
        SymMat2 Hu = qp.vertex_interp(d.u.recovered_hessian);
        s.defu = Hu.frobenius_sq() - Hu.trace() * Hu.trace() / double(kDim);
        SymMat2 Hh = qp.vertex_interp(d.bundle.h.recovered_hessian);
        s.hess_h_sq = Hh.frobenius_sq();
        s.grad_u = qp.gradient(d.u.dof_values);
        s.grad_h = qp.gradient(d.bundle.h.dof_values);
        out.push_back(s);
    });
    return out;
}

// `floor_scale` is a domain-magnitude floor (1e-6 of N|Omega|): identities
// whose both sides degenerate to zero are judged against it rather than
// against their own vanishing terms.
inline IdentityResidual make_residual(std::string id, double lhs, double rhs, double scale,
                                      double floor_scale) {
    IdentityResidual r;
    r.id = std::move(id);
    r.lhs = lhs;
    r.rhs = rhs;
    r.scale = std::max(scale, floor_scale);
    double eps = 1e-14 * std::max(r.scale, 1e-30);
    r.relative_residual = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), eps});
    r.scaled_residual = std::abs(lhs - rhs) / std::max(r.scale, 1e-30);
    return r;
}

} // namespace detail

// Shared sample tables so a full suite reuses one pass over the mesh.
struct IdentityWorkspace {
    std::vector<detail::BoundarySample> bnd;
    std::vector<detail::VolumeSample> vol;

    explicit IdentityWorkspace(const DomainSolve& d)
        : bnd(detail::boundary_samples(d)), vol(detail::volume_samples(d)) {}
};

enum class TraceFunction { harmonic_h, linear };

// The two trace identities for a harmonic v:
//  eq 1:  surf v^2 u_nu = N int v^2 + 2 int (-u) |grad v|^2
//  eq 2:  surf |grad v|^2 u_nu = N int |grad v|^2 + 2 int (-u) |D2 v|^2
inline IdentityResidual trace_identity(const DomainSolve& d, const IdentityWorkspace& w,
                                       TraceFunction which, int equation) {
    const double N = double(kDim);
    double lhs = 0.0, voln = 0.0, weighted = 0.0;
    if (which == TraceFunction::harmonic_h) {
        for (const auto& s : w.bnd) {
            double v_gamma = s.q_val;
            double grad_sq_gamma = s.h_nu * s.h_nu + s.q_t * s.q_t;
            lhs += (equation == 1 ? v_gamma * v_gamma : grad_sq_gamma) * s.u_nu * s.w;
        }
        for (const auto& s : w.vol) {
            if (equation == 1) {
                voln += s.h * s.h * s.w;
                weighted += (-s.u) * s.grad_h.squared_norm() * s.w;
            } else {
                voln += s.grad_h.squared_norm() * s.w;
                weighted += (-s.u) * s.hess_h_sq * s.w;
            }
        }
    } else {
        // v = x1 - z1: grad v = (1,0), D2 v = 0.
        for (const auto& s : w.bnd) {
            double v_gamma = s.x.x - d.z.x;
            lhs += (equation == 1 ? v_gamma * v_gamma : 1.0) * s.u_nu * s.w;
        }
        for (const auto& s : w.vol) {
            if (equation == 1) {
                double v = s.x.x - d.z.x;
                voln += v * v * s.w;
                weighted += (-s.u) * s.w;
            } else {
                voln += s.w;
            }
        }
    }
    double rhs = N * voln + 2.0 * weighted;
    std::string id = equation == 1 ? "trace_v2" : "trace_gradv2";
    id += which == TraceFunction::harmonic_h ? "_h" : "_linear";
    return detail::make_residual(id, lhs, rhs,
                                 std::abs(lhs) + N * std::abs(voln) + 2.0 * std::abs(weighted),
                                 1e-6 * N * d.geo.area);
}

inline IdentityResidual check_identity(const std::string& id, const DomainSolve& d,
                                       const IdentityWorkspace& w) {
    const double N = double(kDim);
    const double R = d.geo.R, H0 = d.geo.H0;
    const double area = d.geo.area;
    const double floor_scale = 1e-6 * N * area;

    auto bsum = [&](auto&& f) {
        double s = 0.0;
        for (const auto& b : w.bnd) s += f(b) * b.w;
        return s;
    };
    auto vsum = [&](auto&& f) {
        double s = 0.0;
        for (const auto& v : w.vol) s += f(v) * v.w;
        return s;
    };

    if (id == "volume") {
        double lhs = bsum([](const auto& b) { return b.u_nu; });
        double rhs = N * area;
        return detail::make_residual(id, lhs, rhs, std::abs(lhs) + std::abs(rhs),
                                      floor_scale);
    }
    if (id == "minkowski") {
        double lhs = bsum([](const auto& b) { return b.H * b.q_nu; });
        double rhs = d.geo.perimeter;
        return detail::make_residual(id, lhs, rhs, std::abs(lhs) + std::abs(rhs),
                                      floor_scale);
    }
    if (id == "pohozaev") {
        double lhs = (N + 2.0) * vsum([](const auto& v) { return v.grad_u.squared_norm(); });
        double rhs = bsum([](const auto& b) { return b.u_nu * b.u_nu * b.q_nu; });
        return detail::make_residual(id, lhs, rhs, std::abs(lhs) + std::abs(rhs),
                                      floor_scale);
    }
    if (id == "serrin") {
        double lhs = vsum([](const auto& v) { return (-v.u) * v.defu; });
        double rhs = 0.5 * bsum([&](const auto& b) {
            return (b.u_nu * b.u_nu - R * R) * (b.u_nu - b.q_nu);
        });
        double scale = std::abs(lhs) +
                       0.5 * bsum([&](const auto& b) {
                           return std::abs((b.u_nu * b.u_nu - R * R)) * std::abs(b.u_nu - b.q_nu);
                       }) +
                       R * R * R * d.geo.perimeter;
        return detail::make_residual(id, lhs, rhs, scale, floor_scale);
    }
    if (id == "serrin_h") {
        double lhs = vsum([](const auto& v) { return (-v.u) * v.hess_h_sq; });
        double rhs = 0.5 * bsum([&](const auto& b) {
            return (R * R - b.u_nu * b.u_nu) * b.h_nu;
        });
        double scale = std::abs(lhs) + R * R * R * d.geo.perimeter;
        return detail::make_residual(id, lhs, rhs, scale, floor_scale);
    }
    if (id == "fundamental") {
        double lhs = vsum([](const auto& v) { return v.defu; }) / (N - 1.0);
        double rhs = N * area - bsum([](const auto& b) { return b.H * b.u_nu * b.u_nu; });
        return detail::make_residual(id, lhs, rhs,
                                      std::abs(lhs) + N * area + std::abs(N * area - rhs),
                                      floor_scale);
    }
    if (id == "sbt") {
        double defu = vsum([](const auto& v) { return v.defu; }) / (N - 1.0);
        double penalty = bsum([&](const auto& b) {
            return (b.u_nu - R) * (b.u_nu - R);
        }) / R;
        double lhs = defu + penalty;
        double rhs = bsum([&](const auto& b) { return (H0 - b.H) * b.u_nu * b.u_nu; });
        double scale = std::abs(defu) + std::abs(penalty) +
                       bsum([&](const auto& b) { return std::abs(H0 - b.H) * b.u_nu * b.u_nu; }) +
                       N * area * H0;
        return detail::make_residual(id, lhs, rhs, scale, floor_scale);
    }
    if (id == "sbt2") {
        double defu = vsum([](const auto& v) { return v.defu; }) / (N - 1.0);
        double penalty = bsum([&](const auto& b) {
            return (b.u_nu - R) * (b.u_nu - R);
        }) / R;
        double lhs = defu + penalty;
        double rhs = bsum([&](const auto& b) {
            return (H0 - b.H) * ((b.u_nu - b.q_nu) * b.u_nu + (b.u_nu - R) * b.q_nu);
        });
        double scale = std::abs(defu) + std::abs(penalty) + N * area * H0 +
                       bsum([&](const auto& b) {
                           return std::abs(H0 - b.H) *
                                  (std::abs(b.u_nu - b.q_nu) * b.u_nu +
                                   std::abs(b.u_nu - R) * std::abs(b.q_nu));
                       });
        return detail::make_residual(id, lhs, rhs, scale, floor_scale);
    }
    if (id == "heintze_karcher") {
        double hmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 4096; ++i)
            hmin = std::min(hmin, d.curve.curvature(2.0 * pi * i / 4096));
        if (hmin <= 0.0) {
            IdentityResidual r;
            r.id = id;
            r.applicable = false;
            r.reason = "H <= 0 somewhere on Gamma";
            return r;
        }
        double defu = vsum([](const auto& v) { return v.defu; }) / (N - 1.0);
        double pinch = bsum([&](const auto& b) {
            return (1.0 - b.H * b.u_nu) * (1.0 - b.H * b.u_nu) / b.H;
        });
        double lhs = defu + pinch;
        double rhs = bsum([](const auto& b) { return 1.0 / b.H; }) - N * area;
        double scale = std::abs(defu) + std::abs(pinch) +
                       bsum([](const auto& b) { return 1.0 / b.H; }) + N * area;
        return detail::make_residual(id, lhs, rhs, scale, floor_scale);
    }
    if (id == "trace_v") {
        // Worst over both harmonic-v choices and both equations.
        IdentityResidual worst;
        bool first = true;
        for (auto which : {TraceFunction::harmonic_h, TraceFunction::linear})
            for (int eq : {1, 2}) {
                IdentityResidual r = trace_identity(d, w, which, eq);
                if (first || r.relative_residual > worst.relative_residual) worst = r;
                first = false;
            }
        worst.id = id;
        return worst;
    }
    throw precondition_error("check_identity: unknown id '" + id + "'");
}

inline const std::vector<std::string>& identity_ids() {
    static const std::vector<std::string> ids = {
        "volume", "minkowski",       "pohozaev", "serrin",  "serrin_h",
        "fundamental", "sbt", "sbt2", "heintze_karcher", "trace_v"};
    return ids;
}

inline std::vector<IdentityResidual> identity_suite(const DomainSolve& d) {
    IdentityWorkspace w(d);
    std::vector<IdentityResidual> out;
    for (const auto& id : identity_ids()) out.push_back(check_identity(id, d, w));
    return out;
}

inline std::vector<IdentityResidual> identity_suite(const BoundaryCurve& curve, double h_max,
                                                    int degree = 2) {
    return identity_suite(solve_domain(curve, h_max, degree));
}

} // namespace symlab

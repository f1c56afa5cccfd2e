#pragma once

#include <memory>
#include <set>
#include <vector>

#include "symlab/fem.hpp"

namespace symlab {

// Space dimension for the curve-based solver; the PDE is laplace(u) = kDim in
// Omega with u = 0 on Gamma, so u < 0 inside and u_nu = R > 0 on a ball.
inline constexpr int kDim = 2;

struct ScalarField {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const fem::FeSpace> space;
    int degree = 2;

    std::vector<double> dof_values;                 // one per FE node
    std::vector<Vec2> recovered_gradient;           // per mesh vertex
    std::vector<SymMat2> recovered_hessian;         // per mesh vertex
    std::vector<double> boundary_flux;              // per FE node, 0 off the boundary

    double min_value() const {
        double m = dof_values.empty() ? 0.0 : dof_values[0];
        for (double v : dof_values) m = std::min(m, v);
        return m;
    }

    // Flux at boundary vertices in boundary-loop order.
    std::vector<double> boundary_vertex_flux() const {
        std::vector<double> out;
        for (const auto& e : mesh->boundary_edges) out.push_back(boundary_flux[e.a]);
        return out;
    }
};

namespace detail {

// Local least-squares quadratic recovery over vertex patches; the fitted
// polynomial supplies both the gradient and the Hessian at the vertex.
// Boundary vertices (and sparse patches) use a second ring.
inline void recover_derivatives(const fem::FeSpace& space, const std::vector<double>& dof,
                                std::vector<Vec2>& grad, std::vector<SymMat2>& hess) {
    const Mesh& mesh = space.mesh;
    const int nv = mesh.n_vertices();
    grad.assign(nv, Vec2{});
    hess.assign(nv, SymMat2{});

    std::vector<std::vector<int>> v_elems(nv);
    for (int t = 0; t < mesh.n_triangles(); ++t)
        for (int k = 0; k < 3; ++k) v_elems[mesh.triangles[t][k]].push_back(t);

    std::vector<int> patch_nodes;
    for (int v = 0; v < nv; ++v) {
        std::set<int> elems(v_elems[v].begin(), v_elems[v].end());
        bool enlarge = space.degree == 1 || mesh.on_boundary[v];
        if (!enlarge) {
            std::set<int> n1;
            for (int t : elems)
                for (int k = 0; k < space.n_local; ++k) n1.insert(space.elem_nodes[t][k]);
            enlarge = int(n1.size()) < 10;
        }
        if (enlarge) {
            std::set<int> grown = elems;
            for (int t : elems)
                for (int k = 0; k < 3; ++k)
                    for (int t2 : v_elems[mesh.triangles[t][k]]) grown.insert(t2);
            elems = std::move(grown);
        }
        std::set<int> nodes;
        for (int t : elems)
            for (int k = 0; k < space.n_local; ++k) nodes.insert(space.elem_nodes[t][k]);
        patch_nodes.assign(nodes.begin(), nodes.end());

        const Vec2 x0 = mesh.vertices[v];
        double rad = 0.0;
        for (int nid : patch_nodes) rad = std::max(rad, (space.nodes[nid] - x0).norm());
        if (rad == 0.0) rad = 1.0;

        const int m = int(patch_nodes.size());
        Eigen::MatrixXd A(m, 6);
        Eigen::VectorXd b(m);
        for (int r = 0; r < m; ++r) {
            Vec2 d = (space.nodes[patch_nodes[r]] - x0) / rad;
            A(r, 0) = 1.0;
            A(r, 1) = d.x;
            A(r, 2) = d.y;
            A(r, 3) = d.x * d.x;
            A(r, 4) = d.x * d.y;
            A(r, 5) = d.y * d.y;
            b(r) = dof[patch_nodes[r]];
        }
        Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
        grad[v] = Vec2{c(1), c(2)} / rad;
        hess[v] = SymMat2{2.0 * c(3), c(4), 2.0 * c(5)} * (1.0 / (rad * rad));
    }
}

// Consistent (variational) flux recovery: for every boundary basis function
// phi,  integral_Gamma u_nu phi dS = integral_Omega (grad u . grad phi + f phi) dx
// when laplace(u) = f. The boundary mass matrix uses the exact curve metric.
inline std::vector<double> variational_flux(const fem::FeSpace& space,
                                            const std::vector<double>& u, double rhs_density) {
    const int n = space.n_nodes();
    const auto& bids = space.boundary_node_ids;
    std::vector<int> bindex(n, -1);
    for (std::size_t i = 0; i < bids.size(); ++i) bindex[bids[i]] = int(i);
    const int nb = int(bids.size());

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb);
    fem::for_each_quad_point(space, [&](const fem::QuadPoint& qp) {
        const auto& en = space.elem_nodes[qp.elem];
        Vec2 gu = qp.gradient(u);
        for (int i = 0; i < space.n_local; ++i) {
            int bi = bindex[en[i]];
            if (bi < 0) continue;
            rhs[bi] += (gu.dot(qp.grad[i]) + rhs_density * qp.N[i]) * qp.w;
        }
    });

    std::vector<Eigen::Triplet<double>> trip;
    fem::for_each_boundary_point(space, [&](const fem::BoundaryPoint& bp) {
        const auto& te = space.trace_edges[bp.edge];
        for (int i = 0; i < te.n; ++i) {
            double si = fem::trace_shape(space, bp.edge, bp.theta, i);
            for (int j = 0; j < te.n; ++j) {
                double sj = fem::trace_shape(space, bp.edge, bp.theta, j);
                trip.emplace_back(bindex[te.node[i]], bindex[te.node[j]], si * sj * bp.w);
            }
        }
    });
    fem::SpMat M(nb, nb);
    M.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<fem::SpMat> ldlt(M);
    if (ldlt.info() != Eigen::Success)
        throw solver_error("variational flux: boundary mass factorization failed");
    Eigen::VectorXd g = ldlt.solve(rhs);

    std::vector<double> flux(n, 0.0);
    for (int i = 0; i < nb; ++i) flux[bids[i]] = g[i];
    return flux;
}

} // namespace detail

// Galerkin solution of laplace(u) = kDim in Omega, u = 0 on Gamma, with
// least-squares derivative recovery and consistent boundary flux.
inline ScalarField solve_torsion(std::shared_ptr<const Mesh> mesh, int degree = 2) {
    ScalarField f;
    f.mesh = std::move(mesh);
    f.space = std::make_shared<fem::FeSpace>(*f.mesh, degree);
    f.degree = degree;
    f.dof_values = fem::solve_dirichlet_poisson(*f.space, -double(kDim));
    detail::recover_derivatives(*f.space, f.dof_values, f.recovered_gradient,
                                f.recovered_hessian);
    f.boundary_flux = detail::variational_flux(*f.space, f.dof_values, double(kDim));
    return f;
}

inline ScalarField solve_torsion(const Mesh& mesh, int degree = 2) {
    return solve_torsion(std::make_shared<Mesh>(mesh), degree);
}

// Global minimizer of the torsion field: best dof node, then one Newton step
// on the recovered local quadratic.
inline Vec2 critical_point(const ScalarField& field) {
    const auto& space = *field.space;
    int best = 0;
    double bv = field.dof_values[0];
    for (int i = 1; i < space.n_nodes(); ++i) {
        double v = field.dof_values[i];
        Vec2 p = space.nodes[i], q = space.nodes[best];
        if (v < bv || (v == bv && (p.x < q.x || (p.x == q.x && p.y < q.y)))) {
            bv = v;
            best = i;
        }
    }
    if (space.node_on_boundary[best])
        throw solver_error("critical_point: minimizer on the boundary");

    // Nearest mesh vertex carries the recovered quadratic model.
    const Mesh& mesh = *field.mesh;
    int vbest = 0;
    double dbest = std::numeric_limits<double>::infinity();
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        double d = (mesh.vertices[v] - space.nodes[best]).squared_norm();
        if (d < dbest) { dbest = d; vbest = v; }
    }
    Vec2 z = mesh.vertices[vbest];
    const SymMat2& H = field.recovered_hessian[vbest];
    const Vec2& g = field.recovered_gradient[vbest];
    double det = H.xx * H.yy - H.xy * H.xy;
    if (det > 1e-14 && H.xx > 0.0) { // positive definite model
        Vec2 step{(H.yy * g.x - H.xy * g.y) / det, (H.xx * g.y - H.xy * g.x) / det};
        Vec2 cand = z - step;
        if (field.mesh->curve.contains(cand)) z = cand;
    }
    return z;
}

struct Rigidity {
    double from_integral = 0.0;  // -kDim * integral(u)
    double from_energy = 0.0;    // integral |grad u|^2 with the recovered gradient
    double relative_gap = 0.0;
};

inline Rigidity torsional_rigidity(const ScalarField& field) {
    Rigidity r;
    double int_u = 0.0, energy = 0.0;
    fem::for_each_quad_point(*field.space, [&](const fem::QuadPoint& qp) {
        int_u += qp.value(field.dof_values) * qp.w;
        Vec2 gr = qp.vertex_interp(field.recovered_gradient);
        energy += gr.squared_norm() * qp.w;
    });
    r.from_integral = -double(kDim) * int_u;
    r.from_energy = energy;
    r.relative_gap = std::abs(r.from_integral - r.from_energy) /
                     std::max({std::abs(r.from_integral), std::abs(r.from_energy), 1e-300});
    return r;
}

// Pointwise Newton (Cauchy-Schwarz) deficit |D2u|^2 - (tr D2u)^2 / kDim at the
// mesh vertices; algebraically nonnegative for kDim = 2.
inline std::vector<double> cauchy_schwarz_deficit(const ScalarField& field) {
    std::vector<double> out(field.recovered_hessian.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const SymMat2& h = field.recovered_hessian[i];
        out[i] = h.frobenius_sq() - h.trace() * h.trace() / double(kDim);
    }
    return out;
}

// integral over Omega of the Newton deficit of the recovered Hessian.
inline double newton_deficit_integral(const ScalarField& field) {
    double total = 0.0;
    fem::for_each_quad_point(*field.space, [&](const fem::QuadPoint& qp) {
        SymMat2 H = qp.vertex_interp(field.recovered_hessian);
        total += (H.frobenius_sq() - H.trace() * H.trace() / double(kDim)) * qp.w;
    });
    return total;
}

} // namespace symlab

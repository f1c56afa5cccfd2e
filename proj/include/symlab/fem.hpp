#pragma once

#include <array>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

#include "symlab/mesh.hpp"

namespace symlab::fem {

using SpMat = Eigen::SparseMatrix<double>;

// 7-point degree-5 rule on the reference triangle (barycentric, weights sum 1).
struct TriQuadPoint {
    double l1, l2, l3, w;
};

inline const std::array<TriQuadPoint, 7>& tri_quad_deg5() {
    static const double s15 = std::sqrt(15.0);
    static const std::array<TriQuadPoint, 7> pts = [&] {
        std::array<TriQuadPoint, 7> q{};
        q[0] = {1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40};
        double a = (6.0 - s15) / 21.0, wa = (155.0 - s15) / 1200.0;
        double b = (6.0 + s15) / 21.0, wb = (155.0 + s15) / 1200.0;
        q[1] = {1 - 2 * a, a, a, wa};
        q[2] = {a, 1 - 2 * a, a, wa};
        q[3] = {a, a, 1 - 2 * a, wa};
        q[4] = {1 - 2 * b, b, b, wb};
        q[5] = {b, 1 - 2 * b, b, wb};
        q[6] = {b, b, 1 - 2 * b, wb};
        return q;
    }();
    return pts;
}

struct GaussPoint {
    double x, w;
};

inline const std::array<GaussPoint, 5>& gauss5() {
    static const std::array<GaussPoint, 5> pts = {{
        {-0.9061798459386640, 0.2369268850561891},
        {-0.5384693101056831, 0.4786286704993665},
        {0.0, 0.5688888888888889},
        {0.5384693101056831, 0.4786286704993665},
        {0.9061798459386640, 0.2369268850561891},
    }};
    return pts;
}

// Shape functions on the reference triangle, barycentric (l1, l2, l3).
// Node order: 3 vertices, then midsides (01, 12, 20) for degree 2.
inline void shape_values(int degree, double l1, double l2, double l3, double* N) {
    if (degree == 1) {
        N[0] = l1; N[1] = l2; N[2] = l3;
    } else {
        N[0] = l1 * (2 * l1 - 1);
        N[1] = l2 * (2 * l2 - 1);
        N[2] = l3 * (2 * l3 - 1);
        N[3] = 4 * l1 * l2;
        N[4] = 4 * l2 * l3;
        N[5] = 4 * l3 * l1;
    }
}

// Reference gradients with respect to (xi, eta) where l1 = 1-xi-eta, l2 = xi, l3 = eta.
inline void shape_grads(int degree, double l1, double l2, double l3, Vec2* g) {
    if (degree == 1) {
        g[0] = {-1, -1}; g[1] = {1, 0}; g[2] = {0, 1};
    } else {
        g[0] = {-(4 * l1 - 1), -(4 * l1 - 1)};
        g[1] = {4 * l2 - 1, 0};
        g[2] = {0, 4 * l3 - 1};
        g[3] = {4 * (l1 - l2), -4 * l2};
        g[4] = {4 * l3, 4 * l2};
        g[5] = {-4 * l3, 4 * (l1 - l3)};
    }
}

// Lagrange finite element space over a Mesh. Degree-2 spaces are isoparametric:
// midside nodes of boundary edges sit on the curve, so boundary geometry is
// approximated quadratically.
class FeSpace {
public:
    const Mesh& mesh;
    int degree;
    int n_local;  // nodes per element

    std::vector<Vec2> nodes;
    std::vector<char> node_on_boundary;
    std::vector<double> node_theta;                 // valid for boundary nodes
    std::vector<std::array<int, 6>> elem_nodes;

    // Boundary trace: for each mesh boundary edge, nodes along it with their
    // (unwrapped, increasing) curve parameters.
    struct TraceEdge {
        std::array<int, 3> node{-1, -1, -1};
        std::array<double, 3> theta{0, 0, 0};
        int n = 0;
    };
    std::vector<TraceEdge> trace_edges;
    std::vector<int> boundary_node_ids;  // unique, ascending

    FeSpace(const Mesh& m, int degree_) : mesh(m), degree(degree_) {
        if (degree != 1 && degree != 2)
            throw precondition_error("FeSpace: degree must be 1 or 2");
        n_local = degree == 1 ? 3 : 6;

        nodes = mesh.vertices;
        node_on_boundary.assign(mesh.on_boundary.begin(), mesh.on_boundary.end());
        node_theta = mesh.vertex_theta;
        elem_nodes.resize(mesh.triangles.size());

        std::map<std::pair<int, int>, double> boundary_mid_theta;
        for (const auto& e : mesh.boundary_edges)
            boundary_mid_theta[{std::min(e.a, e.b), std::max(e.a, e.b)}] =
                0.5 * (e.theta_a + e.theta_b);

        if (degree == 2) {
            std::map<std::pair<int, int>, int> edge_node;
            for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
                const auto& tri = mesh.triangles[t];
                for (int k = 0; k < 3; ++k) elem_nodes[t][k] = tri[k];
                const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
                for (int k = 0; k < 3; ++k) {
                    int a = tri[pairs[k][0]], b = tri[pairs[k][1]];
                    auto key = std::make_pair(std::min(a, b), std::max(a, b));
                    auto it = edge_node.find(key);
                    int id;
                    if (it == edge_node.end()) {
                        id = int(nodes.size());
                        auto bt = boundary_mid_theta.find(key);
                        if (bt != boundary_mid_theta.end()) {
                            double theta = bt->second;
                            nodes.push_back(mesh.curve.point(theta));
                            node_on_boundary.push_back(1);
                            node_theta.push_back(theta);
                        } else {
                            nodes.push_back((mesh.vertices[a] + mesh.vertices[b]) / 2.0);
                            node_on_boundary.push_back(0);
                            node_theta.push_back(0.0);
                        }
                        edge_node.emplace(key, id);
                    } else {
                        id = it->second;
                    }
                    elem_nodes[t][3 + k] = id;
                }
            }
        } else {
            for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
                const auto& tri = mesh.triangles[t];
                elem_nodes[t] = {tri[0], tri[1], tri[2], -1, -1, -1};
            }
        }

        // Boundary trace edges in loop order.
        std::map<std::pair<int, int>, int> edge_node_lookup;
        if (degree == 2) {
            for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
                const auto& tri = mesh.triangles[t];
                const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
                for (int k = 0; k < 3; ++k) {
                    int a = tri[pairs[k][0]], b = tri[pairs[k][1]];
                    edge_node_lookup[{std::min(a, b), std::max(a, b)}] = elem_nodes[t][3 + k];
                }
            }
        }
        for (const auto& e : mesh.boundary_edges) {
            TraceEdge te;
            if (degree == 1) {
                te.n = 2;
                te.node = {e.a, e.b, -1};
                te.theta = {e.theta_a, e.theta_b, 0.0};
            } else {
                te.n = 3;
                int m = edge_node_lookup.at({std::min(e.a, e.b), std::max(e.a, e.b)});
                te.node = {e.a, m, e.b};
                te.theta = {e.theta_a, 0.5 * (e.theta_a + e.theta_b), e.theta_b};
            }
            trace_edges.push_back(te);
        }
        for (int i = 0; i < n_nodes(); ++i)
            if (node_on_boundary[i]) boundary_node_ids.push_back(i);
    }

    int n_nodes() const { return int(nodes.size()); }
    int n_elems() const { return int(elem_nodes.size()); }
};

// Everything a volume integrand needs at one quadrature point.
struct QuadPoint {
    int elem = 0;
    Vec2 x;
    double w = 0.0;                    // quadrature weight including |J| and 1/2
    std::array<double, 3> bary{};      // for interpolating vertex-based fields
    std::array<double, 6> N{};
    std::array<Vec2, 6> grad{};        // physical shape gradients
    const FeSpace* space = nullptr;

    double value(const std::vector<double>& dof) const {
        const auto& en = space->elem_nodes[elem];
        double v = 0.0;
        for (int i = 0; i < space->n_local; ++i) v += dof[en[i]] * N[i];
        return v;
    }
    Vec2 gradient(const std::vector<double>& dof) const {
        const auto& en = space->elem_nodes[elem];
        Vec2 g{0, 0};
        for (int i = 0; i < space->n_local; ++i) g += grad[i] * dof[en[i]];
        return g;
    }
    // P1 interpolation of a per-vertex quantity.
    template <typename T>
    T vertex_interp(const std::vector<T>& per_vertex) const {
        const auto& tri = space->mesh.triangles[elem];
        return per_vertex[tri[0]] * bary[0] + per_vertex[tri[1]] * bary[1] +
               per_vertex[tri[2]] * bary[2];
    }
};

template <typename F>
inline void for_each_quad_point(const FeSpace& space, F&& f) {
    const auto& rule = tri_quad_deg5();
    QuadPoint qp;
    qp.space = &space;
    for (int t = 0; t < space.n_elems(); ++t) {
        const auto& en = space.elem_nodes[t];
        qp.elem = t;
        for (const auto& q : rule) {
            double Nv[6];
            Vec2 Gr[6];
            shape_values(space.degree, q.l1, q.l2, q.l3, Nv);
            shape_grads(space.degree, q.l1, q.l2, q.l3, Gr);
            // isoparametric geometry
            Vec2 x{0, 0};
            double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
            for (int i = 0; i < space.n_local; ++i) {
                const Vec2& p = space.nodes[en[i]];
                x += p * Nv[i];
                j11 += p.x * Gr[i].x; j12 += p.x * Gr[i].y;
                j21 += p.y * Gr[i].x; j22 += p.y * Gr[i].y;
            }
            double det = j11 * j22 - j12 * j21;
            if (!(det > 0.0))
                throw meshing_error("fem: degenerate element Jacobian during assembly");
            double inv11 = j22 / det, inv12 = -j12 / det;
            double inv21 = -j21 / det, inv22 = j11 / det;
            for (int i = 0; i < space.n_local; ++i) {
                // physical gradient = J^{-T} * reference gradient
                qp.grad[i] = {inv11 * Gr[i].x + inv21 * Gr[i].y,
                              inv12 * Gr[i].x + inv22 * Gr[i].y};
                qp.N[i] = Nv[i];
            }
            qp.x = x;
            qp.w = 0.5 * q.w * det;
            qp.bary = {q.l1, q.l2, q.l3};
            f(qp);
        }
    }
}

// Boundary quadrature point on the exact curve.
struct BoundaryPoint {
    int edge = 0;      // index into space.trace_edges / mesh.boundary_edges
    double theta = 0;  // curve parameter
    double w = 0;      // Gauss weight x |p'(theta)|
    Vec2 x;            // curve point
};

template <typename F>
inline void for_each_boundary_point(const FeSpace& space, F&& f) {
    const auto& g5 = gauss5();
    for (std::size_t e = 0; e < space.trace_edges.size(); ++e) {
        const auto& te = space.trace_edges[e];
        double ta = te.theta[0], tb = te.theta[te.n - 1];
        double mid = 0.5 * (ta + tb), half = 0.5 * (tb - ta);
        for (const auto& g : g5) {
            BoundaryPoint bp;
            bp.edge = int(e);
            bp.theta = mid + half * g.x;
            bp.w = g.w * half * space.mesh.curve.speed(bp.theta);
            bp.x = space.mesh.curve.point(bp.theta);
            f(bp);
        }
    }
}

// Lagrange interpolation in theta of a nodal field restricted to a trace edge.
inline double trace_value(const FeSpace& space, int edge, double theta,
                          const std::vector<double>& nodal) {
    const auto& te = space.trace_edges[edge];
    if (te.n == 2) {
        double t = (theta - te.theta[0]) / (te.theta[1] - te.theta[0]);
        return nodal[te.node[0]] * (1 - t) + nodal[te.node[1]] * t;
    }
    double t0 = te.theta[0], t1 = te.theta[1], t2 = te.theta[2];
    double l0 = (theta - t1) * (theta - t2) / ((t0 - t1) * (t0 - t2));
    double l1 = (theta - t0) * (theta - t2) / ((t1 - t0) * (t1 - t2));
    double l2 = (theta - t0) * (theta - t1) / ((t2 - t0) * (t2 - t1));
    return nodal[te.node[0]] * l0 + nodal[te.node[1]] * l1 + nodal[te.node[2]] * l2;
}

// Same but for a dense map over boundary node ids only.
inline double trace_shape(const FeSpace& space, int edge, double theta, int which) {
    const auto& te = space.trace_edges[edge];
    if (te.n == 2) {
        double t = (theta - te.theta[0]) / (te.theta[1] - te.theta[0]);
        return which == 0 ? 1 - t : t;
    }
    double t0 = te.theta[0], t1 = te.theta[1], t2 = te.theta[2];
    if (which == 0) return (theta - t1) * (theta - t2) / ((t0 - t1) * (t0 - t2));
    if (which == 1) return (theta - t0) * (theta - t2) / ((t1 - t0) * (t1 - t2));
    return (theta - t0) * (theta - t1) / ((t2 - t0) * (t2 - t1));
}

// Assemble the Dirichlet (zero boundary values) stiffness problem
//   integral grad(u).grad(v) = integral rhs_density * v
// and solve it with Jacobi-preconditioned conjugate gradients.
inline std::vector<double> solve_dirichlet_poisson(const FeSpace& space, double rhs_density,
                                                   double tol = 1e-12) {
    const int n = space.n_nodes();
    std::vector<int> free_id(n, -1);
    int n_free = 0;
    for (int i = 0; i < n; ++i)
        if (!space.node_on_boundary[i]) free_id[i] = n_free++;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(space.n_elems()) * space.n_local * space.n_local);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);

    const int nl = space.n_local;
    std::vector<double> Ke(std::size_t(nl) * nl);
    std::vector<double> Fe(nl);
    int current = -1;
    for_each_quad_point(space, [&](const QuadPoint& qp) {
        if (qp.elem != current) {
            if (current >= 0) {
                const auto& en = space.elem_nodes[current];
                for (int i = 0; i < nl; ++i) {
                    int gi = free_id[en[i]];
                    if (gi < 0) continue;
                    rhs[gi] += Fe[i];
                    for (int j = 0; j < nl; ++j) {
                        int gj = free_id[en[j]];
                        if (gj >= 0) trip.emplace_back(gi, gj, Ke[i * nl + j]);
                    }
                }
            }
            current = qp.elem;
            std::fill(Ke.begin(), Ke.end(), 0.0);
            std::fill(Fe.begin(), Fe.end(), 0.0);
        }
        for (int i = 0; i < nl; ++i) {
            Fe[i] += rhs_density * qp.N[i] * qp.w;
            for (int j = 0; j < nl; ++j)
                Ke[i * nl + j] += qp.grad[i].dot(qp.grad[j]) * qp.w;
        }
    });
    if (current >= 0) {
        const auto& en = space.elem_nodes[current];
        for (int i = 0; i < nl; ++i) {
            int gi = free_id[en[i]];
            if (gi < 0) continue;
            rhs[gi] += Fe[i];
            for (int j = 0; j < nl; ++j) {
                int gj = free_id[en[j]];
                if (gj >= 0) trip.emplace_back(gi, gj, Ke[i * nl + j]);
            }
        }
    }

    SpMat K(n_free, n_free);
    K.setFromTriplets(trip.begin(), trip.end());

    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(10 * std::max(n_free, 1));
    cg.compute(K);
    Eigen::VectorXd uf = cg.solve(rhs);
    if (cg.info() != Eigen::Success)
        throw solver_error("conjugate gradients did not converge");

    std::vector<double> u(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (free_id[i] >= 0) u[i] = uf[free_id[i]];
    return u;
}

// Dirichlet problem with inhomogeneous boundary values g at boundary nodes:
//   laplace(u) = 0, u = g on the boundary.
inline std::vector<double> solve_dirichlet_laplace(const FeSpace& space,
                                                   const std::vector<double>& boundary_values,
                                                   double tol = 1e-12) {
    const int n = space.n_nodes();
    std::vector<int> free_id(n, -1);
    int n_free = 0;
    for (int i = 0; i < n; ++i)
        if (!space.node_on_boundary[i]) free_id[i] = n_free++;

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);

    const int nl = space.n_local;
    std::vector<double> Ke(std::size_t(nl) * nl);
    int current = -1;
    auto flush = [&](int elem) {
        const auto& en = space.elem_nodes[elem];
        for (int i = 0; i < nl; ++i) {
            int gi = free_id[en[i]];
            if (gi < 0) continue;
            for (int j = 0; j < nl; ++j) {
                int gj = free_id[en[j]];
                if (gj >= 0)
                    trip.emplace_back(gi, gj, Ke[i * nl + j]);
                else
                    rhs[gi] -= Ke[i * nl + j] * boundary_values[en[j]];
            }
        }
    };
    for_each_quad_point(space, [&](const QuadPoint& qp) {
        if (qp.elem != current) {
            if (current >= 0) flush(current);
            current = qp.elem;
            std::fill(Ke.begin(), Ke.end(), 0.0);
        }
        for (int i = 0; i < nl; ++i)
            for (int j = 0; j < nl; ++j)
                Ke[i * nl + j] += qp.grad[i].dot(qp.grad[j]) * qp.w;
    });
    if (current >= 0) flush(current);

    SpMat K(n_free, n_free);
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(10 * std::max(n_free, 1));
    cg.compute(K);
    Eigen::VectorXd uf = cg.solve(rhs);
    if (cg.info() != Eigen::Success)
        throw solver_error("conjugate gradients did not converge");

    std::vector<double> u(n, 0.0);
    for (int i = 0; i < n; ++i)
        u[i] = free_id[i] >= 0 ? uf[free_id[i]] : boundary_values[i];
    return u;
}

} // namespace symlab::fem

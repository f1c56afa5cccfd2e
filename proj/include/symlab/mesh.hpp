#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "symlab/geometry.hpp"

namespace symlab {

struct BoundaryEdge {
    int a = -1, b = -1;          // vertex indices, loop order
    double theta_a = 0.0;        // curve parameters; theta_b > theta_a (unwrapped)
    double theta_b = 0.0;
    Vec2 normal;                 // outward normal at the edge midpoint parameter
};

// Conforming triangulation of the interior of a BoundaryCurve. Triangles are
// counterclockwise; boundary vertices carry their curve parameter so that
// curvature and exact normals always come from the curve, not the polygon.
struct Mesh {
    BoundaryCurve curve;
    double h_max = 0.0;

    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;  // single closed loop, in order
    std::vector<char> on_boundary;             // per vertex
    std::vector<double> vertex_theta;          // valid where on_boundary

    int n_vertices() const { return int(vertices.size()); }
    int n_triangles() const { return int(triangles.size()); }

    double triangle_area(int t) const {
        const auto& tri = triangles[t];
        Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
        return 0.5 * (b - a).cross(c - a);
    }

    double total_area() const {
        double s = 0.0;
        for (int t = 0; t < n_triangles(); ++t) s += triangle_area(t);
        return s;
    }

    double min_angle_deg() const {
        double worst = 180.0;
        for (const auto& tri : triangles) {
            for (int k = 0; k < 3; ++k) {
                Vec2 a = vertices[tri[k]];
                Vec2 b = vertices[tri[(k + 1) % 3]];
                Vec2 c = vertices[tri[(k + 2) % 3]];
                Vec2 u = b - a, v = c - a;
                double ang = std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
                worst = std::min(worst, ang * 180.0 / pi);
            }
        }
        return worst;
    }
};

namespace detail {

inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b - a).cross(c - a);
}

inline bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
    // CCW (a,b,c); positive determinant means p strictly inside.
    long double ax = a.x - p.x, ay = a.y - p.y;
    long double bx = b.x - p.x, by = b.y - p.y;
    long double cx = c.x - p.x, cy = c.y - p.y;
    long double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                      (bx * bx + by * by) * (ax * cy - cx * ay) +
                      (cx * cx + cy * cy) * (ax * by - bx * ay);
    return det > 0.0L;
}

// Incremental Bowyer-Watson triangulation. Insertion order is fixed by the
// caller, so the result is deterministic.
class Delaunay {
public:
    struct Tri {
        std::array<int, 3> v;    // CCW
        std::array<int, 3> nbr;  // nbr[i] across edge (v[(i+1)%3], v[(i+2)%3])
        bool alive = true;
    };

    explicit Delaunay(const std::vector<Vec2>& points) : pts_(points) {
        // Super-triangle comfortably containing everything.
        double xmin = pts_[0].x, xmax = xmin, ymin = pts_[0].y, ymax = ymin;
        for (const Vec2& p : pts_) {
            xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
        }
        double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
        double d = std::max(xmax - xmin, ymax - ymin) * 16.0 + 1.0;
        super_ = int(pts_.size());
        pts_.push_back({cx - 2.0 * d, cy - d});
        pts_.push_back({cx + 2.0 * d, cy - d});
        pts_.push_back({cx, cy + 2.0 * d});
        tris_.push_back({{super_, super_ + 1, super_ + 2}, {-1, -1, -1}, true});
        for (std::size_t i = 0; i + 3 < pts_.size(); ++i) insert(int(i));
    }

    // Triangles with all vertices among the original points.
    std::vector<std::array<int, 3>> result() const {
        std::vector<std::array<int, 3>> out;
        for (const Tri& t : tris_) {
            if (!t.alive) continue;
            if (t.v[0] >= super_ || t.v[1] >= super_ || t.v[2] >= super_) continue;
            out.push_back(t.v);
        }
        return out;
    }

private:
    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    int super_ = 0;
    int last_ = 0;

    int locate(const Vec2& p) const {
        int t = last_;
        if (t < 0 || t >= int(tris_.size()) || !tris_[t].alive) t = first_alive();
        int steps = 0, limit = int(tris_.size()) * 4 + 64;
        while (steps++ < limit) {
            const Tri& tri = tris_[t];
            int next = -1;
            for (int e = 0; e < 3; ++e) {
                const Vec2& a = pts_[tri.v[(e + 1) % 3]];
                const Vec2& b = pts_[tri.v[(e + 2) % 3]];
                if (orient2d(a, b, p) < 0.0) { next = tri.nbr[e]; break; }
            }
            if (next == -1) return t;
            t = next;
        }
        // Degenerate walk; fall back to scanning.
        for (int i = 0; i < int(tris_.size()); ++i) {
            if (!tris_[i].alive) continue;
            const Tri& tri = tris_[i];
            bool inside = true;
            for (int e = 0; e < 3 && inside; ++e) {
                const Vec2& a = pts_[tri.v[(e + 1) % 3]];
                const Vec2& b = pts_[tri.v[(e + 2) % 3]];
                if (orient2d(a, b, p) < 0.0) inside = false;
            }
            if (inside) return i;
        }
        throw meshing_error("delaunay: point location failed");
    }

    int first_alive() const {
        for (int i = int(tris_.size()) - 1; i >= 0; --i)
            if (tris_[i].alive) return i;
        throw meshing_error("delaunay: no triangles");
    }

    void insert(int ip) {
        const Vec2& p = pts_[ip];
        int seed = locate(p);

        // Cavity: BFS over triangles whose circumcircle contains p.
        std::vector<int> cavity;
        std::vector<int> stack{seed};
        std::vector<char> visited(tris_.size(), 0);
        visited[seed] = 1;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            const Tri& tri = tris_[t];
            if (!in_circumcircle(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], p)) continue;
            cavity.push_back(t);
            for (int e = 0; e < 3; ++e) {
                int n = tri.nbr[e];
                if (n >= 0 && !visited[n]) { visited[n] = 1; stack.push_back(n); }
            }
        }
        if (cavity.empty()) cavity.push_back(seed); // p on a circumcircle boundary; rare

        std::vector<char> in_cavity(tris_.size(), 0);
        for (int t : cavity) in_cavity[t] = 1;

        // Boundary edges of the cavity (kept neighbor on the far side).
        struct Edge { int a, b, outside; };
        std::vector<Edge> rim;
        for (int t : cavity) {
            const Tri& tri = tris_[t];
            for (int e = 0; e < 3; ++e) {
                int n = tri.nbr[e];
                if (n < 0 || !in_cavity[n])
                    rim.push_back({tri.v[(e + 1) % 3], tri.v[(e + 2) % 3], n});
            }
        }
        for (int t : cavity) tris_[t].alive = false;

        // Fan out from p; stitch neighbors via an edge map.
        std::map<std::pair<int, int>, int> open_edge; // (p, rim.a) style half-edges
        int first_new = -1;
        for (const Edge& e : rim) {
            Tri nt;
            nt.v = {ip, e.a, e.b};
            nt.nbr = {e.outside, -1, -1};
            int id = int(tris_.size());
            tris_.push_back(nt);
            if (first_new < 0) first_new = id;
            if (e.outside >= 0) {
                Tri& out = tris_[e.outside];
                for (int k = 0; k < 3; ++k) {
                    int oa = out.v[(k + 1) % 3], ob = out.v[(k + 2) % 3];
                    if ((oa == e.b && ob == e.a) || (oa == e.a && ob == e.b)) out.nbr[k] = id;
                }
            }
            // internal edges (ip, e.a) and (e.b, ip)
            auto key_in = std::make_pair(e.a, ip);
            if (auto it = open_edge.find(key_in); it != open_edge.end()) {
                tris_[id].nbr[2] = it->second; // edge (ip, e.a) is opposite v[2]=e.b
                Tri& other = tris_[it->second];
                for (int k = 0; k < 3; ++k) {
                    int oa = other.v[(k + 1) % 3], ob = other.v[(k + 2) % 3];
                    if (oa == e.a && ob == ip) other.nbr[k] = id;
                }
                open_edge.erase(it);
            } else {
                open_edge.emplace(std::make_pair(ip, e.a), id);
            }
            auto key_out = std::make_pair(ip, e.b);
            if (auto it = open_edge.find(key_out); it != open_edge.end()) {
                tris_[id].nbr[1] = it->second; // edge (e.b, ip) is opposite v[1]=e.a
                Tri& other = tris_[it->second];
                for (int k = 0; k < 3; ++k) {
                    int oa = other.v[(k + 1) % 3], ob = other.v[(k + 2) % 3];
                    if (oa == ip && ob == e.b) other.nbr[k] = id;
                }
                open_edge.erase(it);
            } else {
                open_edge.emplace(std::make_pair(e.b, ip), id);
            }
        }
        last_ = first_new;
    }
};

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 d = b - a;
    double t = std::clamp((p - a).dot(d) / d.squared_norm(), 0.0, 1.0);
    return (p - (a + d * t)).norm();
}

// Equal-arclength boundary parameters via a dense cumulative table.
inline std::vector<double> equal_arclength_thetas(const BoundaryCurve& curve, int n_boundary) {
    const int M = std::max(16 * n_boundary, 8192);
    std::vector<double> cum(M + 1, 0.0);
    for (int i = 0; i < M; ++i) {
        double t0 = 2.0 * pi * i / M, t1 = 2.0 * pi * (i + 1) / M;
        // Two-point Gauss on each slice keeps the table accurate.
        double tm = 0.5 * (t0 + t1), dh = 0.5 * (t1 - t0);
        double g = 1.0 / std::sqrt(3.0);
        cum[i + 1] = cum[i] + dh * (curve.speed(tm - g * dh) + curve.speed(tm + g * dh));
    }
    double total = cum[M];
    std::vector<double> thetas(n_boundary);
    for (int k = 0; k < n_boundary; ++k) {
        double target = total * k / n_boundary;
        auto it = std::upper_bound(cum.begin(), cum.end(), target);
        int j = std::max(0, int(it - cum.begin()) - 1);
        double t0 = 2.0 * pi * j / M;
        double seg = cum[j + 1] - cum[j];
        double frac = seg > 0.0 ? (target - cum[j]) / seg : 0.0;
        thetas[k] = t0 + frac * (2.0 * pi / M);
    }
    return thetas;
}

} // namespace detail

// Advancing-lattice triangulation: equal-arclength boundary ring plus a
// hexagonal interior lattice, Delaunay-connected and Laplace-smoothed.
// Deterministic for a given (curve, h_max).
inline Mesh triangulate(const BoundaryCurve& curve, double h_max) {
    curve.validate();
    if (!(h_max > 0.0) || h_max > curve.a0 / 4.0 + 1e-15)
        throw precondition_error("triangulate: require 0 < h_max <= a0/4");

    double perimeter = 0.0;
    for (int i = 0; i < 2048; ++i) perimeter += curve.speed(2.0 * pi * i / 2048);
    perimeter *= 2.0 * pi / 2048;
    int n_b = std::max(16, int(std::ceil(perimeter / h_max)));
    std::vector<double> thetas = detail::equal_arclength_thetas(curve, n_b);

    std::vector<Vec2> points;
    points.reserve(std::size_t(n_b) * 4);
    for (double t : thetas) points.push_back(curve.point(t));

    // Hex lattice clipped to the interior, one lattice spacing h, anchored at
    // the bounding box so the construction is translation covariant.
    double xmin = points[0].x, xmax = xmin, ymin = points[0].y, ymax = ymin;
    for (const Vec2& p : points) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    const double h = perimeter / n_b; // actual boundary spacing
    const double row_h = h * std::sqrt(3.0) / 2.0;
    const double clearance = 0.72 * h;
    int n_boundary = int(points.size());
    for (int row = 0;; ++row) {
        double y = ymin + row_h * (row + 1);
        if (y > ymax - 0.25 * row_h) break;
        double x0 = xmin + ((row % 2) ? 0.75 * h : 0.25 * h);
        for (int col = 0;; ++col) {
            double x = x0 + h * col;
            if (x > xmax) break;
            Vec2 p{x, y};
            if (!curve.contains(p)) continue;
            double dist = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n_boundary; ++i) {
                dist = std::min(dist, detail::point_segment_distance(
                                          p, points[i], points[(i + 1) % n_boundary]));
                if (dist < clearance) break;
            }
            if (dist >= clearance) points.push_back(p);
        }
    }

    detail::Delaunay dt(points);
    auto all_tris = dt.result();

    // Keep triangles whose centroid is inside; reorient CCW.
    std::vector<std::array<int, 3>> kept;
    for (auto tri : all_tris) {
        Vec2 c = (points[tri[0]] + points[tri[1]] + points[tri[2]]) / 3.0;
        if (!curve.contains(c)) continue;
        if (detail::orient2d(points[tri[0]], points[tri[1]], points[tri[2]]) < 0.0)
            std::swap(tri[1], tri[2]);
        kept.push_back(tri);
    }

    // Compact vertex set (boundary ring first keeps loop order trivial).
    std::vector<int> remap(points.size(), -1);
    std::vector<Vec2> verts;
    auto touch = [&](int v) {
        if (remap[v] < 0) { remap[v] = int(verts.size()); verts.push_back(points[v]); }
    };
    for (int i = 0; i < n_boundary; ++i) touch(i);
    for (auto& tri : kept)
        for (int& v : tri) { touch(v); v = remap[v]; }

    Mesh mesh;
    mesh.curve = curve;
    mesh.h_max = h_max;
    mesh.vertices = std::move(verts);
    mesh.triangles = std::move(kept);
    mesh.on_boundary.assign(mesh.vertices.size(), 0);
    mesh.vertex_theta.assign(mesh.vertices.size(), 0.0);
    for (int i = 0; i < n_boundary; ++i) {
        mesh.on_boundary[i] = 1;
        mesh.vertex_theta[i] = thetas[i];
    }
    for (int i = 0; i < n_boundary; ++i) {
        BoundaryEdge e;
        e.a = i;
        e.b = (i + 1) % n_boundary;
        e.theta_a = thetas[i];
        e.theta_b = (i + 1 < n_boundary) ? thetas[(i + 1) % n_boundary] : thetas[0] + 2.0 * pi;
        e.normal = curve.outward_normal(0.5 * (e.theta_a + e.theta_b));
        mesh.boundary_edges.push_back(e);
    }

    // Laplacian smoothing of interior vertices; a move is kept only if the
    // incident triangles stay positively oriented.
    std::vector<std::vector<int>> vnbr(mesh.vertices.size());
    std::vector<std::vector<int>> vtri(mesh.vertices.size());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            vnbr[tri[k]].push_back(tri[(k + 1) % 3]);
            vnbr[tri[k]].push_back(tri[(k + 2) % 3]);
            vtri[tri[k]].push_back(t);
        }
    }
    for (int pass = 0; pass < 4; ++pass) {
        for (int v = n_boundary; v < mesh.n_vertices(); ++v) {
            if (vnbr[v].empty()) continue;
            Vec2 s{0, 0};
            for (int u : vnbr[v]) s += mesh.vertices[u];
            Vec2 candidate = s / double(vnbr[v].size());
            Vec2 old = mesh.vertices[v];
            mesh.vertices[v] = candidate;
            bool ok = true;
            for (int t : vtri[v])
                if (mesh.triangle_area(t) <= 0.0) { ok = false; break; }
            if (!ok) mesh.vertices[v] = old;
        }
    }

    // Quality gate.
    for (int t = 0; t < mesh.n_triangles(); ++t)
        if (mesh.triangle_area(t) <= 0.0)
            throw meshing_error("triangulate: non-positive triangle area after smoothing");
    double ang = mesh.min_angle_deg();
    if (ang < 20.0) {
        std::ostringstream msg;
        msg << "triangulate: min angle " << ang << " deg < 20 deg (h_max=" << h_max << ")";
        throw meshing_error(msg.str());
    }
    return mesh;
}

// Structural invariants; throws meshing_error with a description on failure.
inline void validate_mesh(const Mesh& mesh) {
    for (int t = 0; t < mesh.n_triangles(); ++t)
        if (mesh.triangle_area(t) <= 0.0) throw meshing_error("mesh: non-positive area");
    if (mesh.min_angle_deg() < 20.0) throw meshing_error("mesh: min angle below 20 deg");

    const double tol = 1e-12 * mesh.curve.a0;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (!mesh.on_boundary[v]) continue;
        Vec2 p = mesh.curve.point(mesh.vertex_theta[v]);
        if ((p - mesh.vertices[v]).norm() > tol)
            throw meshing_error("mesh: boundary vertex off the curve");
    }

    // Boundary edges must form one closed loop.
    const auto& be = mesh.boundary_edges;
    if (be.empty()) throw meshing_error("mesh: no boundary edges");
    for (std::size_t i = 0; i < be.size(); ++i) {
        if (be[i].b != be[(i + 1) % be.size()].a)
            throw meshing_error("mesh: boundary edges do not chain into a loop");
        if (!(be[i].theta_b > be[i].theta_a))
            throw meshing_error("mesh: boundary edge with non-increasing theta");
    }
    if (be.front().a != be.back().b) throw meshing_error("mesh: boundary loop not closed");

    // Every boundary edge appears in exactly one triangle; interior edges in two.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            edge_count[{std::min(a, b), std::max(a, b)}]++;
        }
    std::size_t n_single = 0;
    for (const auto& [e, c] : edge_count) {
        if (c == 1) ++n_single;
        else if (c != 2) throw meshing_error("mesh: non-manifold edge");
    }
    if (n_single != be.size())
        throw meshing_error("mesh: boundary edge count mismatch");
    for (const auto& e : be) {
        auto it = edge_count.find({std::min(e.a, e.b), std::max(e.a, e.b)});
        if (it == edge_count.end() || it->second != 1)
            throw meshing_error("mesh: listed boundary edge not a mesh boundary edge");
    }

    // Euler characteristic of a disk-like triangulation: V - E + F = 1.
    long V = mesh.n_vertices(), E = long(edge_count.size()), F = mesh.n_triangles();
    if (V - E + F != 1) throw meshing_error("mesh: Euler characteristic violated");
}

// Uniform midpoint refinement; boundary midpoints are placed on the curve at
// the parameter midpoint of their edge.
inline Mesh refine(const Mesh& mesh) {
    Mesh out;
    out.curve = mesh.curve;
    out.h_max = mesh.h_max / 2.0;
    out.vertices = mesh.vertices;
    out.on_boundary = mesh.on_boundary;
    out.vertex_theta = mesh.vertex_theta;

    std::map<std::pair<int, int>, std::pair<double, double>> boundary_theta_span;
    for (const auto& e : mesh.boundary_edges)
        boundary_theta_span[{std::min(e.a, e.b), std::max(e.a, e.b)}] = {e.theta_a, e.theta_b};

    struct BoundaryMid {
        int id;
        double theta_a, theta_b, theta;
    };
    std::vector<BoundaryMid> bmids;
    std::map<std::pair<int, int>, int> midpoint;
    auto edge_mid = [&](int a, int b) {
        auto key = std::make_pair(std::min(a, b), std::max(a, b));
        if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
        int id = int(out.vertices.size());
        if (auto bt = boundary_theta_span.find(key); bt != boundary_theta_span.end()) {
            double theta = 0.5 * (bt->second.first + bt->second.second);
            out.vertices.push_back(mesh.curve.point(theta));
            out.on_boundary.push_back(1);
            out.vertex_theta.push_back(theta >= 2.0 * pi ? theta - 2.0 * pi : theta);
            bmids.push_back({id, bt->second.first, bt->second.second, theta});
        } else {
            out.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]) / 2.0);
            out.on_boundary.push_back(0);
            out.vertex_theta.push_back(0.0);
        }
        midpoint.emplace(key, id);
        return id;
    };

    for (const auto& tri : mesh.triangles) {
        int m01 = edge_mid(tri[0], tri[1]);
        int m12 = edge_mid(tri[1], tri[2]);
        int m20 = edge_mid(tri[2], tri[0]);
        out.triangles.push_back({tri[0], m01, m20});
        out.triangles.push_back({tri[1], m12, m01});
        out.triangles.push_back({tri[2], m20, m12});
        out.triangles.push_back({m01, m12, m20});
    }

    // On coarse meshes of strongly curved boundaries the projected midpoints
    // can push a near-limit triangle below the angle bound. Repair moves only
    // new vertices: boundary midpoints slide along the curve within their
    // parent edge, interior midpoints relax toward their neighbor average.
    if (out.min_angle_deg() < 20.0) {
        std::vector<std::vector<int>> vnbr(out.vertices.size());
        std::vector<std::vector<int>> vtri(out.vertices.size());
        for (int t = 0; t < out.n_triangles(); ++t)
            for (int k = 0; k < 3; ++k) {
                int v = out.triangles[t][k];
                vnbr[v].push_back(out.triangles[t][(k + 1) % 3]);
                vnbr[v].push_back(out.triangles[t][(k + 2) % 3]);
                vtri[v].push_back(t);
            }
        auto local_angle = [&](int v) {
            double worst = 180.0;
            for (int t : vtri[v]) {
                if (out.triangle_area(t) <= 0.0) return -1.0;
                for (int k = 0; k < 3; ++k) {
                    Vec2 a = out.vertices[out.triangles[t][k]];
                    Vec2 b = out.vertices[out.triangles[t][(k + 1) % 3]];
                    Vec2 c = out.vertices[out.triangles[t][(k + 2) % 3]];
                    Vec2 u = b - a, w = c - a;
                    double ang =
                        std::acos(std::clamp(u.dot(w) / (u.norm() * w.norm()), -1.0, 1.0));
                    worst = std::min(worst, ang * 180.0 / pi);
                }
            }
            return worst;
        };
        for (int pass = 0; pass < 8 && out.min_angle_deg() < 20.0; ++pass) {
            for (auto& bm : bmids) {
                double best = local_angle(bm.id);
                double best_theta = bm.theta;
                for (double s = 0.30; s <= 0.701; s += 0.05) {
                    double theta = bm.theta_a + s * (bm.theta_b - bm.theta_a);
                    out.vertices[bm.id] = mesh.curve.point(theta);
                    double a = local_angle(bm.id);
                    if (a > best) { best = a; best_theta = theta; }
                }
                bm.theta = best_theta;
                out.vertices[bm.id] = mesh.curve.point(best_theta);
                out.vertex_theta[bm.id] =
                    best_theta >= 2.0 * pi ? best_theta - 2.0 * pi : best_theta;
            }
            for (int v = mesh.n_vertices(); v < out.n_vertices(); ++v) {
                if (out.on_boundary[v] || vnbr[v].empty()) continue;
                double before = local_angle(v);
                Vec2 old = out.vertices[v];
                Vec2 s{0, 0};
                for (int u : vnbr[v]) s += out.vertices[u];
                out.vertices[v] = s / double(vnbr[v].size());
                if (local_angle(v) <= before) out.vertices[v] = old;
            }
        }
    }

    std::map<int, double> mid_theta;
    for (const auto& bm : bmids) mid_theta[bm.id] = bm.theta;
    for (const auto& e : mesh.boundary_edges) {
        int m = midpoint.at({std::min(e.a, e.b), std::max(e.a, e.b)});
        double tm = mid_theta.at(m);
        BoundaryEdge e1{e.a, m, e.theta_a, tm, mesh.curve.outward_normal(0.5 * (e.theta_a + tm))};
        BoundaryEdge e2{m, e.b, tm, e.theta_b, mesh.curve.outward_normal(0.5 * (tm + e.theta_b))};
        out.boundary_edges.push_back(e1);
        out.boundary_edges.push_back(e2);
    }
    return out;
}

} // namespace symlab

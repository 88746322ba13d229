#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "semfuse/core/pose.hpp"

namespace semfuse::visibility {

/**
 * Convex hull of a 3D point set with boundary membership.
 *
 * `on_hull[i]` is true for hull vertices and for every point lying within
 * `eps` of the hull boundary (coplanar points on faces, duplicates of
 * vertices). `eps = eps_rel * scale`, where scale is the largest coordinate
 * magnitude about the centroid, so the classification is invariant to
 * uniform scaling of the input.
 *
 * Inputs of affine dimension < 3 are handled exactly in their own subspace
 * (point, segment end points, planar polygon boundary).
 */
struct HullResult {
    int dimension = -1;
    std::vector<std::size_t> vertices;            // sorted
    std::vector<std::uint8_t> on_hull;            // per input point
    std::vector<std::array<std::size_t, 3>> faces;  // outward-oriented triangles (dimension 3 only)
    double eps = 0.0;
};

namespace detail {

class QuickHull {
public:
    QuickHull(std::span<const Vec3> pts, double eps) : pts_(pts), eps_(eps) {}

    struct Face {
        std::array<int, 3> v{};
        std::array<int, 3> adj{-1, -1, -1};  // neighbour across edge v[k] -> v[k+1]
        Vec3 n = Vec3::Zero();
        double off = 0.0;
        std::vector<int> outside;
        std::vector<int> coplanar;
        int furthest = -1;
        double furthest_d = 0.0;
        bool alive = true;
        std::uint32_t mark = 0;
    };

    double dist(const Face& f, int p) const { return f.n.dot(pts_[p]) - f.off; }

    bool plane(int a, int b, int c, Vec3& n, double& off) const {
        const Vec3 cr = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
        const double len = cr.norm();
        if (!(len > 0.0) || !std::isfinite(len)) return false;
        n = cr / len;
        off = n.dot(pts_[a]);
        return true;
    }

    void assign(int p, std::span<const int> candidates) {
        int best = -1;
        double best_d = -std::numeric_limits<double>::infinity();
        for (int f : candidates) {
            const double d = dist(faces_[f], p);
            if (d > best_d) {
                best_d = d;
                best = f;
            }
        }
        if (best < 0) return;
        Face& face = faces_[best];
        if (best_d > eps_) {
            face.outside.push_back(p);
            if (face.furthest < 0 || best_d > face.furthest_d) {
                face.furthest = p;
                face.furthest_d = best_d;
            }
        } else if (best_d >= -eps_) {
            face.coplanar.push_back(p);
        }
    }

    void run(const std::array<int, 4>& simplex) {
        const Vec3 centroid = (pts_[simplex[0]] + pts_[simplex[1]] + pts_[simplex[2]] + pts_[simplex[3]]) / 4.0;
        const std::array<std::array<int, 3>, 4> tris = {{{simplex[0], simplex[1], simplex[2]},
                                                        {simplex[0], simplex[3], simplex[1]},
                                                        {simplex[1], simplex[3], simplex[2]},
                                                        {simplex[2], simplex[3], simplex[0]}}};
        for (const auto& t : tris) {
            Face f;
            f.v = t;
            plane(t[0], t[1], t[2], f.n, f.off);
            if (f.n.dot(centroid) - f.off > 0.0) {
                std::swap(f.v[1], f.v[2]);
                f.n = -f.n;
                f.off = -f.off;
            }
            faces_.push_back(std::move(f));
        }
        for (int i = 0; i < 4; ++i) {
            for (int k = 0; k < 3; ++k) {
                const int a = faces_[i].v[k], b = faces_[i].v[(k + 1) % 3];
                for (int j = 0; j < 4; ++j) {
                    if (j == i) continue;
                    for (int m = 0; m < 3; ++m) {
                        if (faces_[j].v[m] == b && faces_[j].v[(m + 1) % 3] == a) faces_[i].adj[k] = j;
                    }
                }
            }
        }

        const std::array<int, 4> initial = {0, 1, 2, 3};
        const int n = static_cast<int>(pts_.size());
        for (int p = 0; p < n; ++p) {
            if (p == simplex[0] || p == simplex[1] || p == simplex[2] || p == simplex[3]) continue;
            assign(p, initial);
        }

        std::vector<int> stack = {0, 1, 2, 3};
        while (!stack.empty()) {
            const int fi = stack.back();
            stack.pop_back();
            if (!faces_[fi].alive || faces_[fi].outside.empty()) continue;
            expand(fi, stack);
        }
    }

    std::span<const Face> faces() const { return faces_; }

private:
    struct HorizonEdge {
        int a, b;       // oriented as in the visible face
        int neighbour;  // surviving face across the edge
    };

    void expand(int fi, std::vector<int>& stack) {
        const int apex = faces_[fi].furthest;
        ++mark_;
        std::vector<int> visible = {fi};
        faces_[fi].mark = mark_;
        std::vector<HorizonEdge> horizon;
        for (std::size_t q = 0; q < visible.size(); ++q) {
            const Face& f = faces_[visible[q]];
            for (int k = 0; k < 3; ++k) {
                const int g = f.adj[k];
                if (faces_[g].mark == mark_) continue;
                if (dist(faces_[g], apex) > eps_) {
                    faces_[g].mark = mark_;
                    visible.push_back(g);
                }
            }
        }
        for (int vf : visible) {
            const Face& f = faces_[vf];
            for (int k = 0; k < 3; ++k) {
                const int g = f.adj[k];
                if (faces_[g].mark != mark_) horizon.push_back({f.v[k], f.v[(k + 1) % 3], g});
            }
        }

        // Order the horizon into a single cycle; bail out on a non-simple
        // horizon (numerically inconsistent visibility) by treating the apex
        // as a boundary point.
        std::unordered_map<int, std::size_t> by_start;
        bool simple = true;
        for (std::size_t e = 0; e < horizon.size(); ++e) simple &= by_start.emplace(horizon[e].a, e).second;
        std::vector<HorizonEdge> cycle;
        if (simple && !horizon.empty()) {
            std::size_t e = 0;
            for (std::size_t step = 0; step < horizon.size(); ++step) {
                cycle.push_back(horizon[e]);
                auto it = by_start.find(horizon[e].b);
                if (it == by_start.end()) {
                    simple = false;
                    break;
                }
                e = it->second;
            }
            simple = simple && e == 0 && cycle.size() == horizon.size();
        }
        std::vector<Face> fresh;
        if (simple) {
            for (const auto& edge : cycle) {
                Face f;
                f.v = {edge.a, edge.b, apex};
                if (!plane(edge.a, edge.b, apex, f.n, f.off)) {
                    simple = false;
                    break;
                }
                fresh.push_back(std::move(f));
            }
        }
        if (!simple) {
            Face& f = faces_[fi];
            f.outside.erase(std::find(f.outside.begin(), f.outside.end(), apex));
            f.coplanar.push_back(apex);
            refresh_furthest(f);
            if (!f.outside.empty()) stack.push_back(fi);
            return;
        }

        const int base = static_cast<int>(faces_.size());
        const int m = static_cast<int>(fresh.size());
        for (int k = 0; k < m; ++k) {
            Face& f = fresh[k];
            f.adj[0] = cycle[k].neighbour;
            f.adj[1] = base + (k + 1) % m;
            f.adj[2] = base + (k + m - 1) % m;
            Face& g = faces_[cycle[k].neighbour];
            for (int j = 0; j < 3; ++j) {
                if (g.v[j] == cycle[k].b && g.v[(j + 1) % 3] == cycle[k].a) g.adj[j] = base + k;
            }
        }

        std::vector<int> orphans;
        for (int vf : visible) {
            Face& f = faces_[vf];
            f.alive = false;
            for (int p : f.outside) {
                if (p != apex) orphans.push_back(p);
            }
            for (int p : f.coplanar) orphans.push_back(p);
            std::vector<int>().swap(f.outside);
            std::vector<int>().swap(f.coplanar);
        }
        std::vector<int> created(m);
        for (int k = 0; k < m; ++k) {
            faces_.push_back(std::move(fresh[k]));
            created[k] = base + k;
        }
        for (int p : orphans) assign(p, created);
        for (int f : created) {
            if (!faces_[f].outside.empty()) stack.push_back(f);
        }
    }

    void refresh_furthest(Face& f) const {
        f.furthest = -1;
        f.furthest_d = 0.0;
        for (int p : f.outside) {
            const double d = dist(f, p);
            if (f.furthest < 0 || d > f.furthest_d) {
                f.furthest = p;
                f.furthest_d = d;
            }
        }
    }

    std::span<const Vec3> pts_;
    double eps_;
    std::vector<Face> faces_;
    std::uint32_t mark_ = 0;
};

template <typename Score>
std::size_t argmax(std::size_t n, Score score) {
    std::size_t best = 0;
    double best_s = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = score(i);
        if (s > best_s) {
            best_s = s;
            best = i;
        }
    }
    return best;
}

}  // namespace detail

inline constexpr double kHullEpsRel = 1e-9;

inline HullResult convex_hull(std::span<const Vec3> pts, double eps_rel = kHullEpsRel) {
    HullResult out;
    const std::size_t n = pts.size();
    out.on_hull.assign(n, 0);
    if (n == 0) return out;

    Vec3 centroid = Vec3::Zero();
    for (const auto& p : pts) centroid += p;
    centroid /= static_cast<double>(n);
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, (p - centroid).cwiseAbs().maxCoeff());
    const double eps = eps_rel * scale;
    out.eps = eps;

    // Affine frame from extreme points: a (min x), b (farthest from a),
    // c (farthest from line ab), d (farthest from plane abc).
    const std::size_t a = detail::argmax(n, [&](std::size_t i) { return -pts[i].x(); });
    const std::size_t b = detail::argmax(n, [&](std::size_t i) { return (pts[i] - pts[a]).norm(); });
    const Vec3 pa = pts[a];
    if ((pts[b] - pa).norm() <= eps) {
        out.dimension = 0;
        out.vertices = {a};
        out.on_hull.assign(n, 1);
        return out;
    }
    const Vec3 dir = (pts[b] - pa).normalized();
    auto line_dist = [&](std::size_t i) {
        const Vec3 r = pts[i] - pa;
        return (r - r.dot(dir) * dir).norm();
    };
    const std::size_t c = detail::argmax(n, line_dist);
    if (line_dist(c) <= eps) {
        out.dimension = 1;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        std::size_t ilo = a, ihi = b;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = (pts[i] - pa).dot(dir);
            if (t < lo) lo = t, ilo = i;
            if (t > hi) hi = t, ihi = i;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double t = (pts[i] - pa).dot(dir);
            out.on_hull[i] = (t - lo <= eps || hi - t <= eps) ? 1 : 0;
        }
        out.vertices = {std::min(ilo, ihi), std::max(ilo, ihi)};
        return out;
    }
    const Vec3 normal = dir.cross(pts[c] - pa).normalized();
    auto plane_dist = [&](std::size_t i) { return std::abs((pts[i] - pa).dot(normal)); };
    const std::size_t d = detail::argmax(n, plane_dist);

    if (plane_dist(d) <= eps) {
        // Planar input: 2D monotone chain in the (dir, v) basis.
        out.dimension = 2;
        const Vec3 v = normal.cross(dir);
        std::vector<Eigen::Vector2d> uv(n);
        for (std::size_t i = 0; i < n; ++i) uv[i] = {(pts[i] - pa).dot(dir), (pts[i] - pa).dot(v)};
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
            return uv[i].x() < uv[j].x() || (uv[i].x() == uv[j].x() && (uv[i].y() < uv[j].y() || (uv[i].y() == uv[j].y() && i < j)));
        });
        auto cross = [&](std::size_t o, std::size_t p, std::size_t q) {
            const Eigen::Vector2d e1 = uv[p] - uv[o], e2 = uv[q] - uv[o];
            return e1.x() * e2.y() - e1.y() * e2.x();
        };
        std::vector<std::size_t> hull(2 * n);
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            while (k >= 2 && cross(hull[k - 2], hull[k - 1], order[i]) <= 0.0) --k;
            hull[k++] = order[i];
        }
        for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
            while (k >= t && cross(hull[k - 2], hull[k - 1], order[i]) <= 0.0) --k;
            hull[k++] = order[i];
        }
        hull.resize(k - 1);
        out.vertices = hull;
        std::sort(out.vertices.begin(), out.vertices.end());
        // Inclusive boundary: inward distance to the nearest edge <= eps.
        for (std::size_t i = 0; i < n; ++i) {
            double inward = std::numeric_limits<double>::infinity();
            for (std::size_t e = 0; e < hull.size(); ++e) {
                const auto& p0 = uv[hull[e]];
                const auto& p1 = uv[hull[(e + 1) % hull.size()]];
                const Eigen::Vector2d edge = p1 - p0;
                const double len = edge.norm();
                if (len == 0.0) continue;
                const Eigen::Vector2d r = uv[i] - p0;
                inward = std::min(inward, (edge.x() * r.y() - edge.y() * r.x()) / len);
            }
            out.on_hull[i] = inward <= eps ? 1 : 0;
        }
        for (std::size_t vtx : hull) out.on_hull[vtx] = 1;
        return out;
    }

    out.dimension = 3;
    detail::QuickHull qh(pts, eps);
    qh.run({static_cast<int>(a), static_cast<int>(b), static_cast<int>(c), static_cast<int>(d)});
    std::vector<std::uint8_t> is_vertex(n, 0);
    for (const auto& f : qh.faces()) {
        if (!f.alive) continue;
        out.faces.push_back({static_cast<std::size_t>(f.v[0]), static_cast<std::size_t>(f.v[1]), static_cast<std::size_t>(f.v[2])});
        for (int v : f.v) is_vertex[v] = 1;
        for (int p : f.coplanar) out.on_hull[p] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (is_vertex[i]) {
            out.vertices.push_back(i);
            out.on_hull[i] = 1;
        }
    }
    return out;
}

}  // namespace semfuse::visibility

#include "geoprint/safe_box.hpp"

#include "geoprint/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace geoprint {

namespace {

/// First point where the ray from p (inside the box) along d meets the box surface.
Vec3 exit_point(const Vec3& p, const Vec3& d, const Aabb& b) {
    double t = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (d[a] > 0) t = std::min(t, (b.hi[a] - p[a]) / d[a]);
        if (d[a] < 0) t = std::min(t, (b.lo[a] - p[a]) / d[a]);
    }
    if (!std::isfinite(t)) throw ValidationError("air move needs a nonzero exit direction");
    Vec3 e = p + std::max(t, 0.0) * d;
    // snap the exit face exactly onto the box
    for (int a = 0; a < 3; ++a) e[a] = std::clamp(e[a], b.lo[a], b.hi[a]);
    return e;
}

/// Box faces (axis * 2 + side) containing p.
unsigned faces_of(const Vec3& p, const Aabb& b) {
    unsigned mask = 0;
    for (int a = 0; a < 3; ++a) {
        double tol = 1e-9 * std::max(1.0, b.hi[a] - b.lo[a]);
        if (std::abs(p[a] - b.lo[a]) <= tol) mask |= 1u << (2 * a);
        if (std::abs(p[a] - b.hi[a]) <= tol) mask |= 1u << (2 * a + 1);
    }
    return mask;
}

}  // namespace

AirMove safe_box_airmove(const Vec3& from, const Vec3& from_dir, const Vec3& to, const Vec3& to_dir,
                         const SafeBox& sb) {
    const Aabb& b = sb.box;
    if (!b.contains(from) || !b.contains(to)) throw ValidationError("air move endpoint outside the safe box");
    AirMove out;
    if (from == to) {
        out.polyline = {from};
        return out;
    }
    Vec3 e1 = exit_point(from, from_dir.normalized(), b);
    Vec3 e2 = exit_point(to, to_dir.normalized(), b);

    // graph on the box surface: exits, corners and the exits' nearest points on every box edge
    std::vector<Vec3> nodes = {e1, e2};
    for (int c = 0; c < 8; ++c)
        nodes.emplace_back(c & 1 ? b.hi.x() : b.lo.x(), c & 2 ? b.hi.y() : b.lo.y(), c & 4 ? b.hi.z() : b.lo.z());
    for (int a = 0; a < 3; ++a) {
        int u = (a + 1) % 3, v = (a + 2) % 3;
        for (int s = 0; s < 4; ++s) {
            for (const Vec3& e : {e1, e2}) {
                Vec3 q;
                q[u] = s & 1 ? b.hi[u] : b.lo[u];
                q[v] = s & 2 ? b.hi[v] : b.lo[v];
                q[a] = e[a];
                nodes.push_back(q);
            }
        }
    }
    const int n = static_cast<int>(nodes.size());
    std::vector<unsigned> face(n);
    for (int i = 0; i < n; ++i) face[i] = faces_of(nodes[i], b);
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> prev(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[0] = 0;
    pq.push({0, 0});
    while (!pq.empty()) {
        auto [d, i] = pq.top();
        pq.pop();
        if (d > dist[i]) continue;
        if (i == 1) break;
        for (int j = 0; j < n; ++j) {
            if (j == i || !(face[i] & face[j])) continue;
            double nd = d + (nodes[i] - nodes[j]).norm();
            if (nd < dist[j]) {
                dist[j] = nd;
                prev[j] = i;
                pq.push({nd, j});
            }
        }
    }
    if (prev[1] < 0 && (e1 - e2).norm() > 0) throw ValidationError("no route over the safe box");
    std::vector<Vec3> route;
    for (int i = 1; i >= 0; i = prev[i]) {
        route.push_back(nodes[i]);
        if (i == 0) break;
    }
    std::reverse(route.begin(), route.end());
    out.polyline.push_back(from);
    for (const auto& p : route) {
        if ((p - out.polyline.back()).norm() > 0) out.polyline.push_back(p);
    }
    if ((to - out.polyline.back()).norm() > 0) out.polyline.push_back(to);
    for (size_t i = 1; i < out.polyline.size(); ++i) out.length += (out.polyline[i] - out.polyline[i - 1]).norm();
    return out;
}

}  // namespace geoprint

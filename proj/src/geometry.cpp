#include "geoprint/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>

namespace geoprint {

double Aabb::squared_distance(const Vec3& p) const {
    Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(Vec3::Zero());
    return d.squaredNorm();
}

Vec3 normalized_or(const Vec3& v, const Vec3& fallback, double eps) {
    double n = v.norm();
    if (!(n > eps)) return fallback;
    return v / n;
}

double angle_deg(const Vec3& a, const Vec3& b) {
    // atan2 form stays accurate near 0 and 180
    double s = a.cross(b).norm();
    double c = a.dot(b);
    return std::atan2(s, c) * 180.0 / std::numbers::pi;
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 ab = b - a;
    double l2 = ab.squaredNorm();
    double t = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

namespace {

double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
    Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s = 0.0, t = 0.0;
    if (a <= 1e-300 && e <= 1e-300) return r.norm();
    if (a <= 1e-300) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        double c = d1.dot(r);
        if (e <= 1e-300) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            double b = d1.dot(d2);
            double den = a * e - b * b;
            s = den > 0.0 ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p1 + s * d1) - (p2 + t * d2)).norm();
}

bool point_in_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, double eps) {
    Vec3 n = (b - a).cross(c - a);
    double n2 = n.squaredNorm();
    if (n2 <= 0.0) return false;
    double u = (c - b).cross(p - b).dot(n) / n2;
    double v = (a - c).cross(p - c).dot(n) / n2;
    double w = 1.0 - u - v;
    return u >= -eps && v >= -eps && w >= -eps;
}

}  // namespace

bool segment_intersects_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                 const Vec3& c, double eps) {
    Vec3 n = (b - a).cross(c - a);
    double nn = n.norm();
    if (nn <= 0.0) return false;
    Vec3 nu = n / nn;
    double dp = (p - a).dot(nu);
    double dq = (q - a).dot(nu);
    double scale = std::max({(b - a).norm(), (c - a).norm(), (q - p).norm(), 1e-300});
    double tol = eps * scale;
    if (std::abs(dp) <= tol && std::abs(dq) <= tol) {
        // coplanar
        if (point_in_triangle(p, a, b, c, eps) || point_in_triangle(q, a, b, c, eps)) return true;
        return segment_segment_distance(p, q, a, b) <= tol ||
               segment_segment_distance(p, q, b, c) <= tol ||
               segment_segment_distance(p, q, c, a) <= tol;
    }
    if ((dp > tol && dq > tol) || (dp < -tol && dq < -tol)) return false;
    double t = std::abs(dp - dq) > 0.0 ? dp / (dp - dq) : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    Vec3 x = p + t * (q - p);
    return point_in_triangle(x, a, b, c, eps);
}

double triangle_winding(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Van Oosterom-Strackee
    Vec3 x = a - p, y = b - p, z = c - p;
    double lx = x.norm(), ly = y.norm(), lz = z.norm();
    double num = x.dot(y.cross(z));
    double den = lx * ly * lz + x.dot(y) * lz + y.dot(z) * lx + z.dot(x) * ly;
    return std::atan2(num, den) / (2.0 * std::numbers::pi);
}

double ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 e1 = b - a, e2 = c - a;
    Vec3 pv = d.cross(e2);
    double det = e1.dot(pv);
    if (std::abs(det) < 1e-300) return -1.0;
    double inv = 1.0 / det;
    Vec3 tv = o - a;
    double u = tv.dot(pv) * inv;
    if (u < 0.0 || u > 1.0) return -1.0;
    Vec3 qv = tv.cross(e1);
    double v = d.dot(qv) * inv;
    if (v < 0.0 || u + v > 1.0) return -1.0;
    double t = e2.dot(qv) * inv;
    return t >= 0.0 ? t : -1.0;
}

Bvh::Bvh(std::span<const Aabb> boxes) {
    if (boxes.empty()) return;
    boxes_.assign(boxes.begin(), boxes.end());
    order_.resize(boxes.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<Vec3> centers(boxes.size());
    for (size_t i = 0; i < boxes.size(); ++i) centers[i] = boxes[i].center();
    nodes_.reserve(2 * boxes.size());
    build(boxes, 0, static_cast<int>(boxes.size()), centers);
}

const Aabb& Bvh::bounds() const {
    static const Aabb empty_box;
    return nodes_.empty() ? empty_box : nodes_.front().box;
}

int Bvh::build(std::span<const Aabb> boxes, int first, int count, std::vector<Vec3>& centers) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Aabb box, cbox;
    for (int i = first; i < first + count; ++i) {
        box.expand(boxes[order_[i]]);
        cbox.expand(centers[order_[i]]);
    }
    nodes_[id].box = box;
    if (count <= 4) {
        nodes_[id].first = first;
        nodes_[id].count = count;
        return id;
    }
    int axis;
    (cbox.hi - cbox.lo).maxCoeff(&axis);
    int mid = first + count / 2;
    std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                     [&](int a, int b) {
                         if (centers[a][axis] != centers[b][axis]) return centers[a][axis] < centers[b][axis];
                         return a < b;
                     });
    int l = build(boxes, first, mid - first, centers);
    int r = build(boxes, mid, first + count - mid, centers);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

bool Bvh::any_overlap(const Aabb& query, const std::function<bool(int)>& visit) const {
    if (nodes_.empty()) return false;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        if (!n.box.overlaps(query)) continue;
        if (n.left < 0) {
            for (int i = n.first; i < n.first + n.count; ++i)
                if (boxes_[order_[i]].overlaps(query) && visit(order_[i])) return true;
        } else {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
    return false;
}

std::pair<int, double> Bvh::nearest(const Vec3& p, const std::function<double(int)>& dist) const {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    if (nodes_.empty()) return {best, best_d};
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(nodes_[0].box.squared_distance(p), 0);
    while (!pq.empty()) {
        auto [d2, id] = pq.top();
        pq.pop();
        if (d2 >= best_d * best_d) break;
        const Node& n = nodes_[id];
        if (n.left < 0) {
            for (int i = n.first; i < n.first + n.count; ++i) {
                double d = dist(order_[i]);
                if (d < best_d || (d == best_d && order_[i] < best)) {
                    best_d = d;
                    best = order_[i];
                }
            }
        } else {
            pq.emplace(nodes_[n.left].box.squared_distance(p), n.left);
            pq.emplace(nodes_[n.right].box.squared_distance(p), n.right);
        }
    }
    return {best, best_d};
}

}  // namespace geoprint

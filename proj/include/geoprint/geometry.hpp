#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace geoprint {

using Vec3 = Eigen::Vector3d;

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void expand(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void expand(const Aabb& b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    [[nodiscard]] bool empty() const { return (lo.array() > hi.array()).any(); }
    [[nodiscard]] bool overlaps(const Aabb& b) const {
        return (lo.array() <= b.hi.array()).all() && (b.lo.array() <= hi.array()).all();
    }
    [[nodiscard]] bool contains(const Vec3& p) const {
        return (lo.array() <= p.array()).all() && (p.array() <= hi.array()).all();
    }
    [[nodiscard]] Aabb inflated(double margin) const {
        return {(lo.array() - margin).matrix(), (hi.array() + margin).matrix()};
    }
    [[nodiscard]] Vec3 center() const { return 0.5 * (lo + hi); }
    /// Squared distance from p to the box (0 inside).
    [[nodiscard]] double squared_distance(const Vec3& p) const;
};

/// Unit vector, or `fallback` when the input is shorter than `eps`.
Vec3 normalized_or(const Vec3& v, const Vec3& fallback, double eps = 1e-300);

/// Angle between two vectors in degrees (inputs need not be unit).
double angle_deg(const Vec3& a, const Vec3& b);

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

/// Segment [p,q] against triangle (a,b,c). Closed test: touching counts.
bool segment_intersects_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                 const Vec3& c, double eps = 1e-12);

/// Signed solid angle of triangle (a,b,c) seen from p, divided by 4π.
double triangle_winding(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Parametric hit of ray o + t d with the triangle, t >= 0. Returns t or -1.
double ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c);

/// Static bounding volume hierarchy over primitives described by their boxes.
/// Queries return primitive indices; callers test exact geometry.
class Bvh {
public:
    Bvh() = default;
    explicit Bvh(std::span<const Aabb> boxes);

    [[nodiscard]] bool empty() const { return nodes_.empty(); }
    [[nodiscard]] const Aabb& bounds() const;

    /// Visits every primitive whose box overlaps `query`; stops when `visit` returns true.
    bool any_overlap(const Aabb& query, const std::function<bool(int)>& visit) const;

    /// Nearest-primitive search. `dist` returns the exact distance to a primitive.
    /// Returns {index, distance}; index -1 when empty.
    std::pair<int, double> nearest(const Vec3& p, const std::function<double(int)>& dist) const;

private:
    struct Node {
        Aabb box;
        int left = -1;
        int right = -1;
        int first = 0;
        int count = 0;
    };
    int build(std::span<const Aabb> boxes, int first, int count, std::vector<Vec3>& centers);

    std::vector<Node> nodes_;
    std::vector<int> order_;
    std::vector<Aabb> boxes_;
};

}  // namespace geoprint

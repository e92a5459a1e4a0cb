#pragma once

#include "geoprint/geometry.hpp"

#include <vector>

namespace geoprint {

/// Inflated bounding box of the in-process workpiece; its faces carry air moves.
struct SafeBox {
    Aabb box;
    static SafeBox around(const Aabb& workpiece, double margin) { return {workpiece.inflated(margin)}; }
};

struct AirMove {
    std::vector<Vec3> polyline;
    double length = 0.0;
};

/// Leaves `from` along `from_dir` to the box surface, follows the shortest route over the box faces,
/// and descends to `to` against `to_dir`. Both points must lie inside the box.
AirMove safe_box_airmove(const Vec3& from, const Vec3& from_dir, const Vec3& to, const Vec3& to_dir,
                         const SafeBox& box);

}  // namespace geoprint

#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "semfuse/core/error.hpp"
#include "semfuse/visibility/convex_hull.hpp"

namespace semfuse::visibility {

/// Generalized hidden point removal with the exponential inversion kernel
/// f(d) = d^gamma. Points outside [min_range, max_range] from the viewpoint
/// are never visible.
///
/// |gamma| trades two errors. An occluder sampled at angular spacing theta
/// hides what lies behind it only if |gamma| * ln(d_far / d_near) > theta^2 / 8,
/// while visible points within about sqrt(2 |gamma| ln(d_far / d_near)) rad of
/// a silhouette are hidden as well.
inline constexpr double kDefaultGhprGamma = -0.001;

struct GhprConfig {
    double gamma = kDefaultGhprGamma;
    double min_range = 2.0;
    double max_range = 45.0;

    void validate() const {
        if (!(gamma < 0.0)) throw Error(ErrorCode::InvalidArgument, "GHPR gamma must be negative");
        if (!(min_range >= 0.0 && min_range < max_range)) {
            throw Error(ErrorCode::InvalidArgument, "GHPR range must satisfy 0 <= min_range < max_range");
        }
    }

    /// No range limits; used when only the visibility operator itself matters.
    static GhprConfig unbounded(double gamma = kDefaultGhprGamma) {
        return {gamma, 0.0, std::numeric_limits<double>::infinity()};
    }
};

struct GhprResult {
    std::vector<std::size_t> visible;  // ascending input indices
    std::size_t in_range = 0;
    /// The reflected set (plus viewpoint) spans fewer than three dimensions and
    /// visibility was decided by the lower-dimensional hull.
    bool degenerate = false;
};

inline constexpr double kMinViewpointDistance = 1e-9;

/**
 * Each in-range point p at distance d from the viewpoint c is reflected to
 * c + d^gamma (p - c) / d, which reverses distance order along every ray.
 * The viewpoint joins the reflected set; reflected points on the boundary of
 * its convex hull (vertices or within eps of a face) are visible.
 */
inline GhprResult ghpr_visible(std::span<const Vec3> points, const Vec3& viewpoint, const GhprConfig& cfg = {}) {
    cfg.validate();
    GhprResult result;
    std::vector<std::size_t> source;
    std::vector<Vec3> reflected;
    source.reserve(points.size());
    reflected.reserve(points.size() + 1);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec3 r = points[i] - viewpoint;
        const double d = r.norm();
        if (d < cfg.min_range || d > cfg.max_range) continue;
        if (d <= kMinViewpointDistance) {
            throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(i) + " coincides with the viewpoint");
        }
        source.push_back(i);
        reflected.push_back(std::pow(d, cfg.gamma - 1.0) * r);
    }
    result.in_range = source.size();
    if (source.empty()) return result;
    reflected.push_back(Vec3::Zero());

    const HullResult hull = convex_hull(reflected);
    result.degenerate = hull.dimension < 3;
    for (std::size_t k = 0; k < source.size(); ++k) {
        if (hull.on_hull[k]) result.visible.push_back(source[k]);
    }
    return result;
}

}  // namespace semfuse::visibility

#pragma once

#include <cmath>
#include <optional>

#include "semfuse/core/error.hpp"
#include "semfuse/core/pose.hpp"

namespace semfuse {

/// Rectified pinhole camera. Camera axes: x right, y down, z along the optical axis.
struct CameraModel {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;
    Rigid extrinsic;  // sensor body <- camera

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0)) throw Error(ErrorCode::NonPositiveFocal, "focal lengths must be positive");
        if (width <= 0 || height <= 0 || !(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height)) {
            throw Error(ErrorCode::InvalidCamera, "principal point must lie inside the image");
        }
    }

    /// World <- camera transform for a sensor body at `body_pose`.
    Rigid camera_pose(const Pose& body_pose) const { return body_pose.transform() * extrinsic; }

    bool contains(double u, double v) const { return u >= 0.0 && u < width && v >= 0.0 && v < height; }
};

struct Pixel {
    double u = 0.0;
    double v = 0.0;
};

inline constexpr double kMinProjectDepth = 1e-6;

/// Pinhole projection; std::nullopt means the point is behind the camera.
/// The caller decides whether the pixel lies inside the image.
inline std::optional<Pixel> project(const Vec3& p_cam, const CameraModel& cam, double z_min = kMinProjectDepth) {
    if (p_cam.z() <= z_min) return std::nullopt;
    return Pixel{cam.fx * p_cam.x() / p_cam.z() + cam.cx, cam.fy * p_cam.y() / p_cam.z() + cam.cy};
}

}  // namespace semfuse

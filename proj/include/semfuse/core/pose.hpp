#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "semfuse/core/error.hpp"

namespace semfuse {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform target <- source: p_target = rotation * p_source + translation.
struct Rigid {
    Vec3 translation = Vec3::Zero();
    Quat rotation = Quat::Identity();

    static Rigid identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    Vec3 apply_inverse(const Vec3& p) const { return rotation.conjugate() * (p - translation); }

    Rigid inverse() const {
        Rigid r;
        r.rotation = rotation.conjugate();
        r.translation = -(r.rotation * translation);
        return r;
    }

    friend Rigid operator*(const Rigid& a, const Rigid& b) {
        Rigid r;
        r.rotation = (a.rotation * b.rotation).normalized();
        r.translation = a.rotation * b.translation + a.translation;
        return r;
    }
};

/// Timestamped sensor pose on a trajectory (world <- sensor).
struct Pose {
    double t = 0.0;
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();

    Rigid transform() const { return {position, orientation}; }
};

using Trajectory = std::vector<Pose>;

inline constexpr double kDefaultSyncTolerance = 0.010;

enum class PoseLookup { Exact, Interpolate };

/// Heading angle (yaw about world z) of a world <- sensor rotation, radians.
inline double yaw_of(const Quat& q) {
    return std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()), 1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
}

/// Normalizes the quaternion; throws on a zero or non-finite quaternion.
inline Quat normalized_quaternion(double qx, double qy, double qz, double qw) {
    Quat q(qw, qx, qy, qz);
    const double n = q.norm();
    if (!std::isfinite(n) || n < 1e-12) throw Error(ErrorCode::NonFiniteValue, "degenerate quaternion");
    // Already-unit input is kept bit for bit so written poses read back identically.
    if (std::abs(n - 1.0) > 1e-12) q.coeffs() /= n;
    return q;
}

/**
 * Pose of the trajectory at time t.
 *
 * Exact mode returns the closest pose if it lies within `sync_tolerance`.
 * Interpolate mode lerps the position and slerps the orientation between the
 * bracketing poses; a timestamp that falls on a pose returns it untouched.
 */
inline Pose pose_at(std::span<const Pose> trajectory, double t, PoseLookup mode = PoseLookup::Interpolate,
                    double sync_tolerance = kDefaultSyncTolerance) {
    if (trajectory.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
    auto it = std::lower_bound(trajectory.begin(), trajectory.end(), t,
                               [](const Pose& p, double value) { return p.t < value; });

    if (mode == PoseLookup::Exact) {
        const Pose* best = nullptr;
        double best_dt = sync_tolerance;
        if (it != trajectory.end() && std::abs(it->t - t) <= best_dt) {
            best = &*it;
            best_dt = std::abs(it->t - t);
        }
        if (it != trajectory.begin() && std::abs(std::prev(it)->t - t) <= best_dt) {
            if (!best || std::abs(std::prev(it)->t - t) < best_dt) best = &*std::prev(it);
        }
        if (!best) throw Error(ErrorCode::NoPoseAtTime, "no pose within tolerance of t=" + std::to_string(t));
        return *best;
    }

    if (it != trajectory.end() && it->t == t) return *it;
    if (it == trajectory.begin() || it == trajectory.end()) {
        throw Error(ErrorCode::OutOfRange, "t=" + std::to_string(t) + " outside trajectory span");
    }
    const Pose& a = *std::prev(it);
    const Pose& b = *it;
    const double s = (t - a.t) / (b.t - a.t);
    Pose out;
    out.t = t;
    out.position = (1.0 - s) * a.position + s * b.position;
    out.orientation = a.orientation.slerp(s, b.orientation).normalized();
    return out;
}

/// Camera-frame coordinates of a world point for a camera at `camera_pose`.
inline Vec3 world_to_camera(const Vec3& p_world, const Rigid& camera_pose) { return camera_pose.apply_inverse(p_world); }
inline Vec3 camera_to_world(const Vec3& p_cam, const Rigid& camera_pose) { return camera_pose.apply(p_cam); }

}  // namespace semfuse

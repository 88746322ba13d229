#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "semfuse/core/cloud.hpp"
#include "semfuse/core/error.hpp"
#include "semfuse/core/pose.hpp"

namespace semfuse::labeltransfer {

struct FrameSampleRule {
    double distance_step = 5.0;  // meters
    double heading_step = 5.0;   // degrees

    void validate() const {
        if (!(distance_step > 0.0) || !(heading_step > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "frame sampling steps must be positive");
        }
    }
};

/// Thresholds are compared with this relative slack so that accumulated
/// rounding (five 1-degree steps summing to 4.999999...) still triggers.
inline constexpr double kSampleThresholdRelTol = 1e-9;

inline double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

/**
 * Trajectory-centric frame selection: walk the trajectory from the first pose
 * and emit a timestamp whenever the distance travelled or the absolute heading
 * change accumulated since the last emission reaches its step.
 */
inline std::vector<double> sample_frames(std::span<const Pose> trajectory, const FrameSampleRule& rule = {}) {
    rule.validate();
    if (trajectory.size() < 2) throw Error(ErrorCode::InvalidArgument, "frame sampling needs at least two poses");
    std::vector<double> out = {trajectory.front().t};
    const double dist_limit = rule.distance_step * (1.0 - kSampleThresholdRelTol);
    const double heading_limit = rule.heading_step * M_PI / 180.0 * (1.0 - kSampleThresholdRelTol);
    double travelled = 0.0;
    double turned = 0.0;
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        travelled += (trajectory[i].position - trajectory[i - 1].position).norm();
        turned += std::abs(wrap_angle(yaw_of(trajectory[i].orientation) - yaw_of(trajectory[i - 1].orientation)));
        if (travelled >= dist_limit || turned >= heading_limit) {
            out.push_back(trajectory[i].t);
            travelled = 0.0;
            turned = 0.0;
        }
    }
    return out;
}

struct SubmapSpec {
    double radius = 45.0;             // meters
    double time_window = 1.0;         // seconds either side of the frame
    double self_strike_radius = 2.0;  // meters

    void validate() const {
        if (!(radius > self_strike_radius) || !(self_strike_radius >= 0.0) || !(time_window >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "submap spec requires radius > self_strike_radius >= 0, time_window >= 0");
        }
    }
};

struct Submap {
    LabeledCloud cloud;                       // sensor frame at the frame time
    std::vector<std::size_t> source_indices;  // indices into the global cloud
    Pose sensor_pose;
};

/**
 * Points within `radius` of the sensor at t, observed within +-time_window of
 * t, and farther than `self_strike_radius` from the carrier at their own
 * observation time. The result is expressed in the sensor frame at t.
 */
inline Submap extract_submap(const LabeledCloud& global, double t, std::span<const Pose> trajectory,
                             const SubmapSpec& spec = {}, std::vector<std::string>* warnings = nullptr) {
    spec.validate();
    if (global.times.size() != global.points.size()) {
        throw Error(ErrorCode::LengthMismatch, "submap extraction needs per-point timestamps");
    }
    Submap out;
    out.sensor_pose = pose_at(trajectory, t);
    const Vec3 centre = out.sensor_pose.position;
    for (std::size_t i = 0; i < global.size(); ++i) {
        const Vec3& p = global.points[i];
        if ((p - centre).norm() > spec.radius) continue;
        if (std::abs(global.times[i] - t) > spec.time_window) continue;
        if ((p - pose_at(trajectory, global.times[i]).position).norm() < spec.self_strike_radius) continue;
        out.source_indices.push_back(i);
    }
    out.cloud = global.select(out.source_indices);
    const Rigid sensor = out.sensor_pose.transform();
    for (auto& p : out.cloud.points) p = sensor.apply_inverse(p);
    if (out.cloud.empty() && warnings) warnings->push_back("EmptySubmap: no points survive at t=" + std::to_string(t));
    return out;
}

}  // namespace semfuse::labeltransfer

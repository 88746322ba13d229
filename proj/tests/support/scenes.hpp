#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "semfuse/core/camera.hpp"
#include "semfuse/core/histogram.hpp"
#include "semfuse/core/ontology.hpp"
#include "semfuse/core/pose.hpp"
#include "semfuse/core/raster.hpp"
#include "semfuse/dataio/calibration.hpp"
#include "semfuse/dataio/cloud_io.hpp"
#include "semfuse/dataio/histogram_csv.hpp"
#include "semfuse/dataio/png_io.hpp"
#include "semfuse/dataio/poses_csv.hpp"
#include "semfuse/dataio/sequence.hpp"

namespace semfuse::testing {

namespace fs = std::filesystem;

// Class indices used by the scenes.
inline constexpr std::uint8_t kBush = 0, kDirt = 1, kGrass = 3, kSky = 10, kFoliage = 12, kTrunk = 13;

/// Camera in the sensor body frame (x forward, y left, z up): optical axis
/// along body x, image right along -y, image down along -z.
inline Rigid forward_camera_extrinsic(const Vec3& offset = Vec3(0.10, 0.0, 0.05)) {
    Eigen::Matrix3d r;
    r.col(0) = Vec3(0, -1, 0);
    r.col(1) = Vec3(0, 0, -1);
    r.col(2) = Vec3(1, 0, 0);
    return Rigid{offset, Quat(r)};
}

inline Quat yaw_quat(double yaw) { return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())); }

inline CameraModel standard_camera() {
    CameraModel cam;
    cam.fx = 200;
    cam.fy = 200;
    cam.cx = 160;
    cam.cy = 120;
    cam.width = 320;
    cam.height = 240;
    cam.extrinsic = forward_camera_extrinsic();
    return cam;
}

/// Oracle camera for a body at `pos` heading along world +y, built from the
/// geometry directly rather than from the pose chain.
inline LookAtCamera oracle_camera_facing_y(const Vec3& body_pos, const Vec3& offset = Vec3(0.10, 0.0, 0.05)) {
    // Body x = world +y, body y = world -x, body z = world z.
    const V3 eye = body_pos + V3(-offset.y(), offset.x(), offset.z());
    return look_at(eye, eye + V3::UnitY());
}

/// Three-frame walk past a back wall, a floating board and a tilted slab.
struct SequenceScene {
    std::vector<Rect> surfaces;
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<double> times;
    std::vector<std::uint8_t> point_surface;
    Trajectory trajectory;
    CameraModel camera;
    std::vector<std::string> stems;
    std::vector<double> frame_times;
    std::vector<OracleFrame> frames;
    std::vector<LabelRaster> rasters;
};

namespace detail {

inline bool near_pixel_edge(double x, double tol) {
    const double f = x - std::floor(x);
    return f < tol || f > 1.0 - tol;
}

/// Angle between ray eye->p and the outline of `r`, measured where the ray
/// crosses r's plane in front of p; negative when the crossing is inside r.
/// +inf when the ray does not cross the plane between eye and p.
inline double silhouette_angle(const Rect& r, const V3& eye, const V3& p) {
    const V3 n = r.normal();
    const V3 d = p - eye;
    const double denom = n.dot(d);
    if (std::abs(denom) < 1e-12) return std::numeric_limits<double>::infinity();
    const double t = n.dot(r.origin - eye) / denom;
    if (t <= 0 || t >= 1) return std::numeric_limits<double>::infinity();
    const V3 hit = eye + t * d - r.origin;
    const double a = hit.dot(r.e1.normalized()), la = r.e1.norm();
    const double b = hit.dot(r.e2.normalized()), lb = r.e2.norm();
    const double outside_a = std::max(-a, a - la), outside_b = std::max(-b, b - lb);
    const double dist = (outside_a < 0 && outside_b < 0) ? std::max(outside_a, outside_b)
                                                         : std::hypot(std::max(outside_a, 0.0), std::max(outside_b, 0.0));
    return dist / (t * d.norm());
}

}  // namespace detail

/**
 * Points are kept only where the visibility answer is clear-cut in every
 * frame: well clear of every occluder outline (visibility operators blur
 * silhouettes outward) and off pixel boundaries.
 */
inline SequenceScene make_sequence_scene(double outer_margin = 0.2, double inner_margin = 0.03) {
    SequenceScene s;
    s.camera = standard_camera();
    const Rect wall_low{V3(-10.013, 12.0, 0.011), V3(22.0, 0, 0), V3(0, 0, 1.25), kBush};
    const Rect wall_high{V3(-10.013, 12.0, 1.511), V3(22.0, 0, 0), V3(0, 0, 2.5), kFoliage};
    const Rect board{V3(-0.693, 6.0, 1.003), V3(2.0, 0, 0), V3(0, 0, 2.0), kTrunk};
    const Rect slab{V3(-4.509, 4.0, -0.3), V3(2.0, 0, 0), V3(0, 1.0, 1.0), kDirt};
    s.surfaces = {wall_low, wall_high, board, slab};

    for (int f = 0; f < 3; ++f) {
        const double t = 100.0 + 0.3 * f;
        s.frame_times.push_back(t);
        s.stems.push_back(dataio::timestamp_stem(t));
    }
    for (int i = 0; i <= 8; ++i) {
        const double t = 100.0 + 0.1 * i;
        s.trajectory.push_back(Pose{t, Vec3(t - 100.0, 0.0, 1.5), yaw_quat(M_PI / 2)});
    }
    for (double t : s.frame_times) {
        s.frames.push_back({oracle_camera_facing_y(Vec3(t - 100.0, 0.0, 1.5)), {}});
    }

    struct Patch {
        const Rect* rect;
        int na, nb;
        V3 normal;
    };
    const std::vector<Patch> patches = {{&wall_low, 89, 6, V3(0, -1, 0)},
                                        {&wall_high, 89, 11, V3(0, -1, 0)},
                                        {&board, 11, 11, V3(0, -1, 0)},
                                        {&slab, 11, 8, V3(0, -1, 1).normalized()}};
    for (std::size_t pi = 0; pi < patches.size(); ++pi) {
        for (const V3& p0 : patches[pi].rect->grid(patches[pi].na, patches[pi].nb)) {
            // Stored as float32 on disk; the oracle sees the same rounded point.
            const V3 p(static_cast<float>(p0.x()), static_cast<float>(p0.y()), static_cast<float>(p0.z()));
            bool clear = true;
            for (const auto& f : s.frames) {
                for (std::size_t o = 0; o < s.surfaces.size(); ++o) {
                    if (o == pi) continue;
                    const double a = detail::silhouette_angle(s.surfaces[o], f.camera.eye, p);
                    if (a > -inner_margin && a < outer_margin) clear = false;
                }
                const V3 c = f.camera.to_camera(p);
                if (c.z() > 0) {
                    const double u = f.camera.fx * c.x() / c.z() + f.camera.cx;
                    const double v = f.camera.fy * c.y() / c.z() + f.camera.cy;
                    if (detail::near_pixel_edge(u, 1e-3) || detail::near_pixel_edge(v, 1e-3)) clear = false;
                }
            }
            if (!clear) continue;
            s.points.push_back(p);
            s.normals.push_back(patches[pi].normal);
            s.point_surface.push_back(static_cast<std::uint8_t>(pi));
            s.times.push_back(100.0 + 0.4 * (pi % 3));
        }
    }

    for (auto& f : s.frames) {
        f.labels = render_labels(f.camera, s.surfaces, kSky);
        for (int v = 0; v < 8; ++v) {
            for (int u = 0; u < f.camera.width; ++u) f.labels[static_cast<std::size_t>(v) * f.camera.width + u] = 255;
        }
        LabelRaster r(f.camera.width, f.camera.height);
        r.data = f.labels;
        s.rasters.push_back(std::move(r));
    }
    return s;
}

inline void write_sequence(const fs::path& dir, const SequenceScene& s) {
    const dataio::SequenceLayout layout(dir);
    dataio::write_poses_csv(layout.poses_csv(), s.trajectory);
    dataio::write_calibration(layout.calibration_yaml(), s.camera);
    std::vector<float> intensity(s.points.size());
    for (std::size_t i = 0; i < intensity.size(); ++i) intensity[i] = static_cast<float>(s.point_surface[i]) * 0.25f;
    dataio::write_cloud_bin(layout.global_cloud(), s.points, intensity);
    dataio::write_times_file(layout.global_times(), s.times);
    for (std::size_t f = 0; f < s.stems.size(); ++f) {
        dataio::write_index_label_png(layout.index_label(s.stems[f]), s.rasters[f]);
        dataio::write_gray8_png(layout.image(s.stems[f]), s.rasters[f]);
    }
}

/// Oracle output for a scene: kept points, their histograms and modes.
struct OracleTransfer {
    std::vector<std::size_t> kept;
    HistogramArray histograms;
    std::vector<ClassIndex> modes;
};

inline OracleTransfer oracle_transfer(const SequenceScene& s, double min_range = 2.0, double max_range = 45.0, double slack_deg = 10.0) {
    const auto hist = oracle_histograms(s.points, s.normals, s.frames, s.surfaces, 15, min_range, max_range, slack_deg);
    OracleTransfer out;
    out.histograms = HistogramArray(0, 15);
    for (std::size_t i = 0; i < hist.size(); ++i) {
        std::uint64_t sum = 0;
        for (auto c : hist[i]) sum += c;
        if (sum == 0) continue;
        out.kept.push_back(i);
        out.histograms.append_row(hist[i]);
        out.modes.push_back(oracle_mode(hist[i]));
    }
    return out;
}

}  // namespace semfuse::testing

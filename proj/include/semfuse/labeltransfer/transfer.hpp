#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "semfuse/core/camera.hpp"
#include "semfuse/core/cloud.hpp"
#include "semfuse/core/histogram.hpp"
#include "semfuse/core/ontology.hpp"
#include "semfuse/core/raster.hpp"
#include "semfuse/visibility/ghpr.hpp"
#include "semfuse/visibility/normals.hpp"

namespace semfuse::labeltransfer {

/// One annotated image: where the sensor body was, the camera, and the labels.
struct CameraFrame {
    std::string stem;
    Pose body_pose;  // world <- sensor body at capture time
    CameraModel camera;
    LabelRaster labels;

    Rigid camera_pose() const { return camera.camera_pose(body_pose); }
};

/// Builds frames for the given image stems / timestamps, looking up each pose
/// exactly on the trajectory.
inline std::vector<CameraFrame> build_frames(std::span<const std::string> stems, std::span<const double> times,
                                             std::span<const Pose> trajectory, const CameraModel& camera,
                                             std::vector<LabelRaster> rasters,
                                             double sync_tolerance = kDefaultSyncTolerance) {
    if (stems.size() != times.size() || stems.size() != rasters.size()) {
        throw Error(ErrorCode::LengthMismatch, "stems, times and rasters differ in length");
    }
    std::vector<CameraFrame> frames;
    frames.reserve(stems.size());
    for (std::size_t i = 0; i < stems.size(); ++i) {
        CameraFrame f;
        f.stem = stems[i];
        try {
            f.body_pose = pose_at(trajectory, times[i], PoseLookup::Exact, sync_tolerance);
        } catch (const Error&) {
            throw Error(ErrorCode::FrameWithoutPose, "no pose for frame " + stems[i]);
        }
        f.camera = camera;
        f.labels = std::move(rasters[i]);
        frames.push_back(std::move(f));
    }
    return frames;
}

struct TransferConfig {
    visibility::GhprConfig ghpr;
    double facing_slack_deg = visibility::kDefaultFacingSlackDeg;
    unsigned threads = 1;
    std::size_t num_classes = 15;
};

struct FrameStats {
    std::string stem;
    std::size_t in_range = 0;
    std::size_t in_image = 0;
    std::size_t facing = 0;
    std::size_t visible = 0;
    std::size_t labelled = 0;
};

struct TransferReport {
    std::size_t input_points = 0;
    std::size_t output_points = 0;
    std::size_t dropped_points = 0;
    std::uint64_t total_hits = 0;
    std::vector<std::uint64_t> class_hits;
    std::vector<FrameStats> frames;
};

struct TransferResult {
    LabeledCloud cloud;                     // kept points with histograms and modes
    std::vector<std::size_t> kept_indices;  // into the input cloud
    HistogramArray full_histograms;         // one row per input point, before dropping
    TransferReport report;
};

/**
 * Adds one frame's votes into `hist`: range filter around the camera centre,
 * projection into the image, facing check, GHPR visibility, then the label of
 * the pixel each visible point falls in. Ignore pixels add nothing.
 */
inline FrameStats accumulate_frame(std::span<const Vec3> points, const visibility::NormalField& normals,
                                   const CameraFrame& frame, const TransferConfig& cfg, HistogramArray& hist) {
    FrameStats stats;
    stats.stem = frame.stem;
    const Rigid cam_pose = frame.camera_pose();
    const Vec3 centre = cam_pose.translation;
    const auto& cam = frame.camera;
    if (frame.labels.width != cam.width || frame.labels.height != cam.height) {
        throw Error(ErrorCode::ShapeMismatch, "label raster size differs from camera size for frame " + frame.stem);
    }

    std::vector<std::size_t> candidates;
    std::vector<Pixel> pixels;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = (points[i] - centre).norm();
        if (d < cfg.ghpr.min_range || d > cfg.ghpr.max_range) continue;
        ++stats.in_range;
        const auto px = project(world_to_camera(points[i], cam_pose), cam);
        if (!px || !cam.contains(px->u, px->v)) continue;
        ++stats.in_image;
        if (!visibility::facing_check(points[i], normals.normals[i], centre, cfg.facing_slack_deg)) continue;
        ++stats.facing;
        candidates.push_back(i);
        pixels.push_back(*px);
    }

    std::vector<Vec3> subset(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) subset[k] = points[candidates[k]];
    const auto vis = visibility::ghpr_visible(subset, centre, cfg.ghpr);
    stats.visible = vis.visible.size();

    for (std::size_t k : vis.visible) {
        const int u = std::min(cam.width - 1, static_cast<int>(std::floor(pixels[k].u)));
        const int v = std::min(cam.height - 1, static_cast<int>(std::floor(pixels[k].v)));
        const ClassIndex label = frame.labels.at(u, v);
        if (label == kIgnoreLabel) continue;
        if (label >= cfg.num_classes) {
            throw Error(ErrorCode::UnknownClassIndex, "label " + std::to_string(label) + " in frame " + frame.stem);
        }
        ++hist(candidates[k], label);
        ++stats.labelled;
    }
    return stats;
}

/// Modes and point dropping over accumulated histograms.
inline TransferResult finalize_transfer(const LabeledCloud& cloud, HistogramArray hist, std::vector<FrameStats> stats) {
    TransferResult result;
    result.report.input_points = cloud.size();
    result.report.class_hits.assign(hist.num_classes(), 0);
    for (std::size_t i = 0; i < hist.rows(); ++i) {
        std::uint64_t sum = 0;
        for (std::size_t c = 0; c < hist.num_classes(); ++c) {
            result.report.class_hits[c] += hist(i, c);
            sum += hist(i, c);
        }
        if (sum > 0) result.kept_indices.push_back(i);
        result.report.total_hits += sum;
    }
    result.cloud = cloud.select(result.kept_indices);
    result.cloud.histograms = hist.select(result.kept_indices);
    result.cloud.modes = histogram_modes(*result.cloud.histograms);
    result.full_histograms = std::move(hist);
    result.report.output_points = result.kept_indices.size();
    result.report.dropped_points = cloud.size() - result.kept_indices.size();
    result.report.frames = std::move(stats);
    return result;
}

/**
 * Transfers 2D labels from every frame onto the cloud. Frames are split over
 * `cfg.threads` workers that each own a partial histogram array; the partials
 * are summed with merge_histograms, so the output does not depend on the
 * thread count or on frame order.
 */
inline TransferResult transfer_labels(const LabeledCloud& cloud, const visibility::NormalField& normals,
                                      std::span<const CameraFrame> frames, const TransferConfig& cfg = {}) {
    if (frames.empty()) throw Error(ErrorCode::NoFrames, "label transfer needs at least one frame");
    if (normals.size() != cloud.size()) throw Error(ErrorCode::LengthMismatch, "normal field/cloud size differ");
    cfg.ghpr.validate();

    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(frames.size())));
    std::vector<HistogramArray> partial(workers, HistogramArray(cloud.size(), cfg.num_classes));
    std::vector<FrameStats> stats(frames.size());
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            for (std::size_t f = w; f < frames.size(); f += workers) {
                stats[f] = accumulate_frame(cloud.points, normals, frames[f], cfg, partial[w]);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return finalize_transfer(cloud, merge_histograms(partial), std::move(stats));
}

/// Convenience overload that estimates normals on the cloud first.
inline TransferResult transfer_labels(const LabeledCloud& cloud, std::span<const Pose> trajectory,
                                      std::span<const CameraFrame> frames, const TransferConfig& cfg = {},
                                      visibility::NormalConfig normal_cfg = {}) {
    normal_cfg.threads = cfg.threads;
    const auto normals = visibility::estimate_normals(cloud, trajectory, normal_cfg);
    return transfer_labels(cloud, normals, frames, cfg);
}

}  // namespace semfuse::labeltransfer

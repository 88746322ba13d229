#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "semfuse/core/cloud.hpp"
#include "semfuse/core/error.hpp"
#include "semfuse/core/pose.hpp"
#include "semfuse/visibility/kdtree.hpp"

namespace semfuse::visibility {

struct NormalConfig {
    std::size_t k = 10;
    /// A neighbourhood has no dominant plane when the two smallest covariance
    /// eigenvalues are this close: lambda0 > ratio * lambda1.
    double max_flatness_ratio = 0.9;
    /// Collinear (or coincident) neighbourhood: lambda1 <= eps * lambda2.
    double collinear_eps = 1e-9;
    unsigned threads = 1;
};

/// Per-point unit normals; std::nullopt marks a degenerate neighbourhood.
struct NormalField {
    std::vector<std::optional<Vec3>> normals;
    /// Surface variation lambda0 / (lambda0 + lambda1 + lambda2); 0 for degenerate points.
    std::vector<double> quality;

    std::size_t size() const { return normals.size(); }
    std::size_t valid_count() const {
        return static_cast<std::size_t>(std::count_if(normals.begin(), normals.end(), [](const auto& n) { return n.has_value(); }));
    }
};

struct LocalNormal {
    std::optional<Vec3> normal;
    double quality = 0.0;
};

/// PCA normal of a neighbourhood, unoriented.
inline LocalNormal fit_normal(std::span<const Vec3> points, std::span<const std::size_t> neighbours, const NormalConfig& cfg) {
    Vec3 mean = Vec3::Zero();
    for (std::size_t j : neighbours) mean += points[j];
    mean /= static_cast<double>(neighbours.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t j : neighbours) {
        const Vec3 d = points[j] - mean;
        cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(neighbours.size());

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    const Vec3 lambda = solver.eigenvalues().cwiseMax(0.0);  // ascending
    const double sum = lambda.sum();
    LocalNormal out;
    if (!(sum > 0.0) || lambda[1] <= cfg.collinear_eps * lambda[2] || lambda[0] > cfg.max_flatness_ratio * lambda[1]) {
        return out;
    }
    out.quality = lambda[0] / sum;
    out.normal = solver.eigenvectors().col(0).normalized();
    return out;
}

/**
 * Estimates normals from the covariance of each point's k nearest neighbours
 * (the point included) and orients each towards the sensor position at the
 * time the point was first observed.
 */
inline NormalField estimate_normals(std::span<const Vec3> points, std::span<const double> times,
                                    std::span<const Pose> trajectory, const NormalConfig& cfg = {}) {
    if (cfg.k < 3) throw Error(ErrorCode::InvalidArgument, "normal estimation needs k >= 3");
    if (points.size() < cfg.k) {
        throw Error(ErrorCode::InsufficientPoints,
                    std::to_string(points.size()) + " points, need at least k=" + std::to_string(cfg.k));
    }
    if (times.size() != points.size()) throw Error(ErrorCode::LengthMismatch, "times/points length differ");

    const KdTree tree(points);
    NormalField field;
    field.normals.resize(points.size());
    field.quality.assign(points.size(), 0.0);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto nn = tree.knn(points[i], cfg.k);
            LocalNormal local = fit_normal(points, nn, cfg);
            if (local.normal) {
                const Vec3 observer = pose_at(trajectory, times[i]).position;
                if (local.normal->dot(observer - points[i]) < 0.0) *local.normal = -*local.normal;
            }
            field.normals[i] = local.normal;
            field.quality[i] = local.quality;
        }
    };

    const unsigned threads = std::max(1u, cfg.threads);
    if (threads == 1) {
        work(0, points.size());
    } else {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(threads);
        const std::size_t chunk = (points.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t b = std::min(points.size(), t * chunk), e = std::min(points.size(), b + chunk);
            pool.emplace_back([&, t, b, e] {
                try {
                    work(b, e);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }
    return field;
}

inline NormalField estimate_normals(const LabeledCloud& cloud, std::span<const Pose> trajectory, const NormalConfig& cfg = {}) {
    return estimate_normals(cloud.points, cloud.times, trajectory, cfg);
}

inline constexpr double kDefaultFacingSlackDeg = 10.0;

/// True when the angle between the normal and the direction to the viewpoint
/// is at most 90 deg + slack. Points without a valid normal pass.
inline bool facing_check(const Vec3& point, const std::optional<Vec3>& normal, const Vec3& viewpoint,
                         double slack_deg = kDefaultFacingSlackDeg) {
    if (!normal) return true;
    const Vec3 ray = viewpoint - point;
    const double len = ray.norm() * normal->norm();
    if (len == 0.0) return true;
    const double cos_angle = normal->dot(ray) / len;
    const double limit = -std::sin(slack_deg * M_PI / 180.0);  // cos(90 deg + slack)
    return cos_angle >= limit;
}

}  // namespace semfuse::visibility

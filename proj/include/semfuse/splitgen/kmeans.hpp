#pragma once

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "semfuse/core/error.hpp"
#include "semfuse/splitgen/rng.hpp"

namespace semfuse::splitgen {

struct KMeansResult {
    std::vector<std::size_t> labels;
    std::vector<Eigen::Vector2d> centers;
    std::size_t iterations = 0;
    double initial_sse = 0.0;  // SSE of the assignment to the seeds
    double sse = 0.0;
};

inline constexpr std::size_t kKMeansMaxIterations = 300;

namespace detail {

inline std::size_t nearest_center(const Eigen::Vector2d& p, std::span<const Eigen::Vector2d> centers, double* d2_out = nullptr) {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centers.size(); ++k) {
        const double d2 = (p - centers[k]).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = k;
        }
    }
    if (d2_out) *d2_out = best_d2;
    return best;
}

}  // namespace detail

inline double within_cluster_sse(std::span<const Eigen::Vector2d> xy, std::span<const std::size_t> labels,
                                 std::span<const Eigen::Vector2d> centers) {
    double sse = 0.0;
    for (std::size_t i = 0; i < xy.size(); ++i) sse += (xy[i] - centers[labels[i]]).squaredNorm();
    return sse;
}

/**
 * Lloyd's algorithm on planar positions, seeded k-means++ style: the first
 * centre is drawn uniformly, each further centre with probability
 * proportional to the squared distance to the nearest chosen centre.
 * Stops when no assignment changes or after 300 iterations.
 */
inline KMeansResult kmeans_chunks(std::span<const Eigen::Vector2d> xy, std::size_t k, std::uint64_t seed) {
    const std::size_t n = xy.size();
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k-means needs K >= 1");
    if (n < k) throw Error(ErrorCode::TooFewSamples, std::to_string(n) + " samples for K=" + std::to_string(k));

    Rng rng(seed, 0x6b6d65616e73ull);
    KMeansResult out;
    std::vector<char> chosen(n, 0);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t first = rng.below(n);
    out.centers.push_back(xy[first]);
    chosen[first] = 1;
    while (out.centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], (xy[i] - out.centers.back()).squaredNorm());
            if (!chosen[i]) total += d2[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i] || d2[i] == 0.0) continue;
                acc += d2[i];
                pick = i;
                if (acc > target) break;
            }
        }
        if (pick == n) {  // every remaining point duplicates a centre
            for (std::size_t i = 0; i < n && pick == n; ++i) {
                if (!chosen[i]) pick = i;
            }
        }
        chosen[pick] = 1;
        out.centers.push_back(xy[pick]);
    }

    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.labels[i] = detail::nearest_center(xy[i], out.centers);
    out.initial_sse = within_cluster_sse(xy, out.labels, out.centers);

    std::vector<Eigen::Vector2d> sums(k);
    std::vector<std::size_t> counts(k);
    for (out.iterations = 0; out.iterations < kKMeansMaxIterations; ++out.iterations) {
        std::fill(sums.begin(), sums.end(), Eigen::Vector2d::Zero());
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[out.labels[i]] += xy[i];
            ++counts[out.labels[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) out.centers[c] = sums[c] / static_cast<double>(counts[c]);
        }
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t l = detail::nearest_center(xy[i], out.centers);
            if (l != out.labels[i]) {
                out.labels[i] = l;
                changed = true;
            }
        }
        if (!changed) break;
    }
    out.sse = within_cluster_sse(xy, out.labels, out.centers);
    return out;
}

}  // namespace semfuse::splitgen

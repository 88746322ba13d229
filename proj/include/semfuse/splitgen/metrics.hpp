#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "semfuse/splitgen/split.hpp"

namespace semfuse::splitgen {

struct SplitMetrics {
    double ld = 0.0;  // label distribution (total variation)
    double if_ = 0.0; // inverse-frequency weighted total variation
    double kl = 0.0;  // KL divergence of each set against the whole
    double sc = 0.0;  // silhouette coefficient of the sets in the plane
};

inline constexpr double kKlSmoothing = 1e-9;

struct Divergences {
    double ld = 0.0;
    double if_ = 0.0;
    double kl = 0.0;
};

/**
 * Class-distribution divergences of each set against the distribution over
 * all non-buffer samples (q), summed over train/val/test:
 *   LD = sum_s 1/2 sum_c |p_s(c) - q(c)|
 *   IF = sum_s 1/2 sum_c |p_s(c) - q(c)| / q(c)     (classes with q(c) = 0 skipped)
 *   KL = sum_s sum_c p_s(c) ln(p_s(c) / q(c))        (0 ln 0 = 0; q(c) = 0 replaced by 1e-9)
 */
inline Divergences divergence_metrics(const Assignment& assignment, const SampleTable& table) {
    const auto totals = set_class_totals(assignment, table);
    const std::size_t nc = table.num_classes();
    std::vector<double> global(nc, 0.0);
    double global_sum = 0.0;
    std::array<double, kNumSets> set_sum{};
    for (std::size_t s = 0; s < kNumSets; ++s) {
        for (std::size_t c = 0; c < nc; ++c) {
            global[c] += static_cast<double>(totals[s][c]);
            set_sum[s] += static_cast<double>(totals[s][c]);
        }
        if (set_sum[s] == 0.0) throw Error(ErrorCode::EmptySet, std::string(to_string(static_cast<SplitSet>(s))) + " set is empty");
        global_sum += set_sum[s];
    }
    std::vector<double> q(nc);
    for (std::size_t c = 0; c < nc; ++c) q[c] = global[c] / global_sum;

    Divergences d;
    for (std::size_t s = 0; s < kNumSets; ++s) {
        double tv = 0.0, wtv = 0.0, kl = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            const double p = static_cast<double>(totals[s][c]) / set_sum[s];
            const double diff = std::abs(p - q[c]);
            tv += diff;
            if (q[c] > 0.0) wtv += diff / q[c];
            if (p > 0.0) kl += p * std::log(p / (q[c] > 0.0 ? q[c] : kKlSmoothing));
        }
        d.ld += 0.5 * tv;
        d.if_ += 0.5 * wtv;
        d.kl += kl;
    }
    return d;
}

inline double metric_LD(const Assignment& a, const SampleTable& t) { return divergence_metrics(a, t).ld; }
inline double metric_IF(const Assignment& a, const SampleTable& t) { return divergence_metrics(a, t).if_; }
inline double metric_KL(const Assignment& a, const SampleTable& t) { return divergence_metrics(a, t).kl; }

namespace detail {

inline std::array<std::size_t, kNumSets> set_sizes(const Assignment& assignment) {
    std::array<std::size_t, kNumSets> n{};
    for (auto s : assignment) {
        if (s != SplitSet::Buffer) ++n[static_cast<std::size_t>(s)];
    }
    for (std::size_t s = 0; s < kNumSets; ++s) {
        if (n[s] == 0) throw Error(ErrorCode::EmptySet, std::string(to_string(static_cast<SplitSet>(s))) + " set is empty");
        if (n[s] < 2) throw Error(ErrorCode::SingletonSet, std::string(to_string(static_cast<SplitSet>(s))) + " set has one sample");
    }
    return n;
}

/// Silhouette of sample i given the summed distances from i to each set.
inline double silhouette_term(std::size_t own, const std::array<double, kNumSets>& sums, const std::array<std::size_t, kNumSets>& n) {
    const double a = sums[own] / static_cast<double>(n[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < kNumSets; ++s) {
        if (s != own) b = std::min(b, sums[s] / static_cast<double>(n[s]));
    }
    const double m = std::max(a, b);
    return m > 0.0 ? (b - a) / m : 0.0;
}

}  // namespace detail

/// Silhouette coefficient over planar distances with train/val/test as the
/// clusters; buffer samples take no part.
inline double metric_SC(const Assignment& assignment, std::span<const Eigen::Vector2d> xy) {
    const auto n = detail::set_sizes(assignment);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < xy.size(); ++i) {
        if (assignment[i] == SplitSet::Buffer) continue;
        std::array<double, kNumSets> sums{};
        for (std::size_t j = 0; j < xy.size(); ++j) {
            if (j == i || assignment[j] == SplitSet::Buffer) continue;
            sums[static_cast<std::size_t>(assignment[j])] += (xy[i] - xy[j]).norm();
        }
        total += detail::silhouette_term(static_cast<std::size_t>(assignment[i]), sums, n);
        ++count;
    }
    return total / static_cast<double>(count);
}

/**
 * Silhouette for many candidate splits that share one chunking. Distances
 * from every sample to every chunk are summed once; a candidate then only
 * subtracts distances to its buffered samples.
 */
class ChunkedSilhouette {
public:
    ChunkedSilhouette(std::span<const Eigen::Vector2d> xy, const ChunkInfo& chunks)
        : xy_(xy), chunks_(chunks), sums_(xy.size() * chunks.num_chunks, 0.0) {
        const std::size_t k = chunks.num_chunks;
        for (std::size_t i = 0; i < xy.size(); ++i) {
            for (std::size_t j = i + 1; j < xy.size(); ++j) {
                const double d = (xy[i] - xy[j]).norm();
                sums_[i * k + chunks.labels[j]] += d;
                sums_[j * k + chunks.labels[i]] += d;
            }
        }
    }

    /// `assignment` must be chunk-consistent apart from buffered samples.
    double operator()(const Assignment& assignment) const {
        const auto n = detail::set_sizes(assignment);
        const std::size_t k = chunks_.num_chunks;
        std::vector<SplitSet> chunk_set(k, SplitSet::Buffer);
        std::vector<std::size_t> buffered;
        for (std::size_t i = 0; i < xy_.size(); ++i) {
            if (assignment[i] == SplitSet::Buffer) {
                buffered.push_back(i);
            } else {
                chunk_set[chunks_.labels[i]] = assignment[i];
            }
        }
        // Set of the chunk each buffered sample belonged to before buffering.
        std::vector<SplitSet> origin(buffered.size(), SplitSet::Buffer);
        for (std::size_t b = 0; b < buffered.size(); ++b) origin[b] = chunk_set[chunks_.labels[buffered[b]]];

        double total = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < xy_.size(); ++i) {
            if (assignment[i] == SplitSet::Buffer) continue;
            std::array<double, kNumSets> s{};
            const double* row = &sums_[i * k];
            for (std::size_t c = 0; c < k; ++c) {
                if (chunk_set[c] != SplitSet::Buffer) s[static_cast<std::size_t>(chunk_set[c])] += row[c];
            }
            for (std::size_t b = 0; b < buffered.size(); ++b) {
                if (origin[b] != SplitSet::Buffer) s[static_cast<std::size_t>(origin[b])] -= (xy_[i] - xy_[buffered[b]]).norm();
            }
            total += detail::silhouette_term(static_cast<std::size_t>(assignment[i]), s, n);
            ++count;
        }
        return total / static_cast<double>(count);
    }

private:
    std::span<const Eigen::Vector2d> xy_;
    const ChunkInfo& chunks_;
    std::vector<double> sums_;
};

}  // namespace semfuse::splitgen

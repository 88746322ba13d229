#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "semfuse/core/error.hpp"
#include "semfuse/splitgen/rng.hpp"
#include "semfuse/splitgen/samples.hpp"

namespace semfuse::splitgen {

enum class SplitSet : std::uint8_t { Train = 0, Val = 1, Test = 2, Buffer = 3 };

inline constexpr std::size_t kNumSets = 3;  // train, val, test

inline std::string_view to_string(SplitSet s) {
    switch (s) {
        case SplitSet::Train: return "train";
        case SplitSet::Val: return "val";
        case SplitSet::Test: return "test";
        case SplitSet::Buffer: return "buffer";
    }
    return "?";
}

inline SplitSet parse_split_set(std::string_view s) {
    if (s == "train") return SplitSet::Train;
    if (s == "val") return SplitSet::Val;
    if (s == "test") return SplitSet::Test;
    if (s == "buffer") return SplitSet::Buffer;
    throw Error(ErrorCode::InvalidArgument, "unknown split set '" + std::string(s) + "'");
}

using Assignment = std::vector<SplitSet>;

struct SplitWeights {
    double ld = 1.0;
    double if_ = 1.0;
    double kl = 1.0;
    double sc = 2.0;
};

struct SplitConfig {
    std::array<double, kNumSets> ratios = {0.70, 0.05, 0.25};
    double buffer_dist = 45.0;
    std::size_t k = 50;
    std::size_t num_candidates = 1000;
    std::size_t max_attempts_factor = 50;
    SplitWeights weights;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    void validate() const {
        const double sum = ratios[0] + ratios[1] + ratios[2];
        if (std::abs(sum - 1.0) > 1e-9 || ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0) {
            throw Error(ErrorCode::InvalidArgument, "split ratios must be non-negative and sum to 1");
        }
        if (k < 3) throw Error(ErrorCode::InvalidArgument, "split generation needs K >= 3");
        if (num_candidates < 1) throw Error(ErrorCode::InvalidArgument, "need at least one candidate");
        if (!(buffer_dist >= 0.0)) throw Error(ErrorCode::InvalidArgument, "buffer distance must be >= 0");
    }
};

/// Uniform grid over planar positions for fixed-radius neighbour queries.
class PlanarGrid {
public:
    PlanarGrid(std::span<const Eigen::Vector2d> xy, double cell) : xy_(xy), cell_(cell > 0.0 ? cell : 1.0) {
        for (std::size_t i = 0; i < xy.size(); ++i) cells_[key(cell_of(xy[i]))].push_back(i);
    }

    template <typename Fn>
    void for_each_within(std::size_t i, double radius, Fn&& fn) const {
        const auto c = cell_of(xy_[i]);
        const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
        const double r2 = radius * radius;
        for (std::int64_t dx = -reach; dx <= reach; ++dx) {
            for (std::int64_t dy = -reach; dy <= reach; ++dy) {
                auto it = cells_.find(key({c[0] + dx, c[1] + dy}));
                if (it == cells_.end()) continue;
                for (std::size_t j : it->second) {
                    if (j != i && (xy_[j] - xy_[i]).squaredNorm() < r2) fn(j);
                }
            }
        }
    }

private:
    std::array<std::int64_t, 2> cell_of(const Eigen::Vector2d& p) const {
        return {static_cast<std::int64_t>(std::floor(p.x() / cell_)), static_cast<std::int64_t>(std::floor(p.y() / cell_))};
    }
    static std::uint64_t key(const std::array<std::int64_t, 2>& c) {
        return splitmix64(static_cast<std::uint64_t>(c[0]) * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(c[1]));
    }

    std::span<const Eigen::Vector2d> xy_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

/**
 * Moves every sample that lies closer than `buffer_dist` to a sample of a
 * different (non-buffer) set into the buffer. Both members of a violating pair
 * move; the pass repeats until nothing changes.
 */
inline void apply_buffer(Assignment& assignment, std::span<const Eigen::Vector2d> xy, double buffer_dist,
                         const PlanarGrid* grid = nullptr) {
    if (buffer_dist <= 0.0) return;
    std::optional<PlanarGrid> own;
    if (!grid) grid = &own.emplace(xy, buffer_dist);
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::size_t> moved;
        for (std::size_t i = 0; i < xy.size(); ++i) {
            if (assignment[i] == SplitSet::Buffer) continue;
            bool violates = false;
            grid->for_each_within(i, buffer_dist, [&](std::size_t j) {
                if (assignment[j] != SplitSet::Buffer && assignment[j] != assignment[i]) violates = true;
            });
            if (violates) moved.push_back(i);
        }
        for (std::size_t i : moved) assignment[i] = SplitSet::Buffer;
        changed = !moved.empty();
    }
}

/// Smallest planar distance between samples of two different non-buffer sets.
inline double min_cross_set_distance(const Assignment& assignment, std::span<const Eigen::Vector2d> xy) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xy.size(); ++i) {
        if (assignment[i] == SplitSet::Buffer) continue;
        for (std::size_t j = i + 1; j < xy.size(); ++j) {
            if (assignment[j] == SplitSet::Buffer || assignment[j] == assignment[i]) continue;
            best = std::min(best, (xy[i] - xy[j]).norm());
        }
    }
    return best;
}

/// Per-set class totals (train, val, test); buffer samples excluded.
inline std::array<std::vector<std::uint64_t>, kNumSets> set_class_totals(const Assignment& assignment, const SampleTable& table) {
    std::array<std::vector<std::uint64_t>, kNumSets> totals;
    for (auto& t : totals) t.assign(table.num_classes(), 0);
    for (std::size_t i = 0; i < table.samples.size(); ++i) {
        if (assignment[i] == SplitSet::Buffer) continue;
        auto& dst = totals[static_cast<std::size_t>(assignment[i])];
        const auto& counts = table.samples[i].class_counts;
        for (std::size_t c = 0; c < counts.size(); ++c) dst[c] += counts[c];
    }
    return totals;
}

/// Classes with a positive count somewhere in the table.
inline std::vector<std::size_t> present_classes(const SampleTable& table) {
    std::vector<std::uint64_t> totals(table.num_classes(), 0);
    for (const auto& s : table.samples) {
        for (std::size_t c = 0; c < totals.size(); ++c) totals[c] += s.class_counts[c];
    }
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < totals.size(); ++c) {
        if (totals[c] > 0) out.push_back(c);
    }
    return out;
}

struct ChunkInfo {
    std::vector<std::size_t> labels;  // chunk id per sample
    std::size_t num_chunks = 0;
};

/**
 * Random candidate split. Chunks are visited in random order and each goes to
 * train/val/test with probability proportional to the set's remaining sample
 * deficit against its target ratio (the ratios themselves once every target
 * is met). Buffering follows; the candidate is rejected (std::nullopt) when
 * any set is empty or lacks one of `required_classes`.
 */
inline std::optional<Assignment> generate_candidate(const SampleTable& table, std::span<const Eigen::Vector2d> xy,
                                                    const ChunkInfo& chunks, const SplitConfig& cfg, Rng& rng,
                                                    std::span<const std::size_t> required_classes,
                                                    const PlanarGrid* grid = nullptr) {
    const std::size_t n = table.samples.size();
    std::vector<std::size_t> mass(chunks.num_chunks, 0);
    for (std::size_t l : chunks.labels) ++mass[l];
    std::vector<std::size_t> order(chunks.num_chunks);
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    rng.shuffle(order.begin(), order.end());

    std::vector<SplitSet> chunk_set(chunks.num_chunks, SplitSet::Train);
    std::array<double, kNumSets> assigned{};
    for (std::size_t c : order) {
        std::array<double, kNumSets> w{};
        double total = 0.0;
        for (std::size_t s = 0; s < kNumSets; ++s) {
            w[s] = std::max(0.0, cfg.ratios[s] * static_cast<double>(n) - assigned[s]);
            total += w[s];
        }
        if (total <= 0.0) {
            w = cfg.ratios;
            total = 1.0;
        }
        const double u = rng.uniform() * total;
        std::size_t pick = 0;
        double acc = w[0];
        while (pick + 1 < kNumSets && (u >= acc || w[pick] == 0.0)) acc += w[++pick];
        chunk_set[c] = static_cast<SplitSet>(pick);
        assigned[pick] += static_cast<double>(mass[c]);
    }

    Assignment assignment(n);
    for (std::size_t i = 0; i < n; ++i) assignment[i] = chunk_set[chunks.labels[i]];
    apply_buffer(assignment, xy, cfg.buffer_dist, grid);

    const auto totals = set_class_totals(assignment, table);
    std::array<std::size_t, kNumSets> members{};
    for (auto s : assignment) {
        if (s != SplitSet::Buffer) ++members[static_cast<std::size_t>(s)];
    }
    for (std::size_t s = 0; s < kNumSets; ++s) {
        if (members[s] == 0) return std::nullopt;
        for (std::size_t c : required_classes) {
            if (totals[s][c] == 0) return std::nullopt;
        }
    }
    return assignment;
}

}  // namespace semfuse::splitgen

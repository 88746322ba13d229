#pragma once

#include <cmath>
#include <exception>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "semfuse/splitgen/kmeans.hpp"
#include "semfuse/splitgen/metrics.hpp"
#include "semfuse/splitgen/split.hpp"

namespace semfuse::splitgen {

struct ScoreResult {
    std::vector<double> scores;
    std::array<std::vector<double>, 4> z;  // ld, if, kl, sc
    std::size_t best = 0;
};

inline constexpr double kSigmaGuard = 1e-12;

/// z-scores of one metric across candidates (population standard deviation);
/// a metric with spread below 1e-12 contributes zero.
inline std::vector<double> z_normalize(std::span<const double> values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sigma = std::sqrt(var / n);
    std::vector<double> z(values.size(), 0.0);
    if (sigma > kSigmaGuard) {
        for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - mean) / sigma;
    }
    return z;
}

/**
 * S = w_LD z_LD + w_IF z_IF + w_KL z_KL - w_SC z_SC over the candidate set;
 * the best candidate has the lowest S (first index on ties).
 */
inline ScoreResult score_candidates(std::span<const SplitMetrics> metrics, const SplitWeights& w = {}) {
    if (metrics.empty()) throw Error(ErrorCode::NoValidCandidates, "no accepted candidate splits");
    ScoreResult out;
    std::array<std::vector<double>, 4> raw;
    for (const auto& m : metrics) {
        raw[0].push_back(m.ld);
        raw[1].push_back(m.if_);
        raw[2].push_back(m.kl);
        raw[3].push_back(m.sc);
    }
    for (std::size_t k = 0; k < 4; ++k) out.z[k] = z_normalize(raw[k]);
    out.scores.resize(metrics.size());
    for (std::size_t r = 0; r < metrics.size(); ++r) {
        out.scores[r] = w.ld * out.z[0][r] + w.if_ * out.z[1][r] + w.kl * out.z[2][r] - w.sc * out.z[3][r];
        if (out.scores[r] < out.scores[out.best]) out.best = r;
    }
    return out;
}

struct Candidate {
    std::size_t attempt = 0;
    Assignment assignment;
    SplitMetrics metrics;
};

struct SplitResult {
    Assignment assignment;
    SplitMetrics metrics;
    double score = 0.0;
    std::size_t best_candidate = 0;
    std::vector<Candidate> candidates;
    std::vector<double> scores;
    ChunkInfo chunks;
    std::size_t attempts = 0;
    SplitConfig config;
};

/**
 * Full split search: k-means chunking of the sample positions, rejection
 * sampling of candidates (until `num_candidates` are accepted or
 * max_attempts_factor * num_candidates attempts), metric evaluation, and
 * selection of the minimum-score candidate. Attempt r draws from its own
 * stream Rng(seed, r), so the result does not depend on `threads`.
 */
inline SplitResult optimize_split(const SampleTable& table, const SplitConfig& cfg) {
    cfg.validate();
    const auto xy = table.positions();
    const auto km = kmeans_chunks(xy, cfg.k, cfg.seed);
    SplitResult result;
    result.config = cfg;
    result.chunks = {km.labels, cfg.k};
    const auto required = present_classes(table);
    const PlanarGrid grid(xy, cfg.buffer_dist);
    const ChunkedSilhouette silhouette(xy, result.chunks);

    auto attempt = [&](std::size_t r) -> std::optional<Candidate> {
        Rng rng(cfg.seed, r + 1);
        auto a = generate_candidate(table, xy, result.chunks, cfg, rng, required, &grid);
        if (!a) return std::nullopt;
        const auto n = [&] {
            std::array<std::size_t, kNumSets> c{};
            for (auto s : *a) {
                if (s != SplitSet::Buffer) ++c[static_cast<std::size_t>(s)];
            }
            return c;
        }();
        if (n[0] < 2 || n[1] < 2 || n[2] < 2) return std::nullopt;
        Candidate c;
        c.attempt = r;
        const auto d = divergence_metrics(*a, table);
        c.metrics = {d.ld, d.if_, d.kl, silhouette(*a)};
        c.assignment = std::move(*a);
        return c;
    };

    const std::size_t max_attempts = cfg.max_attempts_factor * cfg.num_candidates;
    const unsigned threads = std::max(1u, cfg.threads);
    std::size_t next = 0;
    while (result.candidates.size() < cfg.num_candidates && next < max_attempts) {
        const std::size_t want = cfg.num_candidates - result.candidates.size();
        const std::size_t batch = std::min(max_attempts - next, std::max<std::size_t>(want, threads));
        std::vector<std::optional<Candidate>> out(batch);
        if (threads == 1) {
            for (std::size_t b = 0; b < batch; ++b) out[b] = attempt(next + b);
        } else {
            std::vector<std::exception_ptr> errors(threads);
            {
                std::vector<std::jthread> pool;
                for (unsigned t = 0; t < threads; ++t) {
                    pool.emplace_back([&, t] {
                        try {
                            for (std::size_t b = t; b < batch; b += threads) out[b] = attempt(next + b);
                        } catch (...) {
                            errors[t] = std::current_exception();
                        }
                    });
                }
            }
            for (auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }
        for (std::size_t b = 0; b < batch; ++b) {
            if (out[b] && result.candidates.size() < cfg.num_candidates) result.candidates.push_back(std::move(*out[b]));
        }
        next += batch;
    }
    result.attempts = result.candidates.size() == cfg.num_candidates ? result.candidates.back().attempt + 1 : next;

    std::vector<SplitMetrics> metrics;
    for (const auto& c : result.candidates) metrics.push_back(c.metrics);
    const auto scored = score_candidates(metrics, cfg.weights);
    result.scores = scored.scores;
    result.best_candidate = scored.best;
    result.assignment = result.candidates[scored.best].assignment;
    result.metrics = result.candidates[scored.best].metrics;
    result.score = scored.scores[scored.best];
    return result;
}

/// Fraction of non-buffer samples in train/val/test.
inline std::array<double, kNumSets> achieved_ratios(const Assignment& a) {
    std::array<double, kNumSets> r{};
    double total = 0.0;
    for (auto s : a) {
        if (s == SplitSet::Buffer) continue;
        r[static_cast<std::size_t>(s)] += 1.0;
        total += 1.0;
    }
    for (auto& v : r) v = total > 0 ? v / total : 0.0;
    return r;
}

}  // namespace semfuse::splitgen

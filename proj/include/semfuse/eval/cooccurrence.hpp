#pragma once

#include <span>
#include <vector>

#include "semfuse/core/histogram.hpp"

namespace semfuse::eval {

enum class CooccurrenceWeighting {
    PerPoint,  // each point adds its normalized histogram once
    Mass,      // each point adds its raw counts
};

/// Row a: mean label composition of the histograms of points whose mode is a.
struct CooccurrenceMatrix {
    std::size_t num_classes = 0;
    std::vector<double> m;              // row-major C x C
    std::vector<std::uint64_t> support;  // points per row

    double operator()(std::size_t row, std::size_t col) const { return m[row * num_classes + col]; }
};

inline CooccurrenceMatrix cooccurrence(const HistogramArray& histograms, std::span<const ClassIndex> modes,
                                       CooccurrenceWeighting weighting = CooccurrenceWeighting::PerPoint) {
    if (modes.size() != histograms.rows()) throw Error(ErrorCode::LengthMismatch, "modes/histograms length differ");
    const std::size_t nc = histograms.num_classes();
    CooccurrenceMatrix out{nc, std::vector<double>(nc * nc, 0.0), std::vector<std::uint64_t>(nc, 0)};
    for (std::size_t i = 0; i < histograms.rows(); ++i) {
        const auto row = histograms.row(i);
        const double sum = static_cast<double>(histograms.row_sum(i));
        if (sum == 0.0) throw Error(ErrorCode::ZeroHistogram, "point " + std::to_string(i) + " has an empty histogram");
        const ClassIndex a = modes[i];
        if (a >= nc || row[a] != row[histogram_mode(row)]) {
            throw Error(ErrorCode::InvalidArgument, "mode of point " + std::to_string(i) + " is not a histogram maximum");
        }
        ++out.support[a];
        double* dst = &out.m[a * nc];
        const double scale = weighting == CooccurrenceWeighting::PerPoint ? 1.0 / sum : 1.0;
        for (std::size_t c = 0; c < nc; ++c) dst[c] += static_cast<double>(row[c]) * scale;
    }
    for (std::size_t a = 0; a < nc; ++a) {
        if (out.support[a] == 0) continue;
        double norm = 0.0;
        if (weighting == CooccurrenceWeighting::PerPoint) {
            norm = static_cast<double>(out.support[a]);
        } else {
            for (std::size_t c = 0; c < nc; ++c) norm += out.m[a * nc + c];
        }
        for (std::size_t c = 0; c < nc; ++c) out.m[a * nc + c] /= norm;
    }
    return out;
}

inline CooccurrenceMatrix cooccurrence(const HistogramArray& histograms,
                                       CooccurrenceWeighting weighting = CooccurrenceWeighting::PerPoint) {
    const auto modes = histogram_modes(histograms);
    return cooccurrence(histograms, modes, weighting);
}

/// Mean of the diagonal over rows with support.
inline double diagonal_mean(const CooccurrenceMatrix& cm) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t a = 0; a < cm.num_classes; ++a) {
        if (cm.support[a] == 0) continue;
        sum += cm(a, a);
        ++n;
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace semfuse::eval

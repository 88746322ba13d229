#pragma once

#include <optional>
#include <span>
#include <vector>

#include "semfuse/core/error.hpp"
#include "semfuse/core/histogram.hpp"
#include "semfuse/core/pose.hpp"

namespace semfuse {

/// Points with first-observation times and, once labelled, per-point
/// histograms and mode labels.
struct LabeledCloud {
    std::vector<Vec3> points;
    std::vector<double> times;
    std::vector<float> intensity;  // empty when the source carries none
    std::optional<HistogramArray> histograms;
    std::optional<std::vector<ClassIndex>> modes;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    void validate() const {
        if (times.size() != points.size()) throw Error(ErrorCode::LengthMismatch, "times/points length differ");
        if (!intensity.empty() && intensity.size() != points.size()) {
            throw Error(ErrorCode::LengthMismatch, "intensity/points length differ");
        }
        if (histograms && histograms->rows() != points.size()) {
            throw Error(ErrorCode::LengthMismatch, "histogram rows/points differ");
        }
        if (modes) {
            if (modes->size() != points.size()) throw Error(ErrorCode::LengthMismatch, "modes/points differ");
            if (histograms) {
                for (std::size_t i = 0; i < points.size(); ++i) {
                    if ((*modes)[i] != histogram_mode(histograms->row(i))) {
                        throw Error(ErrorCode::InvalidArgument, "mode disagrees with histogram at point " + std::to_string(i));
                    }
                }
            }
        }
    }

    /// Subset in the given index order; optional channels follow the points.
    LabeledCloud select(std::span<const std::size_t> indices) const {
        LabeledCloud out;
        out.points.reserve(indices.size());
        out.times.reserve(indices.size());
        for (std::size_t i : indices) {
            out.points.push_back(points[i]);
            if (!times.empty()) out.times.push_back(times[i]);
            if (!intensity.empty()) out.intensity.push_back(intensity[i]);
        }
        if (histograms) out.histograms = histograms->select(indices);
        if (modes) {
            out.modes.emplace();
            out.modes->reserve(indices.size());
            for (std::size_t i : indices) out.modes->push_back((*modes)[i]);
        }
        return out;
    }
};

}  // namespace semfuse

#pragma once

#include <filesystem>
#include <vector>

#include "semfuse/core/cloud.hpp"
#include "semfuse/core/ontology.hpp"
#include "semfuse/dataio/binary.hpp"

namespace semfuse::dataio {

/// Point record layout of a .bin scan. XYZI is the SemanticKITTI layout.
enum class BinLayout { XYZI, XYZ };

inline std::size_t floats_per_record(BinLayout layout) { return layout == BinLayout::XYZI ? 4 : 3; }

struct PointScan {
    std::vector<Vec3> points;
    std::vector<float> intensity;  // empty for the XYZ layout
};

inline PointScan decode_cloud_bin(std::span<const char> bytes, BinLayout layout = BinLayout::XYZI) {
    const std::size_t record = floats_per_record(layout) * sizeof(float);
    if (bytes.size() % record != 0) {
        throw Error(ErrorCode::MalformedBin,
                    std::to_string(bytes.size()) + " bytes is not a multiple of the " + std::to_string(record) + "-byte record");
    }
    const auto floats = decode_le<float>(bytes);
    const std::size_t stride = floats_per_record(layout);
    const std::size_t n = floats.size() / stride;
    PointScan scan;
    scan.points.reserve(n);
    if (layout == BinLayout::XYZI) scan.intensity.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const float* r = floats.data() + i * stride;
        scan.points.emplace_back(r[0], r[1], r[2]);
        if (layout == BinLayout::XYZI) scan.intensity.push_back(r[3]);
    }
    return scan;
}

inline PointScan read_cloud_bin(const fs::path& path, BinLayout layout = BinLayout::XYZI) {
    const auto bytes = read_file_bytes(path);
    try {
        return decode_cloud_bin(bytes, layout);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

/// Coordinates are narrowed to float32. Missing intensity is written as 0.
inline void write_cloud_bin(const fs::path& path, std::span<const Vec3> points, std::span<const float> intensity = {},
                            BinLayout layout = BinLayout::XYZI) {
    if (!intensity.empty() && intensity.size() != points.size()) {
        throw Error(ErrorCode::LengthMismatch, "intensity/points length differ");
    }
    const std::size_t stride = floats_per_record(layout);
    std::vector<float> floats(points.size() * stride);
    for (std::size_t i = 0; i < points.size(); ++i) {
        float* r = floats.data() + i * stride;
        r[0] = static_cast<float>(points[i].x());
        r[1] = static_cast<float>(points[i].y());
        r[2] = static_cast<float>(points[i].z());
        if (layout == BinLayout::XYZI) r[3] = intensity.empty() ? 0.0f : intensity[i];
    }
    write_file_bytes(path, encode_le<float>(floats));
}

/// .label files: one little-endian uint32 per point.
inline std::vector<ClassIndex> read_label_file(const fs::path& path) {
    const auto bytes = read_file_bytes(path);
    if (bytes.size() % sizeof(std::uint32_t) != 0) {
        throw Error(ErrorCode::MalformedLabel, path.string() + ": length " + std::to_string(bytes.size()) + " not divisible by 4");
    }
    return decode_le<std::uint32_t>(bytes);
}

/// Reads a .label file and maps raw indices into the evaluation index space.
inline std::vector<ClassIndex> read_label_file(const fs::path& path, const ClassOntology& ontology) {
    return ontology.merge_raw(read_label_file(path));
}

inline void write_label_file(const fs::path& path, std::span<const ClassIndex> labels) {
    write_file_bytes(path, encode_le<std::uint32_t>(labels));
}

/// Per-point timestamp sidecar: one little-endian float64 per point.
inline std::vector<double> read_times_file(const fs::path& path) {
    const auto bytes = read_file_bytes(path);
    if (bytes.size() % sizeof(double) != 0) {
        throw Error(ErrorCode::MalformedBin, path.string() + ": length not divisible by 8");
    }
    return decode_le<double>(bytes);
}

inline void write_times_file(const fs::path& path, std::span<const double> times) {
    write_file_bytes(path, encode_le<double>(times));
}

}  // namespace semfuse::dataio

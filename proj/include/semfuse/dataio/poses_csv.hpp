#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "semfuse/core/pose.hpp"
#include "semfuse/dataio/csv.hpp"

namespace semfuse::dataio {

inline constexpr std::array<std::string_view, 8> kPoseColumns = {"timestamp", "x", "y", "z", "qx", "qy", "qz", "qw"};

/**
 * Parses a trajectory CSV with header columns timestamp,x,y,z,qx,qy,qz,qw
 * (any column order, extra columns ignored). Rows are sorted by timestamp;
 * a warning is appended when the input was out of order.
 */
inline Trajectory parse_poses_csv(std::string_view text, std::vector<std::string>* warnings = nullptr) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw Error(ErrorCode::MissingColumn, "poses CSV has no header row");
    std::array<std::size_t, kPoseColumns.size()> col{};
    for (std::size_t k = 0; k < kPoseColumns.size(); ++k) {
        const auto& header = rows.front();
        auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) { return trim(h) == kPoseColumns[k]; });
        if (it == header.end()) throw Error(ErrorCode::MissingColumn, "poses CSV lacks column '" + std::string(kPoseColumns[k]) + "'");
        col[k] = static_cast<std::size_t>(it - header.begin());
    }
    const std::size_t needed = *std::max_element(col.begin(), col.end()) + 1;

    Trajectory poses;
    poses.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() < needed) throw Error(ErrorCode::MissingColumn, "poses CSV row " + std::to_string(r) + " is short");
        std::array<double, kPoseColumns.size()> v{};
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = parse_double(row[col[k]]);
        Pose p;
        p.t = v[0];
        p.position = Vec3(v[1], v[2], v[3]);
        p.orientation = normalized_quaternion(v[4], v[5], v[6], v[7]);
        poses.push_back(p);
    }
    const auto by_time = [](const Pose& a, const Pose& b) { return a.t < b.t; };
    if (!std::is_sorted(poses.begin(), poses.end(), by_time)) {
        if (warnings) warnings->push_back("poses CSV rows were not in timestamp order; sorted");
        std::stable_sort(poses.begin(), poses.end(), by_time);
    }
    for (std::size_t i = 1; i < poses.size(); ++i) {
        if (poses[i].t == poses[i - 1].t) {
            throw Error(ErrorCode::DuplicateTimestamp, "duplicate pose timestamp " + format_double(poses[i].t));
        }
    }
    return poses;
}

inline Trajectory read_poses_csv(const fs::path& path, std::vector<std::string>* warnings = nullptr) {
    return parse_poses_csv(read_text_file(path), warnings);
}

inline void write_poses_csv(const fs::path& path, std::span<const Pose> poses) {
    std::string out = "timestamp,x,y,z,qx,qy,qz,qw";
    out += kCsvEol;
    for (const auto& p : poses) {
        const double vals[] = {p.t, p.position.x(), p.position.y(), p.position.z(),
                               p.orientation.x(), p.orientation.y(), p.orientation.z(), p.orientation.w()};
        for (std::size_t k = 0; k < 8; ++k) {
            if (k) out += ',';
            out += format_double(vals[k]);
        }
        out += kCsvEol;
    }
    write_text_file(path, out);
}

}  // namespace semfuse::dataio

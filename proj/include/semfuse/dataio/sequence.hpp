#pragma once

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "semfuse/dataio/csv.hpp"

namespace semfuse::dataio {

/// Directory layout of one recorded sequence. All per-frame files are named by
/// a decimal timestamp stem shared between 2D and 3D correspondences.
struct SequenceLayout {
    fs::path root;

    explicit SequenceLayout(fs::path dir) : root(std::move(dir)) {}

    fs::path image_dir() const { return root / "image"; }
    fs::path index_label_dir() const { return root / "indexLabel"; }
    fs::path palette_label_dir() const { return root / "label"; }
    fs::path clouds_dir() const { return root / "Clouds"; }
    fs::path labels_dir() const { return root / "Labels"; }
    fs::path hists_dir() const { return root / "Hists"; }
    fs::path times_dir() const { return root / "Times"; }
    fs::path poses_csv() const { return root / "poses.csv"; }
    fs::path calibration_yaml() const { return root / "camera_calibration.yaml"; }

    /// Global map consumed by label transfer (world frame) and its per-point times.
    fs::path global_cloud() const { return root / "global_map.bin"; }
    fs::path global_times() const { return root / "global_map.times"; }

    fs::path image(const std::string& stem) const { return image_dir() / (stem + ".png"); }
    fs::path index_label(const std::string& stem) const { return index_label_dir() / (stem + ".png"); }
    fs::path cloud(const std::string& stem) const { return clouds_dir() / (stem + ".bin"); }
    fs::path label(const std::string& stem) const { return labels_dir() / (stem + ".label"); }
    fs::path hist(const std::string& stem) const { return hists_dir() / (stem + ".csv"); }
    fs::path times(const std::string& stem) const { return times_dir() / (stem + ".times"); }
};

/// Sorted stems of the files in `dir` with the given extension (".png" etc.).
inline std::vector<std::string> list_stems(const fs::path& dir, const std::string& extension) {
    std::vector<std::string> stems;
    if (!fs::is_directory(dir)) return stems;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == extension) stems.push_back(entry.path().stem().string());
    }
    std::sort(stems.begin(), stems.end());
    return stems;
}

/// Timestamp encoded in a file stem.
inline double stem_timestamp(const std::string& stem) { return parse_double(stem); }

/// Fixed six-decimal stem for a timestamp (microsecond resolution).
inline std::string timestamp_stem(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", t);
    return buf;
}

}  // namespace semfuse::dataio

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "semfuse/core/ontology.hpp"
#include "semfuse/core/pose.hpp"
#include "semfuse/dataio/calibration.hpp"
#include "semfuse/dataio/cloud_io.hpp"
#include "semfuse/dataio/histogram_csv.hpp"
#include "semfuse/dataio/png_io.hpp"
#include "semfuse/dataio/poses_csv.hpp"
#include "semfuse/dataio/sequence.hpp"

namespace semfuse::cli {

namespace fs = std::filesystem;

struct Violation {
    std::string kind;  // "stem mismatch", "point count mismatch", ...
    std::string file;
    std::string message;
};

struct SequenceCheck {
    fs::path root;
    std::size_t images = 0;
    std::size_t index_labels = 0;
    std::size_t clouds = 0;
    std::size_t labels = 0;
    std::size_t hists = 0;
    std::size_t poses = 0;
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::size_t file_size_or_zero(const fs::path& p) {
    std::error_code ec;
    const auto n = fs::file_size(p, ec);
    return ec ? 0 : static_cast<std::size_t>(n);
}

inline void check_pairing(const std::string& what_a, const std::vector<std::string>& a, const std::string& what_b,
                          const std::vector<std::string>& b, std::vector<Violation>& out) {
    const std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    for (const auto& s : sa) {
        if (!sb.count(s)) out.push_back({"stem mismatch", what_a + "/" + s, "no matching file in " + what_b});
    }
    for (const auto& s : sb) {
        if (!sa.count(s)) out.push_back({"stem mismatch", what_b + "/" + s, "no matching file in " + what_a});
    }
}

inline bool is_timestamp_stem(const std::string& s) {
    try {
        dataio::stem_timestamp(s);
        return true;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace detail

/// Checks a sequence directory against the file-format contracts. Every
/// violation is reported; nothing throws for bad content.
inline SequenceCheck validate_sequence(const fs::path& root, double sync_tolerance = kDefaultSyncTolerance) {
    const dataio::SequenceLayout layout(root);
    const auto ontology = ClassOntology::standard();
    SequenceCheck check;
    check.root = root;
    auto& v = check.violations;
    if (!fs::is_directory(root)) {
        v.push_back({"missing directory", root.string(), "sequence directory does not exist"});
        return check;
    }

    const auto images = dataio::list_stems(layout.image_dir(), ".png");
    const auto index_labels = dataio::list_stems(layout.index_label_dir(), ".png");
    const auto clouds = dataio::list_stems(layout.clouds_dir(), ".bin");
    const auto labels = dataio::list_stems(layout.labels_dir(), ".label");
    const auto hists = dataio::list_stems(layout.hists_dir(), ".csv");
    check.images = images.size();
    check.index_labels = index_labels.size();
    check.clouds = clouds.size();
    check.labels = labels.size();
    check.hists = hists.size();

    if (fs::is_directory(layout.image_dir())) detail::check_pairing("image", images, "indexLabel", index_labels, v);
    if (fs::is_directory(layout.labels_dir())) detail::check_pairing("Clouds", clouds, "Labels", labels, v);
    if (fs::is_directory(layout.hists_dir())) detail::check_pairing("Clouds", clouds, "Hists", hists, v);

    // Point records.
    const std::set<std::string> label_set(labels.begin(), labels.end()), hist_set(hists.begin(), hists.end());
    for (const auto& stem : clouds) {
        const auto bin = layout.cloud(stem);
        const std::size_t bytes = detail::file_size_or_zero(bin);
        if (bytes % 16 != 0) {
            v.push_back({"truncated file", bin.string(), std::to_string(bytes) + " bytes is not a whole number of 16-byte records"});
            continue;
        }
        const std::size_t points = bytes / 16;
        if (label_set.count(stem)) {
            const auto lbl = layout.label(stem);
            const std::size_t lbytes = detail::file_size_or_zero(lbl);
            if (lbytes % 4 != 0) {
                v.push_back({"truncated file", lbl.string(), std::to_string(lbytes) + " bytes is not a whole number of 4-byte records"});
            } else if (lbytes / 4 != points) {
                v.push_back({"point count mismatch", lbl.string(),
                             std::to_string(lbytes / 4) + " labels for " + std::to_string(points) + " points"});
            } else {
                for (ClassIndex c : dataio::read_label_file(lbl)) {
                    if (c != kIgnoreLabel && !ontology.is_valid_eval(c)) {
                        v.push_back({"invalid label value", lbl.string(), "class index " + std::to_string(c)});
                        break;
                    }
                }
            }
        }
        if (hist_set.count(stem)) {
            const auto hp = layout.hist(stem);
            try {
                const auto table = dataio::read_histogram_csv(hp);
                if (table.histograms.rows() != points) {
                    v.push_back({"point count mismatch", hp.string(),
                                 std::to_string(table.histograms.rows()) + " histogram rows for " + std::to_string(points) + " points"});
                }
            } catch (const Error& e) {
                v.push_back({"malformed histogram", hp.string(), e.what()});
            }
        }
    }

    // Label images.
    for (const auto& stem : index_labels) {
        try {
            dataio::read_index_label_png(layout.index_label(stem), ontology);
        } catch (const Error& e) {
            v.push_back({"unreadable label image", layout.index_label(stem).string(), e.what()});
        }
    }

    // Calibration.
    if (!fs::exists(layout.calibration_yaml())) {
        v.push_back({"calibration unreadable", layout.calibration_yaml().string(), "file missing"});
    } else {
        try {
            dataio::read_calibration(layout.calibration_yaml());
        } catch (const Error& e) {
            v.push_back({"calibration unreadable", layout.calibration_yaml().string(), e.what()});
        }
    }

    // Pose coverage of every timestamped stem.
    Trajectory trajectory;
    bool have_poses = false;
    if (!fs::exists(layout.poses_csv())) {
        v.push_back({"poses unreadable", layout.poses_csv().string(), "file missing"});
    } else {
        try {
            trajectory = dataio::read_poses_csv(layout.poses_csv());
            have_poses = true;
        } catch (const Error& e) {
            v.push_back({"poses unreadable", layout.poses_csv().string(), e.what()});
        }
    }
    check.poses = trajectory.size();
    if (have_poses) {
        std::set<std::string> stems(images.begin(), images.end());
        stems.insert(index_labels.begin(), index_labels.end());
        stems.insert(clouds.begin(), clouds.end());
        for (const auto& stem : stems) {
            if (!detail::is_timestamp_stem(stem)) continue;
            try {
                pose_at(trajectory, dataio::stem_timestamp(stem), PoseLookup::Exact, sync_tolerance);
            } catch (const Error&) {
                v.push_back({"no pose for timestamp", stem, "no pose within " + dataio::format_double(sync_tolerance) + " s"});
            }
        }
    }

    // Global map and its times sidecar.
    if (fs::exists(layout.global_cloud())) {
        const std::size_t bytes = detail::file_size_or_zero(layout.global_cloud());
        if (bytes % 16 != 0) {
            v.push_back({"truncated file", layout.global_cloud().string(), std::to_string(bytes) + " bytes is not a whole number of 16-byte records"});
        } else if (fs::exists(layout.global_times())) {
            const std::size_t tbytes = detail::file_size_or_zero(layout.global_times());
            if (tbytes % 8 != 0) {
                v.push_back({"truncated file", layout.global_times().string(), std::to_string(tbytes) + " bytes is not a whole number of 8-byte records"});
            } else if (tbytes / 8 != bytes / 16) {
                v.push_back({"point count mismatch", layout.global_times().string(),
                             std::to_string(tbytes / 8) + " times for " + std::to_string(bytes / 16) + " points"});
            }
        }
    }
    return check;
}

}  // namespace semfuse::cli

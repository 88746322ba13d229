#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "semfuse/cli/validate.hpp"
#include "semfuse/core/ontology.hpp"
#include "semfuse/dataio/calibration.hpp"
#include "semfuse/dataio/cloud_io.hpp"
#include "semfuse/dataio/histogram_csv.hpp"
#include "semfuse/dataio/png_io.hpp"
#include "semfuse/dataio/poses_csv.hpp"
#include "semfuse/dataio/sequence.hpp"
#include "semfuse/eval/confusion.hpp"
#include "semfuse/eval/cooccurrence.hpp"
#include "semfuse/labeltransfer/sampling.hpp"
#include "semfuse/labeltransfer/transfer.hpp"
#include "semfuse/splitgen/domain.hpp"
#include "semfuse/splitgen/optimizer.hpp"
#include "semfuse/splitgen/samples.hpp"
#include "semfuse/visibility/normals.hpp"

namespace semfuse::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr const char* kLogLevelEnv = "SEMFUSE_LOG_LEVEL";

/// Everything a subcommand may read. Flags, config-file keys and defaults all land here.
struct RunConfig {
    std::string subcommand;
    std::string report_path;
    std::string log_level;
    unsigned threads = 1;

    // inputs / outputs
    std::string sequence;
    std::string poses;
    std::string cloud;
    std::string times;
    std::string samples;
    std::string split;
    std::string gt;
    std::string pred;
    std::string hists;
    std::string out;

    visibility::GhprConfig ghpr;
    double facing_slack_deg = visibility::kDefaultFacingSlackDeg;
    std::size_t normal_k = visibility::NormalConfig{}.k;
    labeltransfer::FrameSampleRule sample_rule;
    labeltransfer::SubmapSpec submap;
    std::string transfer_mode = "global";
    std::string frames_from = "auto";

    splitgen::SplitConfig split_cfg;
    std::vector<double> ratios = {0.70, 0.05, 0.25};

    std::string domain_tag = "season";
    std::vector<std::string> train_values;
    std::vector<std::string> test_values;
    std::uint64_t min_class_count = 1;

    std::string iou_policy = "zero";
    bool gt_raw = false;
    std::string weighting = "per-point";
};

namespace detail {

inline json stats_json(const labeltransfer::FrameStats& s) {
    return {{"stem", s.stem}, {"in_range", s.in_range}, {"in_image", s.in_image}, {"facing", s.facing},
            {"visible", s.visible}, {"labelled", s.labelled}};
}

inline void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    dataio::write_text_file(path, text);
}

inline fs::path require_path(const std::string& p, const char* flag) {
    if (p.empty()) throw Error(ErrorCode::InvalidArgument, std::string(flag) + " is required");
    return p;
}

struct Sequence {
    Trajectory trajectory;
    CameraModel camera;
    LabeledCloud cloud;
    std::vector<std::string> stems;
    std::vector<double> stamps;
    std::vector<std::string> warnings;
};

inline Sequence load_sequence(const fs::path& root, bool with_images) {
    const dataio::SequenceLayout layout(root);
    Sequence s;
    s.trajectory = dataio::read_poses_csv(layout.poses_csv(), &s.warnings);
    auto scan = dataio::read_cloud_bin(layout.global_cloud());
    s.cloud.points = std::move(scan.points);
    s.cloud.intensity = std::move(scan.intensity);
    s.cloud.times = dataio::read_times_file(layout.global_times());
    s.cloud.validate();
    if (with_images) {
        s.camera = dataio::read_calibration(layout.calibration_yaml());
        s.stems = dataio::list_stems(layout.index_label_dir(), ".png");
        for (const auto& stem : s.stems) s.stamps.push_back(dataio::stem_timestamp(stem));
    }
    return s;
}

inline void write_labelled(const dataio::SequenceLayout& out, const std::string& stem, const LabeledCloud& cloud,
                           const ClassOntology& ontology) {
    dataio::write_cloud_bin(out.cloud(stem), cloud.points, cloud.intensity);
    dataio::write_label_file(out.label(stem), *cloud.modes);
    dataio::write_histogram_csv(out.hist(stem), *cloud.histograms, ontology.eval2d());
    dataio::write_times_file(out.times(stem), cloud.times);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// subcommands

inline json cmd_sample_frames(const RunConfig& rc, spdlog::logger& log) {
    Trajectory traj;
    std::vector<std::string> warnings;
    if (!rc.poses.empty()) {
        traj = dataio::read_poses_csv(rc.poses, &warnings);
    } else {
        traj = dataio::read_poses_csv(dataio::SequenceLayout(detail::require_path(rc.sequence, "--sequence or --poses")).poses_csv(), &warnings);
    }
    if (rc.sample_rule.distance_step <= 0 || rc.sample_rule.heading_step <= 0) {
        throw Error(ErrorCode::InvalidArgument, "sampling steps must be positive");
    }
    const auto stamps = labeltransfer::sample_frames(traj, rc.sample_rule);
    log.info("{} of {} poses sampled", stamps.size(), traj.size());
    std::vector<std::string> stems;
    for (double t : stamps) stems.push_back(dataio::timestamp_stem(t));
    if (!rc.out.empty()) detail::write_lines(rc.out, stems);
    return {{"poses", traj.size()},
            {"frames", stamps.size()},
            {"distance_step", rc.sample_rule.distance_step},
            {"heading_step", rc.sample_rule.heading_step},
            {"timestamps", stamps},
            {"warnings", warnings}};
}

inline json cmd_extract_submaps(const RunConfig& rc, spdlog::logger& log) {
    const fs::path root = detail::require_path(rc.sequence, "--sequence");
    const fs::path out_root = detail::require_path(rc.out, "--out");
    auto seq = detail::load_sequence(root, false);
    std::vector<double> stamps;
    const auto image_stems = dataio::list_stems(dataio::SequenceLayout(root).index_label_dir(), ".png");
    const bool from_images = rc.frames_from == "images" || (rc.frames_from == "auto" && !image_stems.empty());
    if (from_images) {
        for (const auto& s : image_stems) stamps.push_back(dataio::stem_timestamp(s));
    } else if (rc.frames_from == "sampled" || rc.frames_from == "auto") {
        stamps = labeltransfer::sample_frames(seq.trajectory, rc.sample_rule);
    } else {
        throw Error(ErrorCode::InvalidArgument, "--frames-from must be auto, images or sampled");
    }
    const dataio::SequenceLayout out(out_root);
    json submaps = json::array();
    for (double t : stamps) {
        const auto sm = labeltransfer::extract_submap(seq.cloud, t, seq.trajectory, rc.submap, &seq.warnings);
        const std::string stem = dataio::timestamp_stem(t);
        dataio::write_cloud_bin(out.cloud(stem), sm.cloud.points, sm.cloud.intensity);
        dataio::write_times_file(out.times(stem), sm.cloud.times);
        submaps.push_back({{"stem", stem}, {"points", sm.cloud.size()}});
        log.debug("submap {}: {} points", stem, sm.cloud.size());
    }
    log.info("wrote {} submaps to {}", stamps.size(), out_root.string());
    return {{"submaps", submaps},
            {"radius", rc.submap.radius},
            {"time_window", rc.submap.time_window},
            {"self_strike_radius", rc.submap.self_strike_radius},
            {"warnings", seq.warnings}};
}

inline json cmd_estimate_normals(const RunConfig& rc, spdlog::logger& log) {
    LabeledCloud cloud;
    Trajectory traj;
    std::vector<std::string> warnings;
    if (!rc.cloud.empty()) {
        auto scan = dataio::read_cloud_bin(rc.cloud);
        cloud.points = std::move(scan.points);
        cloud.times = dataio::read_times_file(detail::require_path(rc.times, "--times"));
        traj = dataio::read_poses_csv(detail::require_path(rc.poses, "--poses"), &warnings);
    } else {
        auto seq = detail::load_sequence(detail::require_path(rc.sequence, "--sequence or --cloud"), false);
        cloud = std::move(seq.cloud);
        traj = std::move(seq.trajectory);
        warnings = std::move(seq.warnings);
    }
    visibility::NormalConfig cfg;
    cfg.k = rc.normal_k;
    cfg.threads = rc.threads;
    const auto field = visibility::estimate_normals(cloud, traj, cfg);
    if (!rc.out.empty()) {
        std::string text = "nx,ny,nz,valid,quality";
        text += dataio::kCsvEol;
        for (std::size_t i = 0; i < field.size(); ++i) {
            const Vec3 n = field.normals[i].value_or(Vec3::Zero());
            text += dataio::format_double(n.x()) + "," + dataio::format_double(n.y()) + "," + dataio::format_double(n.z()) +
                    "," + (field.normals[i] ? "1" : "0") + "," + dataio::format_double(field.quality[i]) + dataio::kCsvEol;
        }
        dataio::write_text_file(rc.out, text);
    }
    log.info("{} of {} normals valid", field.valid_count(), field.size());
    return {{"points", field.size()}, {"valid", field.valid_count()}, {"invalid", field.size() - field.valid_count()},
            {"k", cfg.k}, {"warnings", warnings}};
}

inline json cmd_transfer_labels(const RunConfig& rc, spdlog::logger& log) {
    const fs::path root = detail::require_path(rc.sequence, "--sequence");
    const fs::path out_root = detail::require_path(rc.out, "--out");
    if (rc.transfer_mode != "global" && rc.transfer_mode != "submap") {
        throw Error(ErrorCode::InvalidArgument, "--mode must be global or submap");
    }
    const auto ontology = ClassOntology::standard();
    auto seq = detail::load_sequence(root, true);
    const dataio::SequenceLayout in(root);
    std::vector<LabelRaster> rasters;
    for (const auto& stem : seq.stems) rasters.push_back(dataio::read_index_label_png(in.index_label(stem), ontology));
    const auto frames = labeltransfer::build_frames(seq.stems, seq.stamps, seq.trajectory, seq.camera, std::move(rasters));
    log.info("transferring labels from {} frames onto {} points", frames.size(), seq.cloud.size());

    labeltransfer::TransferConfig cfg;
    cfg.ghpr = rc.ghpr;
    cfg.facing_slack_deg = rc.facing_slack_deg;
    cfg.threads = rc.threads;
    cfg.num_classes = ontology.num_classes();
    visibility::NormalConfig ncfg;
    ncfg.k = rc.normal_k;
    const auto result = labeltransfer::transfer_labels(seq.cloud, seq.trajectory, frames, cfg, ncfg);

    const dataio::SequenceLayout out(out_root);
    json outputs = json::array();
    if (rc.transfer_mode == "global") {
        detail::write_labelled(out, "global_map", result.cloud, ontology);
        outputs.push_back({{"stem", "global_map"}, {"points", result.cloud.size()}});
    } else {
        for (std::size_t f = 0; f < frames.size(); ++f) {
            const auto sm = labeltransfer::extract_submap(result.cloud, seq.stamps[f], seq.trajectory, rc.submap, &seq.warnings);
            detail::write_labelled(out, frames[f].stem, sm.cloud, ontology);
            outputs.push_back({{"stem", frames[f].stem}, {"points", sm.cloud.size()}});
        }
    }

    const auto& rep = result.report;
    json class_hits = json::object();
    for (std::size_t c = 0; c < rep.class_hits.size(); ++c) class_hits[ontology.eval_name(static_cast<ClassIndex>(c))] = rep.class_hits[c];
    json per_frame = json::array();
    for (const auto& s : rep.frames) per_frame.push_back(detail::stats_json(s));
    json report = {{"mode", rc.transfer_mode},
                   {"frames", frames.size()},
                   {"input_points", rep.input_points},
                   {"output_points", rep.output_points},
                   {"dropped_points", rep.dropped_points},
                   {"total_hits", rep.total_hits},
                   {"class_hits", class_hits},
                   {"config",
                    {{"gamma", rc.ghpr.gamma},
                     {"min_range", rc.ghpr.min_range},
                     {"max_range", rc.ghpr.max_range},
                     {"slack_deg", rc.facing_slack_deg},
                     {"k", rc.normal_k}}},
                   {"outputs", outputs},
                   {"per_frame", per_frame},
                   {"warnings", seq.warnings}};
    dataio::write_text_file(out_root / "report.json", report.dump(2) + "\n");
    log.info("kept {} points, dropped {}", rep.output_points, rep.dropped_points);
    return report;
}

inline json split_weights_json(const splitgen::SplitWeights& w) {
    return {{"w_LD", w.ld}, {"w_IF", w.if_}, {"w_KL", w.kl}, {"w_SC", w.sc}};
}

inline json split_metrics_json(const splitgen::SplitMetrics& m) {
    return {{"m_LD", m.ld}, {"m_IF", m.if_}, {"m_KL", m.kl}, {"m_SC", m.sc}};
}

inline json cmd_gen_split(const RunConfig& rc, spdlog::logger& log) {
    const auto table = splitgen::read_samples(detail::require_path(rc.samples, "--samples"));
    splitgen::SplitConfig cfg = rc.split_cfg;
    if (rc.ratios.size() != 3) throw Error(ErrorCode::InvalidArgument, "--ratios needs three values");
    cfg.ratios = {rc.ratios[0], rc.ratios[1], rc.ratios[2]};
    cfg.threads = rc.threads;
    log.info("generating {} candidates over {} samples, K={}", cfg.num_candidates, table.samples.size(), cfg.k);
    const auto result = splitgen::optimize_split(table, cfg);
    const auto ratios = splitgen::achieved_ratios(result.assignment);

    std::array<std::vector<std::string>, 4> lists;
    std::array<std::size_t, 4> counts{};
    json assignment = json::array();
    for (std::size_t i = 0; i < table.samples.size(); ++i) {
        const auto set = static_cast<std::size_t>(result.assignment[i]);
        lists[set].push_back(table.samples[i].id);
        ++counts[set];
        assignment.push_back({{"id", table.samples[i].id}, {"set", std::string(splitgen::to_string(result.assignment[i]))}});
    }
    json report = {{"samples", table.samples.size()},
                   {"config",
                    {{"ratios", cfg.ratios},
                     {"buffer_dist", cfg.buffer_dist},
                     {"k", cfg.k},
                     {"num_candidates", cfg.num_candidates},
                     {"max_attempts_factor", cfg.max_attempts_factor},
                     {"seed", cfg.seed},
                     {"weights", split_weights_json(cfg.weights)}}},
                   {"attempts", result.attempts},
                   {"candidates", result.candidates.size()},
                   {"best_candidate", result.best_candidate},
                   {"score", result.score},
                   {"metrics", split_metrics_json(result.metrics)},
                   {"counts", {{"train", counts[0]}, {"val", counts[1]}, {"test", counts[2]}, {"buffer", counts[3]}}},
                   {"achieved_ratios", ratios},
                   {"min_cross_set_distance", splitgen::min_cross_set_distance(result.assignment, table.positions())}};
    if (!rc.out.empty()) {
        const fs::path dir = rc.out;
        json full = report;
        full["assignment"] = assignment;
        dataio::write_text_file(dir / "split.json", full.dump(2) + "\n");
        const char* names[] = {"train", "val", "test", "buffer"};
        for (std::size_t s = 0; s < 4; ++s) detail::write_lines(dir / (std::string(names[s]) + ".txt"), lists[s]);
    }
    log.info("best candidate {} with S={}", result.best_candidate, result.score);
    return report;
}

inline splitgen::Assignment read_split_assignment(const fs::path& path, const splitgen::SampleTable& table) {
    json doc;
    try {
        doc = json::parse(dataio::read_text_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
    }
    if (!doc.contains("assignment")) throw Error(ErrorCode::MissingField, path.string() + ": no assignment");
    std::map<std::string, splitgen::SplitSet> by_id;
    for (const auto& a : doc["assignment"]) {
        by_id[a.at("id").get<std::string>()] = splitgen::parse_split_set(a.at("set").get<std::string>());
    }
    splitgen::Assignment out(table.samples.size());
    for (std::size_t i = 0; i < table.samples.size(); ++i) {
        auto it = by_id.find(table.samples[i].id);
        if (it == by_id.end()) throw Error(ErrorCode::MissingField, "sample " + table.samples[i].id + " missing from split");
        out[i] = it->second;
    }
    return out;
}

inline json cmd_domain_split(const RunConfig& rc, spdlog::logger& log) {
    const auto table = splitgen::read_samples(detail::require_path(rc.samples, "--samples"));
    const auto assignment = read_split_assignment(detail::require_path(rc.split, "--split"), table);
    splitgen::DomainFilter filter;
    filter.tag = splitgen::parse_domain_tag(rc.domain_tag);
    filter.train_values = {rc.train_values.begin(), rc.train_values.end()};
    filter.test_values = {rc.test_values.begin(), rc.test_values.end()};
    filter.min_class_count = rc.min_class_count;
    const auto ds = splitgen::domain_subsplit(assignment, table, filter);
    std::vector<std::string> train, test, flagged;
    for (auto i : ds.train) train.push_back(table.samples[i].id);
    for (auto i : ds.test) test.push_back(table.samples[i].id);
    for (auto c : ds.flagged_classes) flagged.push_back(table.class_names[c]);
    for (const auto& f : flagged) log.warn("class {} under-represented after domain filtering", f);
    json report = {{"tag", rc.domain_tag},
                   {"train_values", rc.train_values},
                   {"test_values", rc.test_values},
                   {"train", train.size()},
                   {"test", test.size()},
                   {"flagged_classes", flagged},
                   {"train_counts", ds.train_counts},
                   {"test_counts", ds.test_counts}};
    if (!rc.out.empty()) {
        const fs::path dir = rc.out;
        detail::write_lines(dir / "train.txt", train);
        detail::write_lines(dir / "test.txt", test);
        dataio::write_text_file(dir / "domain_split.json", report.dump(2) + "\n");
    }
    return report;
}

inline json iou_report(const eval::ConfusionMatrix& cm, std::span<const ClassIndex> subset, const RunConfig& rc,
                       const ClassOntology& ontology) {
    eval::UndefinedIouPolicy policy;
    if (rc.iou_policy == "zero") {
        policy = eval::UndefinedIouPolicy::CountAsZero;
    } else if (rc.iou_policy == "skip") {
        policy = eval::UndefinedIouPolicy::Skip;
    } else {
        throw Error(ErrorCode::InvalidArgument, "--policy must be zero or skip");
    }
    const auto iou = eval::iou_per_class(cm);
    json per_class = json::object();
    std::string csv = "class,iou,tp,fp,fn";
    csv += dataio::kCsvEol;
    for (ClassIndex c : subset) {
        const auto tp = cm(c, c);
        const auto fp = cm.col_sum(c) - tp;
        const auto fn = cm.row_sum(c) - tp;
        const std::string& name = ontology.eval_name(c);
        per_class[name] = iou[c] ? json(*iou[c]) : json(nullptr);
        csv += name + "," + (iou[c] ? dataio::format_double(*iou[c]) : "") + "," + std::to_string(tp) + "," +
               std::to_string(fp) + "," + std::to_string(fn) + dataio::kCsvEol;
    }
    const double m = eval::miou(cm, subset, policy);
    if (!rc.out.empty()) dataio::write_text_file(fs::path(rc.out) / "iou.csv", csv);
    return {{"miou", m}, {"policy", rc.iou_policy}, {"classes", subset.size()}, {"iou", per_class}};
}

inline json cmd_eval_2d(const RunConfig& rc, spdlog::logger& log) {
    const auto ontology = ClassOntology::standard();
    const fs::path gt_dir = detail::require_path(rc.gt, "--gt");
    const fs::path pred_dir = detail::require_path(rc.pred, "--pred");
    const auto stems = dataio::list_stems(gt_dir, ".png");
    if (stems.empty()) throw Error(ErrorCode::IoError, gt_dir.string() + ": no label images");
    eval::ConfusionMatrix cm(ontology.num_classes());
    for (const auto& stem : stems) {
        const auto gt = dataio::read_index_label_png(gt_dir / (stem + ".png"), ontology);
        const auto pred = dataio::read_index_label_png(pred_dir / (stem + ".png"), ontology);
        if (gt.width != pred.width || gt.height != pred.height) {
            throw Error(ErrorCode::ShapeMismatch, stem + ": prediction size differs from ground truth");
        }
        const std::vector<ClassIndex> g(gt.data.begin(), gt.data.end()), p(pred.data.begin(), pred.data.end());
        cm = eval::accumulate_confusion(g, p, std::move(cm));
    }
    log.info("evaluated {} images", stems.size());
    json report = iou_report(cm, ontology.eval2d_indices(), rc, ontology);
    report["images"] = stems.size();
    return report;
}

inline json cmd_eval_3d(const RunConfig& rc, spdlog::logger& log) {
    const auto ontology = ClassOntology::standard();
    const fs::path gt_dir = detail::require_path(rc.gt, "--gt");
    const fs::path pred_dir = detail::require_path(rc.pred, "--pred");
    const auto stems = dataio::list_stems(gt_dir, ".label");
    if (stems.empty()) throw Error(ErrorCode::IoError, gt_dir.string() + ": no .label files");
    eval::ConfusionMatrix cm(ontology.num_classes());
    std::size_t points = 0;
    for (const auto& stem : stems) {
        const auto gt = rc.gt_raw ? dataio::read_label_file(gt_dir / (stem + ".label"), ontology)
                                  : dataio::read_label_file(gt_dir / (stem + ".label"));
        const auto pred = dataio::read_label_file(pred_dir / (stem + ".label"));
        cm = eval::accumulate_confusion(gt, pred, std::move(cm));
        points += gt.size();
    }
    log.info("evaluated {} clouds, {} points", stems.size(), points);
    json report = iou_report(cm, ontology.eval3d_indices(), rc, ontology);
    report["clouds"] = stems.size();
    report["points"] = points;
    return report;
}

inline json cmd_cooccurrence(const RunConfig& rc, spdlog::logger& log) {
    const fs::path src = detail::require_path(rc.hists, "--hists");
    std::vector<fs::path> files;
    if (fs::is_directory(src)) {
        for (const auto& stem : dataio::list_stems(src, ".csv")) files.push_back(src / (stem + ".csv"));
    } else {
        files.push_back(src);
    }
    if (files.empty()) throw Error(ErrorCode::IoError, src.string() + ": no histogram files");
    HistogramArray all;
    std::vector<std::string> names;
    for (const auto& f : files) {
        const auto table = dataio::read_histogram_csv(f);
        if (names.empty()) names = table.class_names;
        if (table.class_names != names) throw Error(ErrorCode::ShapeMismatch, f.string() + ": class columns differ");
        if (all.empty()) all = HistogramArray(0, names.size());
        for (std::size_t r = 0; r < table.histograms.rows(); ++r) all.append_row(table.histograms.row(r));
    }
    eval::CooccurrenceWeighting weighting;
    if (rc.weighting == "per-point") {
        weighting = eval::CooccurrenceWeighting::PerPoint;
    } else if (rc.weighting == "mass") {
        weighting = eval::CooccurrenceWeighting::Mass;
    } else {
        throw Error(ErrorCode::InvalidArgument, "--weighting must be per-point or mass");
    }
    const auto m = eval::cooccurrence(all, weighting);
    if (!rc.out.empty()) {
        std::string csv = "class";
        for (const auto& n : names) csv += "," + dataio::csv_escape(n);
        csv += ",support";
        csv += dataio::kCsvEol;
        for (std::size_t a = 0; a < names.size(); ++a) {
            csv += dataio::csv_escape(names[a]);
            for (std::size_t c = 0; c < names.size(); ++c) csv += "," + dataio::format_double(m(a, c));
            csv += "," + std::to_string(m.support[a]) + dataio::kCsvEol;
        }
        dataio::write_text_file(rc.out, csv);
    }
    json support = json::object();
    for (std::size_t a = 0; a < names.size(); ++a) support[names[a]] = m.support[a];
    log.info("co-occurrence over {} points", all.rows());
    return {{"points", all.rows()}, {"files", files.size()}, {"weighting", rc.weighting},
            {"diagonal_mean", eval::diagonal_mean(m)}, {"support", support}};
}

inline json cmd_validate_sequence(const RunConfig& rc, spdlog::logger& log) {
    const auto check = validate_sequence(detail::require_path(rc.sequence, "--sequence"));
    json violations = json::array();
    for (const auto& v : check.violations) {
        violations.push_back({{"kind", v.kind}, {"file", v.file}, {"message", v.message}});
        log.warn("{}: {} ({})", v.kind, v.file, v.message);
    }
    return {{"result", check.ok() ? "PASS" : "FAIL"},
            {"images", check.images},
            {"index_labels", check.index_labels},
            {"clouds", check.clouds},
            {"labels", check.labels},
            {"hists", check.hists},
            {"poses", check.poses},
            {"violations", violations}};
}

// ---------------------------------------------------------------------------

inline void add_ghpr_flags(CLI::App* s, RunConfig& rc) {
    s->add_option("--gamma", rc.ghpr.gamma, "GHPR kernel exponent (< 0)")->capture_default_str();
    s->add_option("--min-range", rc.ghpr.min_range, "Ignore points closer than this (m)")->capture_default_str();
    s->add_option("--max-range", rc.ghpr.max_range, "Ignore points farther than this (m)")->capture_default_str();
    s->add_option("--slack", rc.facing_slack_deg, "Facing-check slack beyond 90 deg (deg)")->capture_default_str();
    s->add_option("--k", rc.normal_k, "Neighbours for normal estimation")->capture_default_str();
}

inline void add_submap_flags(CLI::App* s, RunConfig& rc) {
    s->add_option("--radius", rc.submap.radius, "Submap radius (m)")->capture_default_str();
    s->add_option("--window", rc.submap.time_window, "Submap half time window (s)")->capture_default_str();
    s->add_option("--self-strike", rc.submap.self_strike_radius, "Self-strike mask radius (m)")->capture_default_str();
}

inline void add_sampling_flags(CLI::App* s, RunConfig& rc) {
    s->add_option("--distance-step", rc.sample_rule.distance_step, "Emit a frame every this many meters")->capture_default_str();
    s->add_option("--heading-step", rc.sample_rule.heading_step, "Emit a frame every this many degrees of yaw")->capture_default_str();
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig rc;
    if (const char* env = std::getenv(kLogLevelEnv)) rc.log_level = env;

    CLI::App app{"Semantic label fusion for forest point clouds and dataset split tooling", "semfuse"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file whose keys mirror the flags; explicit flags win");
    app.add_option("--report", rc.report_path, "Write the JSON report here instead of stdout");
    app.add_option("--log-level", rc.log_level, std::string("trace|debug|info|warn|error|off (env ") + kLogLevelEnv + ")");
    app.add_option("--threads", rc.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    auto* sf = app.add_subcommand("sample-frames", "Trajectory-based frame sampling");
    sf->add_option("--poses", rc.poses, "poses.csv");
    sf->add_option("--sequence", rc.sequence, "Sequence directory (uses its poses.csv)");
    sf->add_option("--out", rc.out, "Write the sampled stems, one per line");
    add_sampling_flags(sf, rc);

    auto* es = app.add_subcommand("extract-submaps", "Cut per-frame submaps out of the global map");
    es->add_option("--sequence", rc.sequence, "Sequence directory")->required();
    es->add_option("--out", rc.out, "Output directory (Clouds/, Times/)")->required();
    es->add_option("--frames-from", rc.frames_from, "auto|images|sampled")->capture_default_str();
    add_submap_flags(es, rc);
    add_sampling_flags(es, rc);

    auto* en = app.add_subcommand("estimate-normals", "PCA normals oriented toward the observer");
    en->add_option("--sequence", rc.sequence, "Sequence directory (uses the global map)");
    en->add_option("--cloud", rc.cloud, ".bin cloud");
    en->add_option("--times", rc.times, "Per-point .times sidecar");
    en->add_option("--poses", rc.poses, "poses.csv");
    en->add_option("--k", rc.normal_k, "Neighbours")->capture_default_str();
    en->add_option("--out", rc.out, "Normals CSV");

    auto* tl = app.add_subcommand("transfer-labels", "Fuse 2D label images into per-point histograms");
    tl->add_option("--sequence", rc.sequence, "Sequence directory")->required();
    tl->add_option("--out", rc.out, "Output directory")->required();
    tl->add_option("--mode", rc.transfer_mode, "global|submap")->capture_default_str();
    add_ghpr_flags(tl, rc);
    add_submap_flags(tl, rc);

    auto* gs = app.add_subcommand("gen-split", "Metric-optimized train/val/test split with buffers");
    gs->add_option("--samples", rc.samples, "Samples CSV or JSON")->required();
    gs->add_option("--candidates", rc.split_cfg.num_candidates, "Valid candidates to score")->capture_default_str();
    gs->add_option("--k", rc.split_cfg.k, "Spatial chunks")->capture_default_str();
    gs->add_option("--seed", rc.split_cfg.seed, "RNG seed")->capture_default_str();
    gs->add_option("--buffer", rc.split_cfg.buffer_dist, "Buffer distance (m)")->capture_default_str();
    gs->add_option("--ratios", rc.ratios, "train,val,test")->delimiter(',')->expected(3)->capture_default_str();
    gs->add_option("--max-attempts-factor", rc.split_cfg.max_attempts_factor, "Attempt budget per candidate")->capture_default_str();
    gs->add_option("--w-ld", rc.split_cfg.weights.ld, "Weight of m_LD")->capture_default_str();
    gs->add_option("--w-if", rc.split_cfg.weights.if_, "Weight of m_IF")->capture_default_str();
    gs->add_option("--w-kl", rc.split_cfg.weights.kl, "Weight of m_KL")->capture_default_str();
    gs->add_option("--w-sc", rc.split_cfg.weights.sc, "Weight of m_SC")->capture_default_str();
    gs->add_option("--out", rc.out, "Output directory (split.json and set lists)");

    auto* dsp = app.add_subcommand("domain-split", "Restrict a split's train/test sides by a domain tag");
    dsp->add_option("--samples", rc.samples, "Samples CSV or JSON")->required();
    dsp->add_option("--split", rc.split, "split.json from gen-split")->required();
    dsp->add_option("--tag", rc.domain_tag, "season|environment|sequence")->capture_default_str();
    dsp->add_option("--train-values", rc.train_values, "Tag values kept in train")->delimiter(',')->required();
    dsp->add_option("--test-values", rc.test_values, "Tag values kept in test")->delimiter(',')->required();
    dsp->add_option("--min-class-count", rc.min_class_count, "Flag classes below this count")->capture_default_str();
    dsp->add_option("--out", rc.out, "Output directory");

    auto* e2 = app.add_subcommand("eval-2d", "mIoU over index-label images (15 classes)");
    auto* e3 = app.add_subcommand("eval-3d", "mIoU over .label files (12 classes)");
    for (auto* s : {e2, e3}) {
        s->add_option("--gt", rc.gt, "Ground-truth directory")->required();
        s->add_option("--pred", rc.pred, "Prediction directory")->required();
        s->add_option("--policy", rc.iou_policy, "Undefined IoU: zero|skip")->capture_default_str();
        s->add_option("--out", rc.out, "Directory for iou.csv");
    }
    e3->add_flag("--gt-raw", rc.gt_raw, "Ground truth uses raw class indices; merge before scoring");

    auto* co = app.add_subcommand("cooccurrence", "Class co-occurrence matrix from label histograms");
    co->add_option("--hists", rc.hists, "Histogram CSV file or directory")->required();
    co->add_option("--weighting", rc.weighting, "per-point|mass")->capture_default_str();
    co->add_option("--out", rc.out, "Matrix CSV");

    auto* vs = app.add_subcommand("validate-sequence", "Check a sequence directory's file contracts");
    vs->add_option("--sequence", rc.sequence, "Sequence directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    auto log = std::make_shared<spdlog::logger>("semfuse", std::make_shared<spdlog::sinks::ostream_sink_mt>(err));
    log->set_pattern("[%l] %v");
    log->set_level(rc.log_level.empty() ? spdlog::level::info : spdlog::level::from_str(rc.log_level));

    CLI::App* sub = app.get_subcommands().front();
    rc.subcommand = sub->get_name();
    using Handler = json (*)(const RunConfig&, spdlog::logger&);
    const std::map<std::string, Handler> handlers = {
        {"sample-frames", cmd_sample_frames},     {"extract-submaps", cmd_extract_submaps},
        {"estimate-normals", cmd_estimate_normals}, {"transfer-labels", cmd_transfer_labels},
        {"gen-split", cmd_gen_split},             {"domain-split", cmd_domain_split},
        {"eval-2d", cmd_eval_2d},                 {"eval-3d", cmd_eval_3d},
        {"cooccurrence", cmd_cooccurrence},       {"validate-sequence", cmd_validate_sequence},
    };

    json report = {{"subcommand", rc.subcommand}};
    int code = kExitOk;
    try {
        json body = handlers.at(rc.subcommand)(rc, *log);
        if (body.contains("result") && body["result"] == "FAIL") code = kExitFailure;
        report["status"] = code == kExitOk ? "ok" : "failed";
        report.update(body);
    } catch (const Error& e) {
        log->error("{}", e.what());
        report["status"] = "error";
        report["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
        code = kExitFailure;
    } catch (const std::exception& e) {
        log->error("{}", e.what());
        report["status"] = "error";
        report["error"] = {{"code", "Internal"}, {"message", e.what()}};
        code = kExitFailure;
    }

    const std::string text = report.dump(2) + "\n";
    if (rc.report_path.empty()) {
        out << text;
    } else {
        try {
            dataio::write_text_file(rc.report_path, text);
        } catch (const Error& e) {
            log->error("{}", e.what());
            return kExitFailure;
        }
    }
    return code;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<const char*> argv = {"semfuse"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace semfuse::cli

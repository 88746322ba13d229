// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   acceptance [--data <dir>]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "semfuse/cli/app.hpp"
#include "semfuse/dataio/binary.hpp"
#include "semfuse/eval/confusion.hpp"
#include "semfuse/eval/cooccurrence.hpp"
#include "semfuse/labeltransfer/sampling.hpp"
#include "semfuse/splitgen/metrics.hpp"
#include "semfuse/splitgen/optimizer.hpp"
#include "semfuse/visibility/ghpr.hpp"
#include "semfuse/visibility/normals.hpp"
#include "support/small_scene.hpp"
#include "support/split_data.hpp"
#include "support/temp_dir.hpp"

namespace {

using namespace semfuse;
namespace fs = std::filesystem;
namespace oracle = semfuse::testing;
using Clock = std::chrono::steady_clock;
using Eigen::Vector2d;

fs::path g_data = SEMFUSE_TEST_DATA_DIR;

/// Collects failed expectations for one criterion.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        if (!ok) ++failed_;
    }
    void note(const std::string& s) { notes_.push_back(s); }
    bool ok() const { return failed_ == 0; }
    std::string summary() const {
        std::string out;
        for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + f;
        if (failed_ > failures_.size()) out += "; +" + std::to_string(failed_ - failures_.size()) + " more";
        for (const auto& n : notes_) out += (out.empty() ? "" : "; ") + n;
        return out;
    }

private:
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
    std::size_t failed_ = 0;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

std::vector<Vec3> random_cloud(std::size_t n, std::mt19937_64& gen, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = Vec3(u(gen), u(gen), u(gen));
    return pts;
}

std::vector<Vec3> plane_grid(double z, double half, int n) {
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pts.emplace_back(-half + 2 * half * i / (n - 1), -half + 2 * half * j / (n - 1), z);
    return pts;
}

// 1 ---------------------------------------------------------------------------
void ghpr_scale_invariance(Check& c) {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> us(0.1, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto pts = random_cloud(1000, gen, -20, 20);
        const Vec3 view = random_cloud(1, gen, -2, 2).front();
        const double s = us(gen);
        const auto cfg = visibility::GhprConfig::unbounded();
        const auto base = visibility::ghpr_visible(pts, view, cfg);
        std::vector<Vec3> scaled(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) scaled[i] = s * (pts[i] - view) + view;
        const auto after = visibility::ghpr_visible(scaled, view, cfg);
        c.expect(after.visible == base.visible, "trial " + std::to_string(trial) + " s=" + fmt(s) + " differs");
        c.expect(!base.visible.empty(), "trial " + std::to_string(trial) + " saw nothing");
    }
    const double secs = seconds_since(t0);
    c.expect(secs < 30.0, "runtime " + fmt(secs) + " s");
    c.note(fmt(secs) + " s");
}

// 2 ---------------------------------------------------------------------------
void ghpr_occlusion(Check& c) {
    const Vec3 eye = Vec3::Zero();
    const auto near = plane_grid(5, 5, 60);
    const auto far = plane_grid(10, 25, 60);
    std::vector<Vec3> pts = near;
    pts.insert(pts.end(), far.begin(), far.end());
    const std::vector<oracle::Rect> scene = {{Vec3(-5, -5, 5), Vec3(10, 0, 0), Vec3(0, 10, 0), 0},
                                              {Vec3(-25, -25, 10), Vec3(50, 0, 0), Vec3(0, 50, 0), 1}};
    const auto r = visibility::ghpr_visible(pts, eye);
    std::vector<bool> vis(pts.size(), false);
    for (auto i : r.visible) vis[i] = true;

    std::size_t near_vis = 0, interior = 0, interior_vis = 0, disagree = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const bool truth = oracle::zbuffer_visible(scene, eye, pts[i]);
        disagree += truth != vis[i];
        if (i < near.size()) {
            near_vis += vis[i];
        } else if (!truth) {
            // The shadow of the near plane on the far plane is |x|, |y| <= 10.
            ++interior;
            interior_vis += vis[i];
        }
    }
    const double near_frac = double(near_vis) / near.size();
    const double interior_frac = interior ? double(interior_vis) / interior : 1.0;
    const double disagree_frac = double(disagree) / pts.size();
    c.expect(near_frac >= 0.95, "near visibility " + fmt(near_frac));
    c.expect(interior > 0, "no occluded far points");
    c.expect(interior_frac <= 0.05, "interior far visibility " + fmt(interior_frac));
    c.expect(disagree_frac <= 0.02, "z-buffer disagreement " + fmt(disagree_frac));
    c.note("near " + fmt(near_frac) + ", occluded far " + fmt(interior_frac) + ", disagreement " + fmt(disagree_frac));
}

// 3 ---------------------------------------------------------------------------
void normal_estimation(Check& c) {
    std::mt19937_64 gen(77);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 n = Vec3(nd(gen), nd(gen), nd(gen)).normalized();
        const Vec3 e1 = n.unitOrthogonal(), e2 = n.cross(e1);
        const Vec3 origin(u(gen) * 10, u(gen) * 10, u(gen) * 10);
        std::vector<Vec3> pts;
        std::vector<bool> interior;
        while (pts.size() < 400) {
            const double a = u(gen), b = u(gen);
            if (a * a + b * b > 1) continue;
            pts.push_back(origin + 3.0 * (a * e1 + b * e2));
            interior.push_back(a * a + b * b < 0.8 * 0.8);
        }
        const std::vector<double> times(pts.size(), 0.0);
        for (double side : {1.0, -1.0}) {
            const Vec3 observer = origin + side * 5.0 * n + 0.7 * e1;
            const Trajectory traj = {{0.0, observer, Quat::Identity()}};
            visibility::NormalConfig cfg;
            cfg.k = 10;
            const auto field = visibility::estimate_normals(pts, times, traj, cfg);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const auto& est = field.normals[i];
                if (interior[i]) c.expect(est.has_value(), "plane " + std::to_string(trial) + " point " + std::to_string(i) + " invalid");
                if (!est) continue;
                const double err = std::acos(std::clamp(std::abs(est->dot(n)), -1.0, 1.0)) * 180.0 / M_PI;
                if (interior[i]) {
                    worst = std::max(worst, err);
                    c.expect(err < 1.0, "plane " + std::to_string(trial) + " error " + fmt(err) + " deg");
                }
                // Sign test: every oriented normal faces its observer.
                c.expect(est->dot(observer - pts[i]) > 0, "plane " + std::to_string(trial) + " point " + std::to_string(i) + " faces away");
                c.expect(est->dot(side * n) > 0, "plane " + std::to_string(trial) + " side " + fmt(side) + " not flipped");
            }
        }
    }
    c.note("worst interior error " + fmt(worst) + " deg");
}

// 4 ---------------------------------------------------------------------------
void transfer_oracle(Check& c) {
    const auto s = oracle::small_scene();
    const auto expected = oracle::oracle_histograms(s.cloud.points, s.normals, s.oracle_frames, s.surfaces, 15, 2.0, 45.0, 10.0);
    const auto r = labeltransfer::transfer_labels(s.cloud, oracle::fixed_normals(s.normals), s.frames);
    c.expect(s.cloud.size() == 25 && s.frames.size() == 2, "scene is not 25 points / 2 cameras");
    std::size_t k = 0;
    for (std::size_t i = 0; i < s.cloud.size(); ++i) {
        const auto row = r.full_histograms.row(i);
        c.expect(std::equal(row.begin(), row.end(), expected[i].begin(), expected[i].end()), "histogram " + std::to_string(i));
        const auto sum = std::accumulate(expected[i].begin(), expected[i].end(), 0u);
        if (sum == 0) continue;
        c.expect(k < r.kept_indices.size() && r.kept_indices[k] == i, "kept set differs at " + std::to_string(i));
        if (k < r.cloud.modes->size()) c.expect((*r.cloud.modes)[k] == oracle::oracle_mode(expected[i]), "mode " + std::to_string(i));
        ++k;
    }
    c.expect(k == r.cloud.size(), "kept count");

    // Two votes for trunk against one for foliage.
    LabeledCloud one;
    one.points = {Vec3(0, 10, 1.6)};
    one.times = {0.0};
    std::vector<labeltransfer::CameraFrame> frames = {
        oracle::frame_facing_y("a", Vec3(0, 0, 1.5), LabelRaster(320, 240, oracle::kTrunk)),
        oracle::frame_facing_y("b", Vec3(0.5, 0, 1.5), LabelRaster(320, 240, oracle::kTrunk)),
        oracle::frame_facing_y("c", Vec3(-0.5, 0, 1.5), LabelRaster(320, 240, oracle::kFoliage))};
    const auto f6 = labeltransfer::transfer_labels(one, oracle::no_normals(1), frames);
    c.expect(f6.cloud.size() == 1 && (*f6.cloud.histograms)(0, oracle::kTrunk) == 2 && (*f6.cloud.histograms)(0, oracle::kFoliage) == 1,
             "vote counts");
    c.expect(f6.cloud.size() == 1 && (*f6.cloud.modes)[0] == oracle::kTrunk, "mode is not trunk");
    const auto ontology = ClassOntology::standard();
    c.expect(ontology.eval_name(oracle::kTrunk) == "tree-trunk", "class 13 is " + ontology.eval_name(oracle::kTrunk));
}

// 5 ---------------------------------------------------------------------------
void parallel_determinism(Check& c) {
    oracle::TempDir tmp;
    const fs::path seq = g_data / "synthetic_sequence";
    std::vector<std::vector<char>> labels, hists;
    for (const char* t : {"1", "4", "8"}) {
        std::ostringstream out, err;
        const int code = cli::run({"--threads", t, "transfer-labels", "--sequence", seq.string(), "--out", (tmp / t).string()}, out, err);
        c.expect(code == 0, std::string("threads ") + t + " exit " + std::to_string(code) + ": " + err.str());
        if (code != 0) return;
        labels.push_back(dataio::read_file_bytes(tmp / t / "Labels" / "global_map.label"));
        hists.push_back(dataio::read_file_bytes(tmp / t / "Hists" / "global_map.csv"));
    }
    c.expect(!labels[0].empty(), "no labels written");
    for (std::size_t i = 1; i < labels.size(); ++i) {
        c.expect(labels[i] == labels[0], "label bytes differ for run " + std::to_string(i));
        c.expect(hists[i] == hists[0], "histogram bytes differ for run " + std::to_string(i));
    }
    c.expect(labels[0] == dataio::read_file_bytes(g_data / "golden" / "global_map.label"), "labels differ from golden");
    c.expect(hists[0] == dataio::read_file_bytes(g_data / "golden" / "global_map.csv"), "histograms differ from golden");
}

// 6 ---------------------------------------------------------------------------
void sampling_constants(Check& c) {
    using labeltransfer::sample_frames;
    Trajectory line;
    for (int i = 0; i <= 300; ++i) line.push_back({i * 0.1, Vec3(i * 0.1, 0, 0), Quat::Identity()});
    std::vector<double> want;
    for (int m = 0; m <= 30; m += 5) want.push_back(m);
    const auto got = sample_frames(line);
    c.expect(got.size() == want.size(), "straight line gave " + std::to_string(got.size()) + " frames");
    for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
        c.expect(std::abs(got[i] - want[i]) < 1e-9, "distance frame at t=" + fmt(got[i]));
    }

    Trajectory spin;
    for (int i = 0; i <= 120; ++i) spin.push_back({i * 1.0, Vec3::Zero(), oracle::yaw_quat(i * 0.5 * M_PI / 180.0)});
    const auto turns = sample_frames(spin);
    c.expect(turns.size() == 13, "rotation gave " + std::to_string(turns.size()) + " frames");
    for (std::size_t i = 0; i < turns.size(); ++i) c.expect(turns[i] == 10.0 * i, "heading frame at t=" + fmt(turns[i]));

    // Sensor fixed at the origin over [-5, 5] s; frame at t = 0.
    const Trajectory still = {{-5.0, Vec3::Zero(), Quat::Identity()}, {5.0, Vec3::Zero(), Quat::Identity()}};
    LabeledCloud g;
    struct Probe {
        Vec3 p;
        double t;
        bool in;
        const char* what;
    };
    const std::vector<Probe> probes = {{Vec3(44.99, 0, 0), 0.0, true, "44.99 m"},   {Vec3(45.01, 0, 0), 0.0, false, "45.01 m"},
                                       {Vec3(0, 0, 44.99), 0.0, true, "44.99 m up"}, {Vec3(10, 0, 0), 0.99, true, "+0.99 s"},
                                       {Vec3(10, 0, 0), 1.01, false, "+1.01 s"},      {Vec3(10, 0, 0), -0.99, true, "-0.99 s"},
                                       {Vec3(10, 0, 0), -1.01, false, "-1.01 s"},     {Vec3(0, 2.01, 0), 0.0, true, "2.01 m"},
                                       {Vec3(0, 1.99, 0), 0.0, false, "1.99 m"}};
    for (const auto& p : probes) {
        g.points.push_back(p.p);
        g.times.push_back(p.t);
    }
    const auto sm = labeltransfer::extract_submap(g, 0.0, still);
    const std::set<std::size_t> kept(sm.source_indices.begin(), sm.source_indices.end());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        c.expect(kept.count(i) == static_cast<std::size_t>(probes[i].in), std::string(probes[i].what) + (probes[i].in ? " dropped" : " kept"));
    }
}

// 7 ---------------------------------------------------------------------------
double brute_min_cross_distance(const splitgen::Assignment& a, const std::vector<Vector2d>& xy) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xy.size(); ++i)
        for (std::size_t j = i + 1; j < xy.size(); ++j)
            if (a[i] != splitgen::SplitSet::Buffer && a[j] != splitgen::SplitSet::Buffer && a[i] != a[j])
                best = std::min(best, (xy[i] - xy[j]).norm());
    return best;
}

void split_generator(Check& c) {
    using namespace splitgen;
    const auto table = oracle::make_split_dataset(2000, 1);
    std::set<std::string> sequences;
    for (const auto& s : table.samples) sequences.insert(s.sequence);
    c.expect(table.samples.size() == 2000 && sequences.size() == 2, "dataset shape");
    SplitConfig cfg;
    const auto t0 = Clock::now();
    const auto r = optimize_split(table, cfg);
    const double secs = seconds_since(t0);
    c.expect(secs < 120.0, "runtime " + fmt(secs) + " s");
    const auto xy = table.positions();

    const double gap = brute_min_cross_distance(r.assignment, xy);
    c.expect(gap >= 45.0, "(a) cross-set pair " + fmt(gap) + " m apart");

    const auto totals = set_class_totals(r.assignment, table);
    for (std::size_t s = 0; s < kNumSets; ++s)
        for (std::size_t k = 0; k < table.num_classes(); ++k)
            c.expect(totals[s][k] > 0, "(b) class " + table.class_names[k] + " missing from set " + std::to_string(s));

    const auto ratios = achieved_ratios(r.assignment);
    const std::size_t buffered = std::count(r.assignment.begin(), r.assignment.end(), SplitSet::Buffer);
    for (std::size_t s = 0; s < kNumSets; ++s) {
        c.expect(std::abs(ratios[s] - cfg.ratios[s]) <= 0.05, "(c) ratio " + std::to_string(s) + " = " + fmt(ratios[s]));
    }

    c.expect(r.candidates.size() == 1000, "(d) " + std::to_string(r.candidates.size()) + " candidates");
    std::vector<SplitMetrics> metrics;
    for (const auto& cand : r.candidates) {
        SplitMetrics m;
        const auto d = divergence_metrics(cand.assignment, table);
        m.ld = d.ld;
        m.if_ = d.if_;
        m.kl = d.kl;
        m.sc = metric_SC(cand.assignment, xy);
        metrics.push_back(m);
    }
    const auto rescored = score_candidates(metrics, cfg.weights);
    const auto best = std::min_element(rescored.scores.begin(), rescored.scores.end()) - rescored.scores.begin();
    c.expect(r.candidates[best].assignment == r.assignment, "(d) re-scored minimum is candidate " + std::to_string(best));
    c.expect(std::abs(rescored.scores[best] - r.score) < 1e-9, "(d) score " + fmt(r.score) + " vs " + fmt(rescored.scores[best]));

    const auto again = optimize_split(table, cfg);
    c.expect(again.assignment == r.assignment && again.scores == r.scores, "(e) rerun differs");

    c.note(fmt(secs) + " s, ratios " + fmt(ratios[0]) + "/" + fmt(ratios[1]) + "/" + fmt(ratios[2]) + ", " + std::to_string(buffered) +
           " buffered, gap " + fmt(gap) + " m");
}

// 8 ---------------------------------------------------------------------------
void metric_correctness(Check& c) {
    using namespace splitgen;
    std::mt19937_64 gen(808);
    std::uniform_real_distribution<double> u(0, 100);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Vector2d> xy(50);
        for (auto& p : xy) p = Vector2d(u(gen), u(gen));
        Assignment a(50);
        std::vector<int> labels(50);
        for (std::size_t i = 0; i < 50; ++i) {
            a[i] = static_cast<SplitSet>(i < 6 ? i % 3 : gen() % 4);
            labels[i] = a[i] == SplitSet::Buffer ? -1 : static_cast<int>(a[i]);
        }
        const double got = metric_SC(a, xy), want = oracle::oracle_silhouette(xy, labels);
        worst = std::max(worst, std::abs(got - want));
        c.expect(std::abs(got - want) <= 1e-12, "silhouette trial " + std::to_string(trial));
    }

    // Identical per-sample class mix: every set has the global distribution.
    SampleTable same, mixed;
    same.class_names = mixed.class_names = {"a", "b", "c"};
    for (int i = 0; i < 30; ++i) {
        SampleRecord s;
        s.id = std::to_string(i);
        s.xy = Vector2d(i, 0);
        s.class_counts = {1, 2, 7};
        same.samples.push_back(s);
        s.class_counts = {1 + gen() % 5, 1 + gen() % 5, 1 + gen() % 5};
        mixed.samples.push_back(s);
    }
    Assignment a(30);
    for (std::size_t i = 0; i < 30; ++i) a[i] = static_cast<SplitSet>(i % 3);
    const auto zero = divergence_metrics(a, same);
    c.expect(zero.ld == 0.0 && zero.if_ == 0.0 && zero.kl == 0.0, "identical sets: " + fmt(zero.ld) + " " + fmt(zero.if_) + " " + fmt(zero.kl));
    const auto pos = divergence_metrics(a, mixed);
    c.expect(pos.ld > 0 && pos.if_ > 0 && pos.kl > 0, "differing sets not positive");
    c.note("worst silhouette error " + fmt(worst));
}

// 9 ---------------------------------------------------------------------------
void evaluation(Check& c) {
    eval::ConfusionMatrix two(2);
    two(0, 0) = 3;
    two(0, 1) = 1;
    two(1, 0) = 1;
    two(1, 1) = 3;
    const std::vector<ClassIndex> both = {0, 1};
    c.expect(std::abs(eval::miou(two, both) - 0.6) <= 1e-12, "[[3,1],[1,3]] gave " + fmt(eval::miou(two, both)));

    // gt rows, pred columns: [[5,1,0],[2,6,2],[0,0,4]].
    // IoU0 = 5/8, IoU1 = 6/11, IoU2 = 4/6.
    eval::ConfusionMatrix three(3);
    const int m[3][3] = {{5, 1, 0}, {2, 6, 2}, {0, 0, 4}};
    for (int g = 0; g < 3; ++g)
        for (int p = 0; p < 3; ++p) three(g, p) = m[g][p];
    const std::vector<ClassIndex> all3 = {0, 1, 2};
    const double want3 = (5.0 / 8 + 6.0 / 11 + 4.0 / 6) / 3;
    c.expect(std::abs(eval::miou(three, all3) - want3) <= 1e-12, "3-class gave " + fmt(eval::miou(three, all3)));

    // Class 2 absent everywhere: zero policy averages it as 0, skip drops it.
    eval::ConfusionMatrix absent(3);
    absent(0, 0) = 3;
    absent(0, 1) = 1;
    absent(1, 0) = 1;
    absent(1, 1) = 3;
    c.expect(std::abs(eval::miou(absent, all3, eval::UndefinedIouPolicy::CountAsZero) - 1.2 / 3) <= 1e-12, "zero policy");
    c.expect(std::abs(eval::miou(absent, all3, eval::UndefinedIouPolicy::Skip) - 0.6) <= 1e-12, "skip policy");

    std::mt19937_64 gen(909);
    std::vector<ClassIndex> gt(5000), pred(5000);
    for (std::size_t i = 0; i < gt.size(); ++i) {
        gt[i] = gen() % 16 == 0 ? kIgnoreLabel : static_cast<ClassIndex>(gen() % 15);
        pred[i] = gen() % 4 == 0 ? gt[i] : static_cast<ClassIndex>(gen() % 15);
    }
    const auto whole = eval::accumulate_confusion(gt, pred, eval::ConfusionMatrix(15));
    for (std::size_t shards : {2u, 7u, 100u}) {
        eval::ConfusionMatrix sum(15);
        const std::size_t step = (gt.size() + shards - 1) / shards;
        for (std::size_t b = 0; b < gt.size(); b += step) {
            const std::size_t e = std::min(gt.size(), b + step);
            sum += eval::accumulate_confusion(std::span(gt).subspan(b, e - b), std::span(pred).subspan(b, e - b), eval::ConfusionMatrix(15));
        }
        c.expect(sum == whole, std::to_string(shards) + " shards differ");
    }
}

// 10 --------------------------------------------------------------------------
void cooccurrence(Check& c) {
    std::mt19937_64 gen(1010);
    HistogramArray h(3000, 15);
    for (std::size_t i = 0; i < h.rows(); ++i) {
        for (std::size_t k = 0; k < 15; ++k) h(i, k) = gen() % 3 == 0 ? static_cast<Count>(gen() % 9) : 0;
        if (h.row_sum(i) == 0) h(i, gen() % 15) = 1;  // every labelled point has at least one vote
    }
    const auto m = eval::cooccurrence(h);

    // Per-point oracle: each point adds its normalized histogram to the row of its mode.
    std::vector<std::vector<double>> sum(15, std::vector<double>(15, 0.0));
    std::vector<std::size_t> support(15, 0);
    for (std::size_t i = 0; i < h.rows(); ++i) {
        std::vector<std::uint32_t> row(15);
        double total = 0;
        for (std::size_t k = 0; k < 15; ++k) total += row[k] = h(i, k);
        if (total == 0) continue;
        const auto a = oracle::oracle_mode(row);
        ++support[a];
        for (std::size_t k = 0; k < 15; ++k) sum[a][k] += row[k] / total;
    }
    double worst = 0;
    for (std::size_t a = 0; a < 15; ++a) {
        c.expect(m.support[a] == support[a], "support of class " + std::to_string(a));
        double row_sum = 0;
        for (std::size_t k = 0; k < 15; ++k) {
            const double want = support[a] ? sum[a][k] / support[a] : 0.0;
            worst = std::max(worst, std::abs(m(a, k) - want));
            c.expect(std::abs(m(a, k) - want) <= 1e-12, "entry (" + std::to_string(a) + "," + std::to_string(k) + ")");
            row_sum += m(a, k);
        }
        if (support[a]) c.expect(std::abs(row_sum - 1.0) <= 1e-9, "row " + std::to_string(a) + " sums to " + fmt(row_sum));
    }

    HistogramArray pure(15, 15);
    for (std::size_t k = 0; k < 15; ++k) pure(k, k) = static_cast<Count>(k + 1);
    const auto id = eval::cooccurrence(pure);
    for (std::size_t a = 0; a < 15; ++a)
        for (std::size_t k = 0; k < 15; ++k) c.expect(id(a, k) == (a == k ? 1.0 : 0.0), "pure histograms not identity");
    c.expect(eval::diagonal_mean(id) == 1.0, "diagonal_mean(identity) = " + fmt(eval::diagonal_mean(id)));
    c.note("worst entry error " + fmt(worst));
}

// 11 --------------------------------------------------------------------------
template <class F>
bool throws_code(F&& f, ErrorCode code) {
    try {
        f();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

std::vector<std::string> violation_kinds(const fs::path& seq) {
    std::vector<std::string> kinds;
    for (const auto& v : cli::validate_sequence(seq).violations) kinds.push_back(v.kind);
    return kinds;
}

void io_round_trips(Check& c) {
    oracle::TempDir tmp;
    std::mt19937_64 gen(1111);
    std::uniform_real_distribution<float> uf(-1e3f, 1e3f);
    std::uniform_real_distribution<double> ud(-1e3, 1e3);

    std::vector<Vec3> pts(5000);
    std::vector<float> intensity(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i] = Vec3(uf(gen), uf(gen), uf(gen));
        intensity[i] = uf(gen);
    }
    dataio::write_cloud_bin(tmp / "c.bin", pts, intensity);
    const auto scan = dataio::read_cloud_bin(tmp / "c.bin");
    c.expect(scan.points == pts && scan.intensity == intensity, ".bin round trip");

    std::vector<ClassIndex> labels(5000);
    for (auto& l : labels) l = static_cast<ClassIndex>(gen() % 15);
    dataio::write_label_file(tmp / "l.label", labels);
    c.expect(dataio::read_label_file(tmp / "l.label") == labels, ".label round trip");

    Trajectory traj;
    double t = ud(gen);
    for (int i = 0; i < 500; ++i) {
        t += 0.01 + std::abs(ud(gen)) * 1e-3;
        traj.push_back({t, Vec3(ud(gen), ud(gen), ud(gen)), Quat(Eigen::Vector4d::Random().normalized())});
    }
    dataio::write_poses_csv(tmp / "poses.csv", traj);
    const auto back = dataio::read_poses_csv(tmp / "poses.csv");
    bool same = back.size() == traj.size();
    for (std::size_t i = 0; same && i < traj.size(); ++i) {
        same = back[i].t == traj[i].t && back[i].position == traj[i].position && back[i].orientation.coeffs() == traj[i].orientation.coeffs();
    }
    c.expect(same, "poses.csv round trip");

    HistogramArray h(2000, 15);
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t k = 0; k < 15; ++k) h(i, k) = static_cast<Count>(gen() % 1000);
    const auto ontology = ClassOntology::standard();
    dataio::write_histogram_csv(tmp / "h.csv", h, ontology.eval2d());
    const auto table = dataio::read_histogram_csv(tmp / "h.csv");
    c.expect(table.histograms == h && table.class_names == std::vector<std::string>(ontology.eval2d().begin(), ontology.eval2d().end()),
             "histogram CSV round trip");

    auto bytes = dataio::read_file_bytes(tmp / "c.bin");
    bytes.resize(bytes.size() - 3);
    dataio::write_file_bytes(tmp / "short.bin", bytes);
    c.expect(throws_code([&] { dataio::read_cloud_bin(tmp / "short.bin"); }, ErrorCode::MalformedBin), "truncated .bin accepted");
    bytes = dataio::read_file_bytes(tmp / "l.label");
    bytes.resize(bytes.size() - 1);
    dataio::write_file_bytes(tmp / "short.label", bytes);
    c.expect(throws_code([&] { dataio::read_label_file(tmp / "short.label"); }, ErrorCode::MalformedLabel), "truncated .label accepted");

    // A clean labelled sequence, then one corruption per copy.
    const fs::path clean = tmp / "clean";
    fs::copy(g_data / "synthetic_sequence", clean, fs::copy_options::recursive);
    std::ostringstream out, err;
    const int code = cli::run({"transfer-labels", "--sequence", clean.string(), "--out", clean.string(), "--mode", "submap"}, out, err);
    c.expect(code == 0, "submap transfer failed: " + err.str());
    c.expect(violation_kinds(clean).empty(), "clean sequence flagged");

    struct Corruption {
        std::string kind;
        std::function<void(const fs::path&)> apply;
    };
    const std::vector<Corruption> corruptions = {
        {"point count mismatch",
         [](const fs::path& s) {
             auto b = dataio::read_file_bytes(s / "Labels" / "100.300000.label");
             b.resize(b.size() - 4);
             dataio::write_file_bytes(s / "Labels" / "100.300000.label", b);
         }},
        {"no pose for timestamp",
         [](const fs::path& s) {
             auto tr = dataio::read_poses_csv(s / "poses.csv");
             tr.erase(tr.begin() + 3);
             dataio::write_poses_csv(s / "poses.csv", tr);
         }},
        {"stem mismatch", [](const fs::path& s) { fs::remove(s / "image" / "100.600000.png"); }},
        {"truncated file",
         [](const fs::path& s) {
             auto b = dataio::read_file_bytes(s / "Clouds" / "100.000000.bin");
             b.resize(b.size() - 5);
             dataio::write_file_bytes(s / "Clouds" / "100.000000.bin", b);
         }},
        {"invalid label value",
         [](const fs::path& s) {
             auto l = dataio::read_label_file(s / "Labels" / "100.000000.label");
             l[0] = 15;
             dataio::write_label_file(s / "Labels" / "100.000000.label", l);
         }},
    };
    for (std::size_t i = 0; i < corruptions.size(); ++i) {
        const fs::path copy = tmp / ("bad" + std::to_string(i));
        fs::copy(clean, copy, fs::copy_options::recursive);
        corruptions[i].apply(copy);
        const auto kinds = violation_kinds(copy);
        c.expect(std::find(kinds.begin(), kinds.end(), corruptions[i].kind) != kinds.end(), corruptions[i].kind + " not detected");
        std::ostringstream o, e;
        c.expect(cli::run({"validate-sequence", "--sequence", copy.string()}, o, e) == cli::kExitFailure,
                 corruptions[i].kind + ": validate-sequence did not fail");
    }
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--data") g_data = argv[i + 1];
    }
    const std::vector<std::pair<const char*, void (*)(Check&)>> criteria = {
        {"GHPR scale invariance", ghpr_scale_invariance},
        {"GHPR occlusion vs z-buffer", ghpr_occlusion},
        {"normal estimation on planes", normal_estimation},
        {"label transfer vs brute-force oracle", transfer_oracle},
        {"determinism across thread counts", parallel_determinism},
        {"frame sampling and submap constants", sampling_constants},
        {"split generator properties", split_generator},
        {"split metric correctness", metric_correctness},
        {"mIoU evaluation", evaluation},
        {"co-occurrence matrix", cooccurrence},
        {"I/O round trips and sequence validation", io_round_trips},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("threw: ") + e.what());
        }
        failed += !c.ok();
        std::cout << (c.ok() ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first;
        const auto s = c.summary();
        if (!s.empty()) std::cout << "  (" << s << ")";
        std::cout << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}

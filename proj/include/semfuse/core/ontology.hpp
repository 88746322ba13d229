#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semfuse/core/error.hpp"

namespace semfuse {

using ClassIndex = std::uint32_t;

/// Pixel / point value meaning "no label".
inline constexpr ClassIndex kIgnoreLabel = 255;

/**
 * Class universe of the benchmark.
 *
 * Raw annotations use 18 classes. The 15 classes evaluated in 2D are indexed
 * 0..14 in alphabetical order; raw indices 0..14 coincide with those, and the
 * three raw-only classes follow (asphalt = 15, pole = 16, vehicle = 17). Merging
 * maps pole -> other-object and asphalt -> other-terrain; vehicle maps to the
 * ignore label. The 3D evaluation set drops sky, water and other-terrain.
 */
class ClassOntology {
public:
    static ClassOntology standard() {
        ClassOntology o;
        o.eval2d_ = {"bush",          "dirt", "fence",     "grass",        "gravel",
                     "log",           "mud",  "other-object", "other-terrain", "rock",
                     "sky",           "structure", "tree-foliage", "tree-trunk", "water"};
        o.raw_ = o.eval2d_;
        o.raw_.insert(o.raw_.end(), {"asphalt", "pole", "vehicle"});
        o.merge_map_ = {{"pole", "other-object"}, {"asphalt", "other-terrain"}};
        o.excluded_ = {"vehicle"};
        for (const auto& name : o.eval2d_) {
            if (name != "sky" && name != "water" && name != "other-terrain") o.eval3d_.push_back(name);
        }
        o.validate();
        return o;
    }

    const std::vector<std::string>& raw_classes() const { return raw_; }
    const std::vector<std::string>& eval2d() const { return eval2d_; }
    const std::vector<std::string>& eval3d() const { return eval3d_; }
    const std::map<std::string, std::string>& merge_map() const { return merge_map_; }
    const std::set<std::string>& excluded() const { return excluded_; }

    /// Number of classes in a label histogram.
    std::size_t num_classes() const { return eval2d_.size(); }

    std::optional<ClassIndex> eval_index(const std::string& name) const {
        auto it = std::lower_bound(eval2d_.begin(), eval2d_.end(), name);
        if (it == eval2d_.end() || *it != name) return std::nullopt;
        return static_cast<ClassIndex>(it - eval2d_.begin());
    }

    const std::string& eval_name(ClassIndex idx) const { return eval2d_.at(idx); }

    /// eval2d indices that make up the 3D evaluation set.
    std::vector<ClassIndex> eval3d_indices() const {
        std::vector<ClassIndex> out;
        for (const auto& n : eval3d_) out.push_back(*eval_index(n));
        return out;
    }

    std::vector<ClassIndex> eval2d_indices() const {
        std::vector<ClassIndex> out(eval2d_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<ClassIndex>(i);
        return out;
    }

    /// Raw (18-class) index -> eval2d index, or kIgnoreLabel for excluded
    /// classes. kIgnoreLabel passes through unchanged.
    ClassIndex merge_raw(ClassIndex raw) const {
        if (raw == kIgnoreLabel) return kIgnoreLabel;
        if (raw >= raw_.size()) {
            throw Error(ErrorCode::UnknownClassIndex, "raw class index " + std::to_string(raw));
        }
        const std::string& name = raw_[raw];
        if (excluded_.count(name)) return kIgnoreLabel;
        if (auto it = merge_map_.find(name); it != merge_map_.end()) return *eval_index(it->second);
        return *eval_index(name);
    }

    std::vector<ClassIndex> merge_raw(const std::vector<ClassIndex>& raw) const {
        std::vector<ClassIndex> out(raw.size());
        std::transform(raw.begin(), raw.end(), out.begin(), [this](ClassIndex r) { return merge_raw(r); });
        return out;
    }

    bool is_valid_eval(ClassIndex idx) const { return idx < eval2d_.size(); }

private:
    void validate() const {
        if (!std::is_sorted(eval2d_.begin(), eval2d_.end()) || eval2d_.size() != 15 || eval3d_.size() != 12) {
            throw Error(ErrorCode::InvalidArgument, "class ontology invariants violated");
        }
        for (const auto& [from, to] : merge_map_) {
            if (!eval_index(to)) throw Error(ErrorCode::InvalidArgument, "merge target not in eval set: " + to);
        }
        for (const auto& name : excluded_) {
            if (eval_index(name)) throw Error(ErrorCode::InvalidArgument, "excluded class in eval set: " + name);
        }
    }

    std::vector<std::string> raw_;
    std::vector<std::string> eval2d_;
    std::vector<std::string> eval3d_;
    std::map<std::string, std::string> merge_map_;
    std::set<std::string> excluded_;
};

}  // namespace semfuse

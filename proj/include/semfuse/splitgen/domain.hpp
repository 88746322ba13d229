#pragma once

#include <set>
#include <string>
#include <vector>

#include "semfuse/splitgen/split.hpp"

namespace semfuse::splitgen {

enum class DomainTag { Season, Environment, Sequence };

inline DomainTag parse_domain_tag(std::string_view s) {
    if (s == "season") return DomainTag::Season;
    if (s == "environment") return DomainTag::Environment;
    if (s == "sequence") return DomainTag::Sequence;
    throw Error(ErrorCode::InvalidArgument, "unknown domain tag '" + std::string(s) + "'");
}

inline const std::string& tag_of(const SampleRecord& s, DomainTag tag) {
    switch (tag) {
        case DomainTag::Season: return s.season;
        case DomainTag::Environment: return s.environment;
        case DomainTag::Sequence: return s.sequence;
    }
    return s.season;
}

/// e.g. {Season, {"winter"}, {"summer"}} keeps winter training samples and summer test samples.
struct DomainFilter {
    DomainTag tag = DomainTag::Season;
    std::set<std::string> train_values;
    std::set<std::string> test_values;
    /// Classes whose count on either side is below this are flagged.
    std::uint64_t min_class_count = 1;
};

struct DomainSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::size_t> flagged_classes;
    std::vector<std::uint64_t> train_counts;
    std::vector<std::uint64_t> test_counts;
};

/// Restricts an optimized split's train and test sets by a sample tag.
/// Filtering only removes samples, so the buffer guarantee carries over.
inline DomainSplit domain_subsplit(const Assignment& assignment, const SampleTable& table, const DomainFilter& filter) {
    DomainSplit out;
    out.train_counts.assign(table.num_classes(), 0);
    out.test_counts.assign(table.num_classes(), 0);
    for (std::size_t i = 0; i < table.samples.size(); ++i) {
        const auto& s = table.samples[i];
        const std::string& tag = tag_of(s, filter.tag);
        std::vector<std::uint64_t>* counts = nullptr;
        if (assignment[i] == SplitSet::Train && filter.train_values.count(tag)) {
            out.train.push_back(i);
            counts = &out.train_counts;
        } else if (assignment[i] == SplitSet::Test && filter.test_values.count(tag)) {
            out.test.push_back(i);
            counts = &out.test_counts;
        }
        if (counts) {
            for (std::size_t c = 0; c < table.num_classes(); ++c) (*counts)[c] += s.class_counts[c];
        }
    }
    if (out.train.empty() || out.test.empty()) {
        throw Error(ErrorCode::EmptyAfterFilter, "domain filter leaves an empty train or test side");
    }
    for (std::size_t c = 0; c < table.num_classes(); ++c) {
        if (out.train_counts[c] < filter.min_class_count || out.test_counts[c] < filter.min_class_count) {
            out.flagged_classes.push_back(c);
        }
    }
    return out;
}

}  // namespace semfuse::splitgen

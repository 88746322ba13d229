#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "semfuse/dataio/csv.hpp"

namespace semfuse::splitgen {

namespace fs = std::filesystem;

/// One frame (image or submap) that the split generator places in a set.
struct SampleRecord {
    std::string id;
    Eigen::Vector2d xy = Eigen::Vector2d::Zero();
    std::vector<std::uint64_t> class_counts;
    std::string sequence;     // e.g. V-01
    std::string season;       // winter / summer
    std::string environment;  // Venman / Karawatha

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto c : class_counts) s += c;
        return s;
    }
};

struct SampleTable {
    std::vector<std::string> class_names;
    std::vector<SampleRecord> samples;

    std::size_t num_classes() const { return class_names.size(); }

    void validate() const {
        for (const auto& s : samples) {
            if (s.class_counts.size() != class_names.size()) {
                throw Error(ErrorCode::RowLengthMismatch, "sample " + s.id + " has the wrong number of class counts");
            }
            if (s.total() == 0) throw Error(ErrorCode::InvalidArgument, "sample " + s.id + " has no labelled pixels/points");
        }
    }

    std::vector<Eigen::Vector2d> positions() const {
        std::vector<Eigen::Vector2d> xy;
        xy.reserve(samples.size());
        for (const auto& s : samples) xy.push_back(s.xy);
        return xy;
    }
};

inline constexpr std::array<std::string_view, 6> kSampleMetaColumns = {"id", "x", "y", "sequence", "season", "environment"};

/// CSV: id,x,y,sequence,season,environment followed by one column per class.
inline SampleTable parse_samples_csv(std::string_view text) {
    using namespace dataio;
    const auto rows = parse_csv(text);
    if (rows.empty()) throw Error(ErrorCode::MissingColumn, "samples CSV has no header");
    const auto& header = rows.front();
    std::array<std::ptrdiff_t, kSampleMetaColumns.size()> meta{};
    meta.fill(-1);
    std::vector<std::size_t> class_cols;
    SampleTable table;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string h = trim(header[c]);
        auto it = std::find(kSampleMetaColumns.begin(), kSampleMetaColumns.end(), h);
        if (it != kSampleMetaColumns.end()) {
            meta[it - kSampleMetaColumns.begin()] = static_cast<std::ptrdiff_t>(c);
        } else {
            class_cols.push_back(c);
            table.class_names.push_back(h);
        }
    }
    for (std::size_t k = 0; k < 3; ++k) {
        if (meta[k] < 0) throw Error(ErrorCode::MissingColumn, "samples CSV lacks column '" + std::string(kSampleMetaColumns[k]) + "'");
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) throw Error(ErrorCode::RowLengthMismatch, "samples CSV row " + std::to_string(r));
        SampleRecord s;
        s.id = trim(row[meta[0]]);
        s.xy = {parse_double(row[meta[1]]), parse_double(row[meta[2]])};
        if (meta[3] >= 0) s.sequence = trim(row[meta[3]]);
        if (meta[4] >= 0) s.season = trim(row[meta[4]]);
        if (meta[5] >= 0) s.environment = trim(row[meta[5]]);
        for (std::size_t c : class_cols) s.class_counts.push_back(parse_int<std::uint64_t>(row[c]));
        table.samples.push_back(std::move(s));
    }
    table.validate();
    return table;
}

/// JSON: {"class_names": [...], "samples": [{"id", "x", "y", "sequence",
/// "season", "environment", "class_counts": [...]}, ...]}
inline SampleTable parse_samples_json(const std::string& text) {
    SampleTable table;
    try {
        const auto doc = nlohmann::json::parse(text);
        table.class_names = doc.at("class_names").get<std::vector<std::string>>();
        for (const auto& j : doc.at("samples")) {
            SampleRecord s;
            s.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
            s.xy = {j.at("x").get<double>(), j.at("y").get<double>()};
            s.sequence = j.value("sequence", "");
            s.season = j.value("season", "");
            s.environment = j.value("environment", "");
            s.class_counts = j.at("class_counts").get<std::vector<std::uint64_t>>();
            table.samples.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MissingField, std::string("samples JSON: ") + e.what());
    }
    table.validate();
    return table;
}

inline SampleTable read_samples(const fs::path& path) {
    const std::string text = dataio::read_text_file(path);
    return path.extension() == ".json" ? parse_samples_json(text) : parse_samples_csv(text);
}

inline std::string format_samples_csv(const SampleTable& table) {
    using namespace dataio;
    std::string out = "id,x,y,sequence,season,environment";
    for (const auto& n : table.class_names) out += "," + csv_escape(n);
    out += kCsvEol;
    for (const auto& s : table.samples) {
        out += csv_escape(s.id) + "," + format_double(s.xy.x()) + "," + format_double(s.xy.y()) + "," + csv_escape(s.sequence) +
               "," + csv_escape(s.season) + "," + csv_escape(s.environment);
        for (auto c : s.class_counts) out += "," + std::to_string(c);
        out += kCsvEol;
    }
    return out;
}

}  // namespace semfuse::splitgen

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "semfuse/core/histogram.hpp"
#include "semfuse/dataio/csv.hpp"

namespace semfuse::dataio {

/// Header row names the classes; one row of integer counts per point follows,
/// in the same order as the paired cloud.
inline std::string format_histogram_csv(const HistogramArray& h, std::span<const std::string> class_names) {
    if (class_names.size() != h.num_classes() && !h.empty()) {
        throw Error(ErrorCode::RowLengthMismatch, "class name count differs from histogram width");
    }
    std::string out;
    out.reserve(h.rows() * h.num_classes() * 3 + 256);
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        if (c) out += ',';
        out += csv_escape(class_names[c]);
    }
    out += kCsvEol;
    char buf[16];
    for (std::size_t r = 0; r < h.rows(); ++r) {
        for (std::size_t c = 0; c < h.num_classes(); ++c) {
            if (c) out += ',';
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), h(r, c));
            out.append(buf, ptr);
        }
        out += kCsvEol;
    }
    return out;
}

inline void write_histogram_csv(const fs::path& path, const HistogramArray& h, std::span<const std::string> class_names) {
    write_text_file(path, format_histogram_csv(h, class_names));
}

struct HistogramTable {
    std::vector<std::string> class_names;
    HistogramArray histograms;
};

inline HistogramTable parse_histogram_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw Error(ErrorCode::RowLengthMismatch, "histogram CSV has no header row");
    HistogramTable table;
    for (const auto& name : rows.front()) table.class_names.push_back(trim(name));
    const std::size_t width = table.class_names.size();
    table.histograms = HistogramArray(0, width);
    std::vector<Count> values(width);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
            throw Error(ErrorCode::RowLengthMismatch, "histogram row " + std::to_string(r) + " has " +
                                                          std::to_string(rows[r].size()) + " fields, expected " +
                                                          std::to_string(width));
        }
        for (std::size_t c = 0; c < width; ++c) values[c] = parse_int<Count>(rows[r][c]);
        table.histograms.append_row(values);
    }
    return table;
}

inline HistogramTable read_histogram_csv(const fs::path& path) {
    try {
        return parse_histogram_csv(read_text_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IoError) throw;
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

}  // namespace semfuse::dataio

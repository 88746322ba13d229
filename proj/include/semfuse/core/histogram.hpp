#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semfuse/core/error.hpp"
#include "semfuse/core/ontology.hpp"

namespace semfuse {

using Count = std::uint32_t;

/// Row-major array of per-point label counts, one row of `num_classes` per point.
class HistogramArray {
public:
    HistogramArray() = default;
    HistogramArray(std::size_t rows, std::size_t num_classes)
        : rows_(rows), classes_(num_classes), data_(rows * num_classes, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t num_classes() const { return classes_; }
    bool empty() const { return rows_ == 0; }

    Count& operator()(std::size_t row, std::size_t cls) { return data_[row * classes_ + cls]; }
    Count operator()(std::size_t row, std::size_t cls) const { return data_[row * classes_ + cls]; }

    std::span<Count> row(std::size_t r) { return {data_.data() + r * classes_, classes_}; }
    std::span<const Count> row(std::size_t r) const { return {data_.data() + r * classes_, classes_}; }

    std::uint64_t row_sum(std::size_t r) const {
        std::uint64_t s = 0;
        for (Count c : row(r)) s += c;
        return s;
    }

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (Count c : data_) s += c;
        return s;
    }

    void append_row(std::span<const Count> values) {
        if (rows_ == 0 && classes_ == 0) classes_ = values.size();
        if (values.size() != classes_) {
            throw Error(ErrorCode::RowLengthMismatch,
                        "row of length " + std::to_string(values.size()) + ", expected " + std::to_string(classes_));
        }
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    HistogramArray select(std::span<const std::size_t> indices) const {
        HistogramArray out(indices.size(), classes_);
        for (std::size_t i = 0; i < indices.size(); ++i) {
            std::copy_n(data_.begin() + indices[i] * classes_, classes_, out.data_.begin() + i * classes_);
        }
        return out;
    }

    const std::vector<Count>& data() const { return data_; }
    std::vector<Count>& data() { return data_; }

    friend bool operator==(const HistogramArray&, const HistogramArray&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t classes_ = 0;
    std::vector<Count> data_;
};

/// Argmax with ties resolved to the lowest class index.
inline ClassIndex histogram_mode(std::span<const Count> row) {
    return static_cast<ClassIndex>(std::max_element(row.begin(), row.end()) - row.begin());
}

inline std::vector<ClassIndex> histogram_modes(const HistogramArray& h) {
    std::vector<ClassIndex> modes(h.rows());
    for (std::size_t i = 0; i < h.rows(); ++i) modes[i] = histogram_mode(h.row(i));
    return modes;
}

/// Elementwise sum of equally shaped histogram arrays.
inline HistogramArray merge_histograms(std::span<const HistogramArray> parts) {
    if (parts.empty()) return {};
    HistogramArray out(parts.front().rows(), parts.front().num_classes());
    for (const auto& p : parts) {
        if (p.rows() != out.rows() || p.num_classes() != out.num_classes()) {
            throw Error(ErrorCode::ShapeMismatch, "histogram parts differ in shape");
        }
        auto& dst = out.data();
        const auto& src = p.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    return out;
}

}  // namespace semfuse

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "semfuse/core/error.hpp"
#include "semfuse/core/ontology.hpp"

namespace semfuse::eval {

/// Rows are ground truth, columns predictions. Ground-truth ignore values are
/// skipped; a prediction of the ignore value counts as a miss for its row.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t num_classes = 0)
        : n_(num_classes), counts_(num_classes * num_classes, 0), unpredicted_(num_classes, 0) {}

    std::size_t num_classes() const { return n_; }
    std::uint64_t operator()(std::size_t gt, std::size_t pred) const { return counts_[gt * n_ + pred]; }
    std::uint64_t& operator()(std::size_t gt, std::size_t pred) { return counts_[gt * n_ + pred]; }
    std::uint64_t unpredicted(std::size_t gt) const { return unpredicted_[gt]; }

    std::uint64_t row_sum(std::size_t gt) const {
        std::uint64_t s = unpredicted_[gt];
        for (std::size_t p = 0; p < n_; ++p) s += (*this)(gt, p);
        return s;
    }
    std::uint64_t col_sum(std::size_t pred) const {
        std::uint64_t s = 0;
        for (std::size_t g = 0; g < n_; ++g) s += (*this)(g, pred);
        return s;
    }

    void add(ClassIndex gt, ClassIndex pred) {
        if (gt == kIgnoreLabel) return;
        if (gt >= n_) throw Error(ErrorCode::UnknownClassIndex, "ground-truth label " + std::to_string(gt));
        if (pred == kIgnoreLabel) {
            ++unpredicted_[gt];
            return;
        }
        if (pred >= n_) throw Error(ErrorCode::UnknownClassIndex, "predicted label " + std::to_string(pred));
        ++(*this)(gt, pred);
    }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        if (o.n_ != n_) throw Error(ErrorCode::ShapeMismatch, "confusion matrices differ in size");
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
        for (std::size_t i = 0; i < n_; ++i) unpredicted_[i] += o.unpredicted_[i];
        return *this;
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t n_;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> unpredicted_;
};

inline ConfusionMatrix accumulate_confusion(std::span<const ClassIndex> gt, std::span<const ClassIndex> pred, ConfusionMatrix cm) {
    if (gt.size() != pred.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(gt.size()) + " ground-truth vs " + std::to_string(pred.size()) + " predicted labels");
    }
    for (std::size_t i = 0; i < gt.size(); ++i) cm.add(gt[i], pred[i]);
    return cm;
}

/// TP / (TP + FP + FN); std::nullopt when the class never occurs in either.
inline std::vector<std::optional<double>> iou_per_class(const ConfusionMatrix& cm) {
    std::vector<std::optional<double>> iou(cm.num_classes());
    for (std::size_t c = 0; c < cm.num_classes(); ++c) {
        const auto tp = cm(c, c);
        const auto denom = cm.row_sum(c) + cm.col_sum(c) - tp;
        if (denom > 0) iou[c] = static_cast<double>(tp) / static_cast<double>(denom);
    }
    return iou;
}

enum class UndefinedIouPolicy { CountAsZero, Skip };

inline double miou(const ConfusionMatrix& cm, std::span<const ClassIndex> classes,
                   UndefinedIouPolicy policy = UndefinedIouPolicy::CountAsZero) {
    const auto iou = iou_per_class(cm);
    double sum = 0.0;
    std::size_t n = 0;
    for (ClassIndex c : classes) {
        if (iou.at(c)) {
            sum += *iou[c];
            ++n;
        } else if (policy == UndefinedIouPolicy::CountAsZero) {
            ++n;
        }
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace semfuse::eval

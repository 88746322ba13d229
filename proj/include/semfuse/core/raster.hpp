#pragma once

#include <cstdint>
#include <vector>

#include "semfuse/core/error.hpp"
#include "semfuse/core/ontology.hpp"

namespace semfuse {

/// Per-pixel class indices of an annotated image, row-major.
struct LabelRaster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    LabelRaster() = default;
    LabelRaster(int w, int h, std::uint8_t fill = static_cast<std::uint8_t>(kIgnoreLabel))
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int u, int v) const { return data[static_cast<std::size_t>(v) * width + u]; }
    std::uint8_t& at(int u, int v) { return data[static_cast<std::size_t>(v) * width + u]; }

    friend bool operator==(const LabelRaster&, const LabelRaster&) = default;
};

}  // namespace semfuse

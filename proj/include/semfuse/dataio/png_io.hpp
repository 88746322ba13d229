#pragma once

#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include <png.h>

#include "semfuse/core/ontology.hpp"
#include "semfuse/core/raster.hpp"
#include "semfuse/dataio/binary.hpp"

namespace semfuse::dataio {

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace detail

/// Decodes an 8-bit single-channel PNG without validating the values.
inline LabelRaster read_gray8_png(const fs::path& path) {
    detail::FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw Error(ErrorCode::IoError, "cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorCode::IoError, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorCode::IoError, "libpng init failed");
    }
    LabelRaster raster;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::IoError, "malformed PNG " + path.string());
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    const auto depth = png_get_bit_depth(png, info);
    if (color != PNG_COLOR_TYPE_GRAY || depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::InvalidArgument, path.string() + " is not an 8-bit grayscale PNG");
    }
    raster.width = static_cast<int>(png_get_image_width(png, info));
    raster.height = static_cast<int>(png_get_image_height(png, info));
    raster.data.assign(static_cast<std::size_t>(raster.width) * raster.height, 0);
    rows.resize(raster.height);
    for (int v = 0; v < raster.height; ++v) rows[v] = raster.data.data() + static_cast<std::size_t>(v) * raster.width;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return raster;
}

inline void write_gray8_png(const fs::path& path, const LabelRaster& raster) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    detail::FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw Error(ErrorCode::IoError, "cannot create " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorCode::IoError, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorCode::IoError, "libpng init failed");
    }
    std::vector<png_bytep> rows(raster.height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::IoError, "PNG encoding failed for " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, raster.width, raster.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    auto* base = const_cast<std::uint8_t*>(raster.data.data());
    for (int v = 0; v < raster.height; ++v) rows[v] = base + static_cast<std::size_t>(v) * raster.width;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Reads an indexLabel image; every pixel must be an eval class or the ignore value.
inline LabelRaster read_index_label_png(const fs::path& path, const ClassOntology& ontology) {
    LabelRaster raster = read_gray8_png(path);
    std::map<int, std::size_t> offending;
    for (std::uint8_t v : raster.data) {
        if (v != kIgnoreLabel && !ontology.is_valid_eval(v)) ++offending[v];
    }
    if (!offending.empty()) {
        std::string msg = path.string() + ":";
        for (const auto& [value, count] : offending) {
            msg += " value " + std::to_string(value) + " x" + std::to_string(count) + " px;";
        }
        throw Error(ErrorCode::UnknownClassIndex, msg);
    }
    return raster;
}

inline void write_index_label_png(const fs::path& path, const LabelRaster& raster) { write_gray8_png(path, raster); }

}  // namespace semfuse::dataio

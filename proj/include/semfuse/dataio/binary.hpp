#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "semfuse/core/error.hpp"

namespace semfuse::dataio {

namespace fs = std::filesystem;

namespace detail {

template <typename T>
T byteswap_if_needed(T value) {
    if constexpr (std::endian::native == std::endian::little) {
        return value;
    } else {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        std::memcpy(&value, bytes, sizeof(T));
        return value;
    }
}

}  // namespace detail

inline std::vector<char> read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<char> bytes(size);
    if (size > 0 && !in.read(bytes.data(), static_cast<std::streamsize>(size))) {
        throw Error(ErrorCode::IoError, "short read on " + path.string());
    }
    return bytes;
}

inline void write_file_bytes(const fs::path& path, std::span<const char> bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot create " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed on " + path.string());
}

/// Decodes a little-endian array of T; the byte count must be a multiple of
/// sizeof(T) * record_width.
template <typename T>
std::vector<T> decode_le(std::span<const char> bytes) {
    std::vector<T> out(bytes.size() / sizeof(T));
    std::memcpy(out.data(), bytes.data(), out.size() * sizeof(T));
    for (auto& v : out) v = detail::byteswap_if_needed(v);
    return out;
}

template <typename T>
std::vector<char> encode_le(std::span<const T> values) {
    std::vector<char> out(values.size() * sizeof(T));
    for (std::size_t i = 0; i < values.size(); ++i) {
        const T v = detail::byteswap_if_needed(values[i]);
        std::memcpy(out.data() + i * sizeof(T), &v, sizeof(T));
    }
    return out;
}

}  // namespace semfuse::dataio

#pragma once

#include <filesystem>
#include <string>

#include <yaml-cpp/yaml.h>

#include "semfuse/core/camera.hpp"
#include "semfuse/dataio/binary.hpp"
#include "semfuse/dataio/csv.hpp"

namespace semfuse::dataio {

// camera_calibration.yaml:
//
//   intrinsics: {fx: .., fy: .., cx: .., cy: .., width: .., height: ..}
//   extrinsic:                       # sensor body <- camera
//     translation: [x, y, z]
//     rotation: [qx, qy, qz, qw]

namespace detail {

inline YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& where) {
    const YAML::Node n = parent[key];
    if (!n) throw Error(ErrorCode::MissingField, "calibration lacks '" + where + key + "'");
    return n;
}

template <typename T>
T scalar(const YAML::Node& parent, const std::string& key, const std::string& where) {
    const YAML::Node n = require(parent, key, where);
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw Error(ErrorCode::MissingField, "calibration field '" + where + key + "' has the wrong type");
    }
}

inline std::vector<double> sequence(const YAML::Node& parent, const std::string& key, std::size_t n, const std::string& where) {
    const YAML::Node node = require(parent, key, where);
    if (!node.IsSequence() || node.size() != n) {
        throw Error(ErrorCode::MissingField, "calibration field '" + where + key + "' needs " + std::to_string(n) + " values");
    }
    std::vector<double> out;
    for (const auto& v : node) out.push_back(v.as<double>());
    return out;
}

}  // namespace detail

inline CameraModel parse_calibration(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::MissingField, std::string("calibration is not valid YAML: ") + e.what());
    }
    if (!root.IsMap()) throw Error(ErrorCode::MissingField, "calibration document is not a mapping");
    const YAML::Node intr = detail::require(root, "intrinsics", "");
    CameraModel cam;
    cam.fx = detail::scalar<double>(intr, "fx", "intrinsics.");
    cam.fy = detail::scalar<double>(intr, "fy", "intrinsics.");
    cam.cx = detail::scalar<double>(intr, "cx", "intrinsics.");
    cam.cy = detail::scalar<double>(intr, "cy", "intrinsics.");
    cam.width = detail::scalar<int>(intr, "width", "intrinsics.");
    cam.height = detail::scalar<int>(intr, "height", "intrinsics.");

    const YAML::Node ext = detail::require(root, "extrinsic", "");
    const auto t = detail::sequence(ext, "translation", 3, "extrinsic.");
    const auto q = detail::sequence(ext, "rotation", 4, "extrinsic.");
    cam.extrinsic.translation = Vec3(t[0], t[1], t[2]);
    cam.extrinsic.rotation = normalized_quaternion(q[0], q[1], q[2], q[3]);
    cam.validate();
    return cam;
}

inline CameraModel read_calibration(const fs::path& path) { return parse_calibration(read_text_file(path)); }

inline std::string format_calibration(const CameraModel& cam) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "intrinsics" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "fx" << YAML::Value << cam.fx;
    out << YAML::Key << "fy" << YAML::Value << cam.fy;
    out << YAML::Key << "cx" << YAML::Value << cam.cx;
    out << YAML::Key << "cy" << YAML::Value << cam.cy;
    out << YAML::Key << "width" << YAML::Value << cam.width;
    out << YAML::Key << "height" << YAML::Value << cam.height;
    out << YAML::EndMap;
    const auto& tr = cam.extrinsic.translation;
    const auto& q = cam.extrinsic.rotation;
    out << YAML::Key << "extrinsic" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "translation" << YAML::Value << YAML::Flow << YAML::BeginSeq << tr.x() << tr.y() << tr.z() << YAML::EndSeq;
    out << YAML::Key << "rotation" << YAML::Value << YAML::Flow << YAML::BeginSeq << q.x() << q.y() << q.z() << q.w() << YAML::EndSeq;
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

inline void write_calibration(const fs::path& path, const CameraModel& cam) { write_text_file(path, format_calibration(cam)); }

}  // namespace semfuse::dataio

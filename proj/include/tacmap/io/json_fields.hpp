#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <string>

#include <json.hpp>  // nlohmann/json (vendored)

#include "tacmap/error.hpp"
#include "tacmap/geometry/pose.hpp"

namespace tacmap::json_fields {

using nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Parses text, translating byte offsets in parse errors to line:column.
inline json parse_text(const std::string& text, const std::string& label) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(label + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": invalid JSON");
  }
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || it.key() == key;
    if (!ok) throw InputError("unknown field '" + join(path, it.key()) + "'");
  }
}

inline const json& object(const json& parent, const std::string& path, const char* key) {
  if (!parent.contains(key)) throw InputError("missing field '" + join(path, key) + "'");
  const json& value = parent.at(key);
  if (!value.is_object()) throw InputError("field '" + join(path, key) + "' must be an object");
  return value;
}

inline double number(const json& parent, const std::string& path, const char* key) {
  if (!parent.contains(key)) throw InputError("missing field '" + join(path, key) + "'");
  const json& value = parent.at(key);
  if (!value.is_number()) throw InputError("field '" + join(path, key) + "' must be a number");
  return value.get<double>();
}

inline std::optional<double> optional_number(const json& parent, const std::string& path,
                                             const char* key) {
  if (!parent.contains(key) || parent.at(key).is_null()) return std::nullopt;
  return number(parent, path, key);
}

inline int integer(const json& parent, const std::string& path, const char* key, int fallback) {
  if (!parent.contains(key)) return fallback;
  const json& value = parent.at(key);
  if (!value.is_number_integer()) {
    throw InputError("field '" + join(path, key) + "' must be an integer");
  }
  return value.get<int>();
}

inline std::string string(const json& parent, const std::string& path, const char* key) {
  if (!parent.contains(key)) throw InputError("missing field '" + join(path, key) + "'");
  const json& value = parent.at(key);
  if (!value.is_string()) throw InputError("field '" + join(path, key) + "' must be a string");
  return value.get<std::string>();
}

template <int N>
Eigen::Matrix<double, N, 1> vector(const json& parent, const std::string& path, const char* key) {
  if (!parent.contains(key)) throw InputError("missing field '" + join(path, key) + "'");
  const json& value = parent.at(key);
  if (!value.is_array() || value.size() != N) {
    throw InputError("field '" + join(path, key) + "' must be an array of " + std::to_string(N) +
                     " numbers");
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!value[i].is_number()) {
      throw InputError("field '" + join(path, key) + "' must be an array of numbers");
    }
    out[i] = value[i].get<double>();
  }
  return out;
}

// {"q": [w, x, y, z], "t": [x, y, z]} with t in meters.
inline RigidPose pose(const json& value, const std::string& path) {
  if (!value.is_object()) throw InputError("field '" + path + "' must be a pose object");
  reject_unknown(value, path, {"q", "t"});
  const Eigen::Vector4d q = vector<4>(value, path, "q");
  const Vec3 t = vector<3>(value, path, "t");
  try {
    return RigidPose::from_approximate(Quat(q[0], q[1], q[2], q[3]), t);
  } catch (const InputError& e) {
    throw InputError("field '" + join(path, "q") + "': " + e.what());
  }
}

inline json to_json(const RigidPose& p) {
  const Quat& q = p.rotation();
  const Vec3& t = p.translation();
  return json{{"q", {q.w(), q.x(), q.y(), q.z()}}, {"t", {t.x(), t.y(), t.z()}}};
}

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace tacmap::json_fields

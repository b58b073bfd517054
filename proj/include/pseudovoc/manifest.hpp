#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudovoc/error.hpp"
#include "pseudovoc/version.hpp"

namespace pseudovoc {

/// FNV-1a 64-bit over raw bytes; used to fingerprint inputs and outputs.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

inline std::string digest_string(const std::string& bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

/// Record of one CLI run: command, parameters, and digests of every input
/// and output file. Contains no timestamps, so replaying a run writes an
/// identical manifest.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
};

namespace detail {

inline nlohmann::ordered_json file_entry(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  nlohmann::ordered_json entry;
  entry["path"] = path.generic_string();
  entry["bytes"] = bytes.size();
  entry["digest"] = digest_string(bytes);
  return entry;
}

}  // namespace detail

inline std::string manifest_to_json(const RunManifest& manifest) {
  nlohmann::ordered_json doc;
  doc["tool"] = std::string(kToolName);
  doc["version"] = std::string(kVersion);
  doc["command"] = manifest.command;
  doc["params"] = manifest.params;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const auto& path : manifest.inputs) inputs.push_back(detail::file_entry(path));
  doc["inputs"] = std::move(inputs);
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (const auto& path : manifest.outputs) outputs.push_back(detail::file_entry(path));
  doc["outputs"] = std::move(outputs);
  return doc.dump(2) + "\n";
}

inline void write_manifest(const RunManifest& manifest,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << manifest_to_json(manifest);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write manifest '" + path.string() + "'");
}

}  // namespace pseudovoc

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "json.hpp"

namespace dimred::io {

// Writes `content` to a sibling temp file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

// CSV with a leading "# config_hash=<hash>" line. Doubles use %.17g so
// reruns are byte-identical.
std::string format_csv(const std::string& config_hash, const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows);
void write_csv(const std::string& path, const std::string& config_hash, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// JSON report; the object gains a "config_hash" member.
void write_json(const std::string& path, const std::string& config_hash, nlohmann::json report);

// Binary state dump: one ASCII header line
//   # dimred-state config_hash=<hash> M=<count> L=<length> format=complex64-le
// then M (re, im) pairs of little-endian IEEE single precision.
struct StateDump {
  std::string config_hash;
  std::size_t count = 0;
  double length = 0.0;
  std::vector<std::complex<float>> values;
};
void write_state(const std::string& path, const std::string& config_hash,
                 const std::vector<std::complex<double>>& values, double length);
StateDump read_state(const std::string& path);

// Creates the directory (and parents) if needed.
void ensure_directory(const std::string& dir);

}  // namespace dimred::io

#include "dimred/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dimred/errors.hpp"

namespace dimred::io {

void ensure_directory(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw ConfigError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

std::string format_csv(const std::string& config_hash, const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows) {
  std::string s = "# config_hash=" + config_hash + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
  s += "\n";
  char buf[40];
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r[i]);
      if (i) s += ",";
      s += buf;
    }
    s += "\n";
  }
  return s;
}

void write_csv(const std::string& path, const std::string& config_hash, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  write_atomic(path, format_csv(config_hash, columns, rows));
}

void write_json(const std::string& path, const std::string& config_hash, nlohmann::json report) {
  report["config_hash"] = config_hash;
  write_atomic(path, report.dump(2) + "\n");
}

namespace {

void put_le(std::string& s, float f) {
  const auto u = std::bit_cast<std::uint32_t>(f);
  for (int b = 0; b < 4; ++b) s.push_back(static_cast<char>((u >> (8 * b)) & 0xffu));
}

float get_le(const unsigned char* p) {
  std::uint32_t u = 0;
  for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return std::bit_cast<float>(u);
}

}  // namespace

void write_state(const std::string& path, const std::string& config_hash,
                 const std::vector<std::complex<double>>& values, double length) {
  char head[200];
  std::snprintf(head, sizeof head, "# dimred-state config_hash=%s M=%zu L=%.17g format=complex64-le\n",
                config_hash.c_str(), values.size(), length);
  std::string s = head;
  s.reserve(s.size() + 8 * values.size());
  for (const auto& v : values) {
    put_le(s, static_cast<float>(v.real()));
    put_le(s, static_cast<float>(v.imag()));
  }
  write_atomic(path, s);
}

StateDump read_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open state file '" + path + "'");
  std::string head;
  std::getline(in, head);
  StateDump d;
  char hash[64] = {0};
  double len = 0.0;
  unsigned long long m = 0;
  if (std::sscanf(head.c_str(), "# dimred-state config_hash=%63s M=%llu L=%lf", hash, &m, &len) != 3) {
    throw ConfigError("'" + path + "' is not a state dump");
  }
  d.config_hash = hash;
  d.count = m;
  d.length = len;
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (body.size() != 8 * m) throw ConfigError("state dump '" + path + "' is truncated");
  const auto* p = reinterpret_cast<const unsigned char*>(body.data());
  for (std::size_t i = 0; i < m; ++i) d.values.emplace_back(get_le(p + 8 * i), get_le(p + 8 * i + 4));
  return d;
}

}  // namespace dimred::io

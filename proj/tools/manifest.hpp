#pragma once

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "mublab/io.hpp"
#include "mublab/version.hpp"

namespace mublab::cli {

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 init failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const std::streamsize got = in.gcount();
    if (got <= 0) break;
    if (EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw std::runtime_error("sha256 update failed");
    }
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

inline std::string iso8601_utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Collects the files a command writes and finishes with manifest.json:
/// command, parameters, seed, version, timestamps and per-file sha256.
class ManifestWriter {
 public:
  ManifestWriter(std::string out_dir, std::string command, Json parameters,
                 std::uint64_t seed)
      : out_dir_(std::move(out_dir)),
        command_(std::move(command)),
        parameters_(std::move(parameters)),
        seed_(seed),
        started_(iso8601_utc_now()) {
    std::filesystem::create_directories(out_dir_);
  }

  /// Full path for an output name; the file is recorded for hashing.
  std::string file(const std::string& name) {
    outputs_.push_back(name);
    return path(name);
  }

  /// Full path without recording (for writers that append suffixes).
  std::string path(const std::string& name) const {
    return (std::filesystem::path(out_dir_) / name).string();
  }

  /// Record a file some other writer produced under dir().
  void note(const std::string& name) { outputs_.push_back(name); }

  const std::string& dir() const { return out_dir_; }

  void write() const {
    Json files = Json::array();
    for (const std::string& name : outputs_) {
      const auto full = std::filesystem::path(out_dir_) / name;
      files.push_back({{"path", name},
                       {"bytes", std::filesystem::file_size(full)},
                       {"sha256", sha256_file(full.string())}});
    }
    const Json manifest = {{"command", command_},   {"parameters", parameters_},
                           {"seed", seed_},         {"version", mublab::kVersion},
                           {"started", started_},   {"finished", iso8601_utc_now()},
                           {"outputs", files}};
    write_json_file((std::filesystem::path(out_dir_) / "manifest.json").string(), manifest);
  }

 private:
  std::string out_dir_;
  std::string command_;
  Json parameters_;
  std::uint64_t seed_ = 0;
  std::string started_;
  std::vector<std::string> outputs_;
};

}  // namespace mublab::cli

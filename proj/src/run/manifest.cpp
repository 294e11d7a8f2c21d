#include "run/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace cadaft {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("sha256: cannot allocate digest context");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256: digest computation failed");
  }
  EVP_MD_CTX_free(ctx);
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string hash_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open file for hashing: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return "sha256:" + sha256_hex(ss.str());
}

void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::ordered_json& config_echo, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& dataset_hashes) {
  nlohmann::ordered_json j;
  j["tool"] = "cadaft";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["seed"] = seed;
  {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    j["created_utc"] = buf;
  }
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto& [name, hash] : dataset_hashes) files[name] = hash;
  j["datasets"] = files;
  j["config"] = config_echo;
  std::ofstream os(path);
  if (!os) throw IoError("cannot open manifest for writing: " + path);
  os << j.dump(2) << "\n";
  if (!os) throw IoError("write failed for manifest: " + path);
}

}  // namespace cadaft

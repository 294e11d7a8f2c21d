#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace cadaft {

constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(const std::string& bytes);
std::string hash_file(const std::string& path);  // "sha256:<hex>" over the raw bytes

/// Run manifest: the config echo, content hashes of every dataset file the
/// command touched, the seed and the tool version. Manifest plus datasets
/// reproduce the run; the created timestamp is informational only.
void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::ordered_json& config_echo, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& dataset_hashes);

}  // namespace cadaft

#include "data/dataset.hpp"

#include <fstream>

#include "core/error.hpp"

namespace cadaft {

using nlohmann::ordered_json;

const std::vector<std::string>& SplitSet::names() {
  static const std::vector<std::string> kNames = {"source_train", "id_test", "target_unlabeled",
                                                  "target_fewshot", "ood_test"};
  return kNames;
}

std::vector<Instance>& SplitSet::by_name(const std::string& name) {
  if (name == "source_train") return source_train;
  if (name == "id_test") return id_test;
  if (name == "target_unlabeled") return target_unlabeled;
  if (name == "target_fewshot") return target_fewshot;
  if (name == "ood_test") return ood_test;
  throw ConfigError("unknown split '" + name + "'");
}

const std::vector<Instance>& SplitSet::by_name(const std::string& name) const {
  return const_cast<SplitSet*>(this)->by_name(name);
}

std::string split_file_name(const std::string& split) {
  std::string s = split;
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return s + ".jsonl";
}

namespace {

constexpr const char* kFormat = "cadaft-dataset";
constexpr int kVersion = 1;

ordered_json instance_to_json(const Instance& inst) {
  ordered_json j;
  j["x"] = inst.x;
  if (inst.y.has_value()) {
    j["y"] = *inst.y;
  } else {
    j["y"] = nullptr;
  }
  j["s"] = inst.domain;
  if (inst.t.empty()) {
    j["t"] = nullptr;
  } else {
    ordered_json arr = ordered_json::array();
    bool all_missing = true;
    for (const auto& v : inst.t) {
      if (v.has_value()) {
        arr.push_back(*v);
        all_missing = false;
      } else {
        arr.push_back(nullptr);
      }
    }
    if (all_missing) {
      j["t"] = nullptr;
    } else {
      j["t"] = arr;
    }
  }
  j["split"] = inst.split;
  return j;
}

Instance instance_from_json(const ordered_json& j, const std::string& path, std::size_t line_no) {
  const auto fail = [&](const std::string& what) -> void {
    throw IoError(path + ":" + std::to_string(line_no) + ": " + what);
  };
  Instance inst;
  if (!j.contains("x") || !j["x"].is_array()) fail("record missing float array 'x'");
  inst.x = j["x"].get<std::vector<double>>();
  if (!j.contains("y")) fail("record missing 'y'");
  if (!j["y"].is_null()) inst.y = j["y"].get<int>();
  if (!j.contains("s") || !j["s"].is_number_integer()) fail("record missing integer 's'");
  inst.domain = j["s"].get<int>();
  if (!j.contains("t")) fail("record missing 't'");
  if (!j["t"].is_null()) {
    for (const auto& v : j["t"]) {
      if (v.is_null()) {
        inst.t.emplace_back(std::nullopt);
      } else {
        inst.t.emplace_back(v.get<int>());
      }
    }
  }
  if (!j.contains("split") || !j["split"].is_string()) fail("record missing string 'split'");
  inst.split = j["split"].get<std::string>();
  return inst;
}

}  // namespace

void write_dataset(const std::string& path, const ordered_json& header_echo,
                   const std::vector<Instance>& instances) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open dataset for writing: " + path);
  ordered_json header;
  header["format"] = kFormat;
  header["version"] = kVersion;
  header["spec"] = header_echo;
  header["count"] = instances.size();
  os << header.dump() << "\n";
  for (const Instance& inst : instances) {
    os << instance_to_json(inst).dump() << "\n";
  }
  if (!os) throw IoError("write failed for dataset: " + path);
}

DatasetFile read_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open dataset: " + path);
  DatasetFile out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (line_no == 1) {
      if (!j.contains("format") || j["format"] != kFormat) {
        throw IoError(path + ": not a " + std::string(kFormat) + " file");
      }
      if (!j.contains("version") || j["version"].get<int>() != kVersion) {
        throw IoError(path + ": unsupported dataset version");
      }
      out.header = j;
      continue;
    }
    out.instances.push_back(instance_from_json(j, path, line_no));
  }
  if (line_no == 0) throw IoError(path + ": empty dataset file (missing header)");
  return out;
}

std::size_t feature_width(const std::vector<Instance>& instances) {
  if (instances.empty()) throw ContractViolation("feature_width of an empty split");
  return instances.front().x.size();
}

}  // namespace cadaft

#pragma once

#include <cstdint>
#include <string>

#include "data/synthetic.hpp"
#include "data/textlike.hpp"
#include "json.hpp"
#include "model/cadaft_model.hpp"
#include "train/trainer.hpp"

namespace cadaft {

enum class DataKind { numeric, textlike };

/// One structured config per run. Parsed from JSON (line comments allowed);
/// individual keys can be overridden with dotted paths, so a manifest's
/// config echo plus the datasets reproduce a run exactly.
struct RunConfig {
  std::uint64_t seed = 1;
  DataKind kind = DataKind::numeric;
  SyntheticSpec numeric;
  TextlikeSpec textlike;
  std::size_t latent = 8;
  std::vector<std::size_t> extractor_hidden = {32};
  std::vector<std::size_t> head_hidden = {};
  Activation activation = Activation::tanh;
  TrainConfig train;
  std::string resume_checkpoint;
  bool dump_representations = false;

  void validate() const;
  ModelDims model_dims() const;  // derived from the data section
  nlohmann::ordered_json echo() const;
};

RunConfig default_config();
RunConfig parse_config(const nlohmann::ordered_json& j);
RunConfig load_config(const std::string& path);

/// Override one key by dotted path ("train.lr", "data.numeric.rho", ...).
/// The value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::ordered_json& j, const std::string& dotted_key,
                    const std::string& value);

nlohmann::ordered_json config_to_json(const RunConfig& cfg);

}  // namespace cadaft

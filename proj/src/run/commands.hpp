#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "run/config.hpp"

namespace cadaft {

/// Resolve an output directory against the optional CADAFT_OUTPUT_ROOT
/// environment variable (relative paths only) and create it.
std::string prepare_out_dir(const std::string& out_dir);

/// Write the benchmark splits named by the config plus a manifest.
void cmd_generate(const RunConfig& cfg, const std::string& out_dir);

/// Run the training schedule on datasets under data_dir; writes metrics.csv,
/// model.ckpt and manifest.json into out_dir.
void cmd_train(const RunConfig& cfg, const std::string& data_dir, const std::string& out_dir);

/// Train {erm_only, no_confounder, full} per seed on datasets generated from
/// the config; per-run artifacts land in runs/<ablation>-s<seed>/ and the
/// comparison table in ablation.csv.
void cmd_ablation(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds,
                  const std::string& out_dir);

/// Annotate a sentence-pair file with the overlap confounder at the given
/// threshold (default 0.4) and write the per-label threshold sweep next to
/// it. Nothing is written when the input is malformed.
void cmd_annotate(const std::string& input_path, const std::string& output_path,
                  std::optional<double> alpha, std::optional<std::string> sweep_path);

}  // namespace cadaft

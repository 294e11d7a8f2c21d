// cadaft command-line interface. Talks to the core exclusively through the
// public C API; exit status 0 = success, 1 = runtime failure, 2 = invalid
// configuration or arguments.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cadaft/cadaft.h"

namespace {

struct ConfigHandle {
  cadaft_config* ptr = nullptr;
  ~ConfigHandle() { cadaft_config_free(ptr); }
};

int report(cadaft_status status) {
  if (status != CADAFT_OK) {
    std::fprintf(stderr, "cadaft: error: %s\n", cadaft_last_error());
  }
  return static_cast<int>(status);
}

cadaft_status open_config(const std::string& path, unsigned long long seed, bool seed_set,
                          const std::vector<std::string>& overrides, ConfigHandle& handle) {
  cadaft_status st = path.empty() ? cadaft_config_default(&handle.ptr)
                                  : cadaft_config_load(path.c_str(), &handle.ptr);
  if (st != CADAFT_OK) return st;
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "cadaft: error: --set expects key=value, got '%s'\n", kv.c_str());
      return CADAFT_ERR_CONFIG;
    }
    st = cadaft_config_set(handle.ptr, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != CADAFT_OK) return st;
  }
  if (seed_set) {
    st = cadaft_config_set(handle.ptr, "seed", std::to_string(seed).c_str());
  }
  return st;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cadaft: confounder-balanced adversarial domain adaptation laboratory"};
  app.set_version_flag("--version", std::string("cadaft ") + cadaft_version());
  app.require_subcommand(1);

  std::string config_path, out_dir, data_dir;
  unsigned long long seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;

  const auto add_common = [&](CLI::App* cmd, bool with_config) {
    if (with_config) {
      cmd->add_option("-c,--config", config_path, "config file (JSON, comments allowed)");
      cmd->add_option("--set", overrides, "override a config key, e.g. --set train.lr=0.01")
          ->take_all();
      cmd->add_option_function<unsigned long long>(
             "--seed", [&](unsigned long long s) { seed = s; seed_set = true; },
             "override the run seed");
    }
    cmd->add_option("-o,--out", out_dir, "output directory")->required();
  };

  CLI::App* generate = app.add_subcommand("generate", "write benchmark dataset splits");
  add_common(generate, true);

  CLI::App* train = app.add_subcommand("train", "run the training schedule");
  add_common(train, true);
  train->add_option("-d,--data", data_dir, "directory with dataset splits")->required();
  std::string resume;
  train->add_option("--resume", resume, "checkpoint to start from");

  CLI::App* ablation = app.add_subcommand("ablation", "compare erm_only / no_confounder / full");
  add_common(ablation, true);
  std::vector<unsigned long> seeds;
  ablation->add_option("--seeds", seeds, "training seeds, e.g. --seeds 1 2 3 4 5")
      ->required()
      ->take_all();

  CLI::App* annotate = app.add_subcommand("annotate", "annotate sentence pairs with the overlap confounder");
  std::string input_path, output_path, sweep_path;
  double alpha = -1.0;
  annotate->add_option("-i,--input", input_path, "sentence-pair file")->required();
  annotate->add_option("-o,--out", output_path, "annotated output file")->required();
  annotate->add_option("--alpha", alpha, "overlap threshold (default 0.4)");
  annotate->add_option("--sweep", sweep_path, "sweep table path (default <out>.sweep.csv)");

  CLI11_PARSE(app, argc, argv);

  if (annotate->parsed()) {
    return report(cadaft_annotate(input_path.c_str(), output_path.c_str(), alpha,
                                  sweep_path.empty() ? nullptr : sweep_path.c_str()));
  }

  ConfigHandle cfg;
  cadaft_status st = open_config(config_path, seed, seed_set, overrides, cfg);
  if (st != CADAFT_OK) return report(st);

  if (generate->parsed()) {
    return report(cadaft_generate(cfg.ptr, out_dir.c_str()));
  }
  if (train->parsed()) {
    if (!resume.empty()) {
      st = cadaft_config_set(cfg.ptr, "train.resume", resume.c_str());
      if (st != CADAFT_OK) return report(st);
    }
    return report(cadaft_train(cfg.ptr, data_dir.c_str(), out_dir.c_str()));
  }
  if (ablation->parsed()) {
    return report(cadaft_ablation(cfg.ptr, seeds.data(), seeds.size(), out_dir.c_str()));
  }
  return 1;
}

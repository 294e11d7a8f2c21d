#include "run/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "core/error.hpp"
#include "eval/ablation.hpp"
#include "eval/metrics.hpp"
#include "run/manifest.hpp"

namespace cadaft {

namespace fs = std::filesystem;

std::string prepare_out_dir(const std::string& out_dir) {
  fs::path p(out_dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv("CADAFT_OUTPUT_ROOT"); root && *root) {
      p = fs::path(root) / p;
    }
  }
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory " + p.string() + ": " + ec.message());
  return p.string();
}

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::vector<std::pair<std::string, std::string>> hash_all(const std::string& dir,
                                                          const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(names.size());
  for (const std::string& n : names) out.emplace_back(n, hash_file(join(dir, n)));
  return out;
}

SplitSet generate_splits(const RunConfig& cfg, TextlikeData* textlike_out = nullptr) {
  if (cfg.kind == DataKind::numeric) {
    return generate_numeric(cfg.numeric, cfg.seed);
  }
  TextlikeData data = generate_textlike(cfg.textlike, cfg.seed);
  if (textlike_out) *textlike_out = data;
  return std::move(data.instances);
}

}  // namespace

void cmd_generate(const RunConfig& cfg, const std::string& out_dir_in) {
  const std::string out_dir = prepare_out_dir(out_dir_in);
  TextlikeData textlike;
  const SplitSet splits = generate_splits(cfg, &textlike);
  const nlohmann::ordered_json echo =
      cfg.kind == DataKind::numeric ? cfg.numeric.echo() : cfg.textlike.echo();
  std::vector<std::string> files;
  for (const std::string& split : SplitSet::names()) {
    const std::string name = split_file_name(split);
    write_dataset(join(out_dir, name), echo, splits.by_name(split));
    files.push_back(name);
  }
  if (cfg.kind == DataKind::textlike) {
    for (std::size_t i = 0; i < SplitSet::names().size(); ++i) {
      const std::string name = "pairs-" + split_file_name(SplitSet::names()[i]);
      write_pairs(join(out_dir, name), echo, textlike.pairs[i]);
      files.push_back(name);
    }
  }
  write_manifest(join(out_dir, "manifest.json"), "generate", cfg.echo(), cfg.seed,
                 hash_all(out_dir, files));
}

void cmd_train(const RunConfig& cfg, const std::string& data_dir, const std::string& out_dir_in) {
  const std::string out_dir = prepare_out_dir(out_dir_in);
  const ModelDims dims = cfg.model_dims();

  SplitSet data;
  std::vector<std::string> loaded;
  const bool erm = cfg.train.ablation == Ablation::erm_only;
  for (const std::string& split : SplitSet::names()) {
    const std::string name = split_file_name(split);
    const std::string path = join(data_dir, name);
    const bool target_split =
        split == "target_unlabeled" || split == "target_fewshot" || split == "ood_test";
    if (!fs::exists(path)) {
      if (erm && (split == "target_unlabeled" || split == "target_fewshot")) continue;
      throw IoError("missing dataset split: " + path);
    }
    if (erm && (split == "target_unlabeled" || split == "target_fewshot")) {
      continue;  // source-only training ignores the target pools
    }
    (void)target_split;
    data.by_name(split) = read_dataset(path).instances;
    loaded.push_back(name);
  }
  const std::size_t width = feature_width(data.source_train);
  if (width != dims.input) {
    throw ConfigError("dataset feature width " + std::to_string(width) +
                      " does not match the configured model input " + std::to_string(dims.input));
  }

  Trainer::EpochHook hook = nullptr;
  if (cfg.train.checkpoint_every > 0) {
    hook = [&](const CadaftModel& m, std::size_t epoch) {
      if (epoch % cfg.train.checkpoint_every == 0) {
        save_checkpoint(m, join(out_dir, "model-epoch" + std::to_string(epoch) + ".ckpt"));
      }
    };
  }

  TrainResult result = cfg.resume_checkpoint.empty()
                           ? train(dims, cfg.train, data, hook)
                           : train_from(load_checkpoint(cfg.resume_checkpoint), cfg.train, data, hook);

  write_metrics_csv(join(out_dir, "metrics.csv"), result.history.records, dims.confounder_arity.size(),
                    dims.confounder_arity, result.history.warnings);
  save_checkpoint(result.model, join(out_dir, "model.ckpt"));
  if (cfg.dump_representations) {
    dump_representations(result.model, data.id_test, join(out_dir, "repr-id-test.csv"));
    dump_representations(result.model, data.ood_test, join(out_dir, "repr-ood-test.csv"));
  }
  std::vector<std::pair<std::string, std::string>> hashes;
  for (const std::string& name : loaded) hashes.emplace_back(name, hash_file(join(data_dir, name)));
  write_manifest(join(out_dir, "manifest.json"), "train", cfg.echo(), cfg.seed, hashes);
  if (result.phase_violations != 0) {
    throw Error("phase isolation violated " + std::to_string(result.phase_violations) + " times");
  }
}

void cmd_ablation(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds,
                  const std::string& out_dir_in) {
  if (seeds.empty()) throw ConfigError("ablation needs at least one seed");
  const std::string out_dir = prepare_out_dir(out_dir_in);
  const SplitSet data = generate_splits(cfg);
  const ModelDims dims = cfg.model_dims();

  const AblationSink sink = [&](const AblationRunResult& run) {
    const std::string run_dir =
        prepare_out_dir(join(out_dir, join("runs", run.ablation + "-s" + std::to_string(run.seed))));
    write_metrics_csv(join(run_dir, "metrics.csv"), run.result->history.records,
                      dims.confounder_arity.size(), dims.confounder_arity,
                      run.result->history.warnings);
    save_checkpoint(run.result->model, join(run_dir, "model.ckpt"));
  };
  const ComparisonTable table = run_ablation_suite(dims, cfg.train, data, seeds, sink);
  write_comparison_csv(join(out_dir, "ablation.csv"), table);
  write_manifest(join(out_dir, "manifest.json"), "ablation", cfg.echo(), cfg.seed, {});
}

void cmd_annotate(const std::string& input_path, const std::string& output_path,
                  std::optional<double> alpha, std::optional<std::string> sweep_path) {
  const double a = alpha.value_or(0.4);
  if (a < 0.0 || a > 1.0) throw ConfigError("alpha must be in [0, 1], got " + std::to_string(a));
  const PairsFile in = read_pairs(input_path);  // throws before anything is written

  std::vector<int> t;
  t.reserve(in.pairs.size());
  for (const SentencePair& p : in.pairs) t.push_back(annotate_overlap(p, a));

  nlohmann::ordered_json echo = in.header.contains("spec") ? in.header["spec"]
                                                           : nlohmann::ordered_json::object();
  echo["alpha"] = a;
  write_pairs(output_path, echo, in.pairs, &t);

  const std::string sweep_file = sweep_path.value_or(output_path + ".sweep.csv");
  std::ofstream os(sweep_file);
  if (!os) throw IoError("cannot open sweep table for writing: " + sweep_file);
  os << "# cadaft-sweep v1\n";
  os << "alpha,label,frac_high\n";
  if (!in.pairs.empty()) {
    const std::vector<AlphaSweepRow> rows = sweep_alpha(in.pairs, default_alpha_grid());
    char buf[40];
    for (const AlphaSweepRow& row : rows) {
      for (std::size_t label = 0; label < row.frac_high_per_label.size(); ++label) {
        std::snprintf(buf, sizeof buf, "%.17g", row.alpha);
        os << buf << "," << label << ",";
        std::snprintf(buf, sizeof buf, "%.17g", row.frac_high_per_label[label]);
        os << buf << "\n";
      }
    }
  }
  if (!os) throw IoError("write failed for sweep table: " + sweep_file);
}

}  // namespace cadaft

#include "cadaft/cadaft.h"

#include <sstream>
#include <string>

#include "core/error.hpp"
#include "data/textlike.hpp"
#include "run/commands.hpp"
#include "run/config.hpp"
#include "run/manifest.hpp"

using cadaft::ConfigError;
using cadaft::Error;

struct cadaft_config {
  nlohmann::ordered_json json;
  std::string json_cache;
};

namespace {

thread_local std::string g_last_error;

cadaft_status fail(cadaft_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
cadaft_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CADAFT_OK;
  } catch (const ConfigError& e) {
    return fail(CADAFT_ERR_CONFIG, e.what());
  } catch (const Error& e) {
    return fail(CADAFT_ERR_RUNTIME, e.what());
  } catch (const std::exception& e) {
    return fail(CADAFT_ERR_RUNTIME, e.what());
  }
}

cadaft::RunConfig materialize(const cadaft_config* config) {
  if (!config) throw ConfigError("null config handle");
  return cadaft::parse_config(config->json);
}

std::vector<std::string> split_ws(const char* s) {
  std::vector<std::string> out;
  if (!s) return out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

extern "C" {

const char* cadaft_version(void) { return cadaft::kToolVersion; }

const char* cadaft_last_error(void) { return g_last_error.c_str(); }

cadaft_status cadaft_config_default(cadaft_config** out_config) {
  return guarded([&] {
    if (!out_config) throw ConfigError("null output parameter");
    *out_config = new cadaft_config{cadaft::config_to_json(cadaft::default_config()), {}};
  });
}

cadaft_status cadaft_config_load(const char* path, cadaft_config** out_config) {
  return guarded([&] {
    if (!path || !out_config) throw ConfigError("null argument");
    const cadaft::RunConfig cfg = cadaft::load_config(path);
    *out_config = new cadaft_config{cadaft::config_to_json(cfg), {}};
  });
}

cadaft_status cadaft_config_set(cadaft_config* config, const char* dotted_key, const char* value) {
  return guarded([&] {
    if (!config || !dotted_key || !value) throw ConfigError("null argument");
    nlohmann::ordered_json candidate = config->json;
    cadaft::apply_override(candidate, dotted_key, value);
    cadaft::parse_config(candidate);  // reject bad keys/values before committing
    config->json = std::move(candidate);
  });
}

const char* cadaft_config_json(cadaft_config* config) {
  if (!config) return "";
  config->json_cache = config->json.dump(2);
  return config->json_cache.c_str();
}

void cadaft_config_free(cadaft_config* config) { delete config; }

cadaft_status cadaft_generate(const cadaft_config* config, const char* out_dir) {
  return guarded([&] {
    if (!out_dir) throw ConfigError("null output directory");
    cadaft::cmd_generate(materialize(config), out_dir);
  });
}

cadaft_status cadaft_train(const cadaft_config* config, const char* data_dir, const char* out_dir) {
  return guarded([&] {
    if (!data_dir || !out_dir) throw ConfigError("null directory argument");
    cadaft::cmd_train(materialize(config), data_dir, out_dir);
  });
}

cadaft_status cadaft_ablation(const cadaft_config* config, const unsigned long* seeds,
                              size_t seed_count, const char* out_dir) {
  return guarded([&] {
    if (!out_dir) throw ConfigError("null output directory");
    if (!seeds || seed_count == 0) throw ConfigError("ablation needs at least one seed");
    std::vector<std::uint64_t> seed_list(seeds, seeds + seed_count);
    cadaft::cmd_ablation(materialize(config), seed_list, out_dir);
  });
}

cadaft_status cadaft_annotate(const char* input_path, const char* output_path, double alpha,
                              const char* sweep_csv_path) {
  return guarded([&] {
    if (!input_path || !output_path) throw ConfigError("null path argument");
    std::optional<double> a;
    if (alpha >= 0.0) a = alpha;
    std::optional<std::string> sweep;
    if (sweep_csv_path) sweep = std::string(sweep_csv_path);
    cadaft::cmd_annotate(input_path, output_path, a, sweep);
  });
}

double cadaft_overlap_score(const char* sentence_1, const char* sentence_2) {
  try {
    const double score = cadaft::overlap_score(split_ws(sentence_1), split_ws(sentence_2));
    g_last_error.clear();
    return score;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return -1.0;
  }
}

}  // extern "C"

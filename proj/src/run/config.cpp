#include "run/config.hpp"

#include <fstream>

#include "core/error.hpp"

namespace cadaft {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void unknown_key(const std::string& path, const std::string& key) {
  throw ConfigError("unknown config key '" + (path.empty() ? key : path + "." + key) + "'");
}

template <typename T>
T get_as(const ordered_json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + path + "' has the wrong type");
  }
}

void parse_sizes(const ordered_json& j, const std::string& path, std::size_t& src, std::size_t& id,
                 std::size_t& unl, std::size_t& few, std::size_t& ood) {
  for (const auto& [key, val] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "source_train") src = get_as<std::size_t>(val, p);
    else if (key == "id_test") id = get_as<std::size_t>(val, p);
    else if (key == "target_unlabeled") unl = get_as<std::size_t>(val, p);
    else if (key == "target_fewshot") few = get_as<std::size_t>(val, p);
    else if (key == "ood_test") ood = get_as<std::size_t>(val, p);
    else unknown_key(path, key);
  }
}

SyntheticSpec parse_numeric(const ordered_json& j, SyntheticSpec spec) {
  const std::string path = "data.numeric";
  for (const auto& [key, val] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "d_core") spec.d_core = get_as<std::size_t>(val, p);
    else if (key == "d_conf") spec.d_conf = get_as<std::size_t>(val, p);
    else if (key == "classes") spec.classes = get_as<std::size_t>(val, p);
    else if (key == "domains") spec.domains = get_as<std::size_t>(val, p);
    else if (key == "confounders") spec.confounders = get_as<std::size_t>(val, p);
    else if (key == "conf_arity") spec.conf_arity = get_as<std::vector<std::size_t>>(val, p);
    else if (key == "rho") spec.rho = get_as<std::vector<double>>(val, p);
    else if (key == "mu") spec.mu = get_as<double>(val, p);
    else if (key == "nu") spec.nu = get_as<double>(val, p);
    else if (key == "sigma") spec.sigma = get_as<double>(val, p);
    else if (key == "sizes") parse_sizes(val, p, spec.n_source_train, spec.n_id_test,
                                         spec.n_target_unlabeled, spec.n_target_fewshot,
                                         spec.n_ood_test);
    else unknown_key(path, key);
  }
  return spec;
}

TextlikeSpec parse_textlike(const ordered_json& j, TextlikeSpec spec) {
  const std::string path = "data.textlike";
  for (const auto& [key, val] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "vocab") spec.vocab = get_as<std::size_t>(val, p);
    else if (key == "sentence_len") spec.sentence_len = get_as<std::size_t>(val, p);
    else if (key == "classes") spec.classes = get_as<std::size_t>(val, p);
    else if (key == "domains") spec.domains = get_as<std::size_t>(val, p);
    else if (key == "alpha") spec.alpha = get_as<double>(val, p);
    else if (key == "p_high") {
      spec.p_high.clear();
      for (const auto& row : val) {
        const auto pair = get_as<std::vector<double>>(row, p);
        if (pair.size() != 2) throw ConfigError("config key '" + p + "' entries must be [p_y1, p_y0]");
        spec.p_high.push_back({pair[0], pair[1]});
      }
    } else if (key == "sizes") {
      parse_sizes(val, p, spec.n_source_train, spec.n_id_test, spec.n_target_unlabeled,
                  spec.n_target_fewshot, spec.n_ood_test);
    } else {
      unknown_key(path, key);
    }
  }
  return spec;
}

TrainConfig parse_train(const ordered_json& j, TrainConfig t, std::string* resume) {
  const std::string path = "train";
  for (const auto& [key, val] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "epochs") t.epochs = get_as<std::size_t>(val, p);
    else if (key == "disc_steps") t.disc_steps = get_as<std::size_t>(val, p);
    else if (key == "batch") t.batch = get_as<std::size_t>(val, p);
    else if (key == "lr") t.lr = get_as<double>(val, p);
    else if (key == "lambda") t.lambda = get_as<double>(val, p);
    else if (key == "weight_decay") t.weight_decay = get_as<double>(val, p);
    else if (key == "ablation") t.ablation = ablation_from_string(get_as<std::string>(val, p));
    else if (key == "few_shot") t.few_shot = get_as<std::size_t>(val, p);
    else if (key == "eval_every") t.eval_every = get_as<std::size_t>(val, p);
    else if (key == "domain_ce_into_extractor") t.domain_ce_into_extractor = get_as<bool>(val, p);
    else if (key == "checkpoint_every") t.checkpoint_every = get_as<std::size_t>(val, p);
    else if (key == "resume") *resume = get_as<std::string>(val, p);
    else unknown_key(path, key);
  }
  return t;
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const ordered_json& j) {
  RunConfig cfg;
  for (const auto& [key, val] : j.items()) {
    if (key == "seed") {
      cfg.seed = get_as<std::uint64_t>(val, "seed");
    } else if (key == "data") {
      for (const auto& [dkey, dval] : val.items()) {
        if (dkey == "kind") {
          const std::string k = get_as<std::string>(dval, "data.kind");
          if (k == "numeric") cfg.kind = DataKind::numeric;
          else if (k == "textlike") cfg.kind = DataKind::textlike;
          else throw ConfigError("config key 'data.kind' must be numeric or textlike");
        } else if (dkey == "numeric") {
          cfg.numeric = parse_numeric(dval, cfg.numeric);
        } else if (dkey == "textlike") {
          cfg.textlike = parse_textlike(dval, cfg.textlike);
        } else {
          unknown_key("data", dkey);
        }
      }
    } else if (key == "model") {
      for (const auto& [mkey, mval] : val.items()) {
        const std::string p = "model." + mkey;
        if (mkey == "latent") cfg.latent = get_as<std::size_t>(mval, p);
        else if (mkey == "extractor_hidden") cfg.extractor_hidden = get_as<std::vector<std::size_t>>(mval, p);
        else if (mkey == "head_hidden") cfg.head_hidden = get_as<std::vector<std::size_t>>(mval, p);
        else if (mkey == "activation") cfg.activation = activation_from_string(get_as<std::string>(mval, p));
        else unknown_key("model", mkey);
      }
    } else if (key == "train") {
      cfg.train = parse_train(val, cfg.train, &cfg.resume_checkpoint);
    } else if (key == "eval") {
      for (const auto& [ekey, eval_] : val.items()) {
        if (ekey == "dump_representations") {
          cfg.dump_representations = get_as<bool>(eval_, "eval.dump_representations");
        } else {
          unknown_key("eval", ekey);
        }
      }
    } else {
      unknown_key("", key);
    }
  }
  cfg.train.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(is, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

void RunConfig::validate() const {
  if (kind == DataKind::numeric) {
    numeric.validate();
  } else {
    textlike.validate();
  }
  if (latent < 2) throw ConfigError("model.latent must be > 1");
  train.validate();
}

ModelDims RunConfig::model_dims() const {
  ModelDims dims;
  dims.latent = latent;
  dims.extractor_hidden = extractor_hidden;
  dims.head_hidden = head_hidden;
  dims.activation = activation;
  if (kind == DataKind::numeric) {
    dims.input = numeric.feature_dim();
    dims.classes = numeric.classes;
    dims.domains = numeric.domains;
    dims.confounder_arity = numeric.arities();
  } else {
    dims.input = textlike.vocab;
    dims.classes = textlike.classes;
    dims.domains = textlike.domains;
    dims.confounder_arity = {2};  // the overlap annotation
  }
  return dims;
}

nlohmann::ordered_json RunConfig::echo() const { return config_to_json(*this); }

void apply_override(ordered_json& j, const std::string& dotted_key, const std::string& value) {
  if (dotted_key.empty()) throw ConfigError("empty override key");
  ordered_json* node = &j;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("bad override key '" + dotted_key + "'");
    if (dot == std::string::npos) {
      ordered_json parsed;
      try {
        parsed = ordered_json::parse(value);
      } catch (const nlohmann::json::exception&) {
        parsed = value;  // plain string
      }
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;
  j["data"]["kind"] = cfg.kind == DataKind::numeric ? "numeric" : "textlike";
  j["data"]["numeric"] = cfg.numeric.echo();
  j["data"]["numeric"].erase("kind");
  j["data"]["textlike"] = cfg.textlike.echo();
  j["data"]["textlike"].erase("kind");
  j["model"] = {{"latent", cfg.latent},
                {"extractor_hidden", cfg.extractor_hidden},
                {"head_hidden", cfg.head_hidden},
                {"activation", activation_to_string(cfg.activation)}};
  j["train"] = {{"epochs", cfg.train.epochs},
                {"disc_steps", cfg.train.disc_steps},
                {"batch", cfg.train.batch},
                {"lr", cfg.train.lr},
                {"lambda", cfg.train.lambda},
                {"weight_decay", cfg.train.weight_decay},
                {"ablation", ablation_to_string(cfg.train.ablation)},
                {"few_shot", cfg.train.few_shot},
                {"eval_every", cfg.train.eval_every},
                {"domain_ce_into_extractor", cfg.train.domain_ce_into_extractor},
                {"checkpoint_every", cfg.train.checkpoint_every},
                {"resume", cfg.resume_checkpoint}};
  j["eval"] = {{"dump_representations", cfg.dump_representations}};
  return j;
}

}  // namespace cadaft

#include "data/synthetic.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace cadaft {

std::vector<std::size_t> SyntheticSpec::arities() const {
  if (conf_arity.empty()) return std::vector<std::size_t>(confounders, classes);
  return conf_arity;
}

std::vector<double> SyntheticSpec::rhos() const {
  if (!rho.empty()) return rho;
  std::vector<double> r(domains, 0.95);
  r.back() = 0.05;  // flipped-confounder default: target domain anti-aligned
  return r;
}

void SyntheticSpec::validate() const {
  if (d_core < 1) throw ConfigError("data.numeric.d_core must be >= 1");
  if (confounders > 0 && d_conf < 1) throw ConfigError("data.numeric.d_conf must be >= 1");
  if (classes < 2) throw ConfigError("data.numeric.classes must be >= 2");
  if (domains < 2) throw ConfigError("data.numeric.domains must be >= 2");
  if (!(sigma > 0.0)) throw ConfigError("data.numeric.sigma must be > 0");
  if (!conf_arity.empty() && conf_arity.size() != confounders) {
    throw ConfigError("data.numeric.conf_arity must have one entry per confounder");
  }
  for (std::size_t a : arities()) {
    if (a < 2) throw ConfigError("data.numeric.conf_arity entries must be >= 2");
    if (a < classes) throw ConfigError("data.numeric.conf_arity entries must be >= classes");
  }
  if (!rho.empty() && rho.size() != domains) {
    throw ConfigError("data.numeric.rho must have one entry per domain");
  }
  const std::vector<double> r = rhos();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 0.0 || r[i] > 1.0) {
      throw ConfigError("data.numeric.rho[" + std::to_string(i) + "] must be in [0, 1], got " +
                        std::to_string(r[i]));
    }
  }
  if (n_source_train == 0) throw ConfigError("data.numeric.sizes.source_train must be >= 1");
}

nlohmann::ordered_json SyntheticSpec::echo() const {
  nlohmann::ordered_json j;
  j["kind"] = "numeric";
  j["d_core"] = d_core;
  j["d_conf"] = d_conf;
  j["classes"] = classes;
  j["domains"] = domains;
  j["confounders"] = confounders;
  j["conf_arity"] = arities();
  j["rho"] = rhos();
  j["mu"] = mu;
  j["nu"] = nu;
  j["sigma"] = sigma;
  j["sizes"] = {{"source_train", n_source_train},
                {"id_test", n_id_test},
                {"target_unlabeled", n_target_unlabeled},
                {"target_fewshot", n_target_fewshot},
                {"ood_test", n_ood_test}};
  return j;
}

std::vector<double> block_direction(std::size_t value, std::size_t arity, std::size_t dim) {
  std::vector<double> w(dim);
  double norm_sq = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    w[j] = (j % arity == value) ? 1.0 : -1.0 / static_cast<double>(arity - 1);
    norm_sq += w[j] * w[j];
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& v : w) v *= inv;
  return w;
}

namespace {

Instance sample_instance(const SyntheticSpec& spec, int domain, const std::string& split, Rng& rng) {
  const std::vector<std::size_t> arity = spec.arities();
  const std::vector<double> rho = spec.rhos();
  Instance inst;
  inst.domain = domain;
  inst.split = split;
  const int y = static_cast<int>(rng.below(spec.classes));
  inst.y = y;
  inst.t.reserve(spec.confounders);
  std::vector<int> t_vals(spec.confounders, 0);
  for (std::size_t i = 0; i < spec.confounders; ++i) {
    const bool agree = rng.uniform() < rho[static_cast<std::size_t>(domain)];
    int t = y;
    if (!agree) {
      const std::size_t shift = 1 + rng.below(arity[i] - 1);
      t = static_cast<int>((static_cast<std::size_t>(y) + shift) % arity[i]);
    }
    t_vals[i] = t;
    inst.t.emplace_back(t);
  }
  inst.x.reserve(spec.feature_dim());
  const std::vector<double> core_dir = block_direction(static_cast<std::size_t>(y), spec.classes, spec.d_core);
  for (std::size_t j = 0; j < spec.d_core; ++j) {
    inst.x.push_back(spec.mu * core_dir[j] + spec.sigma * rng.normal());
  }
  for (std::size_t i = 0; i < spec.confounders; ++i) {
    const std::vector<double> dir =
        block_direction(static_cast<std::size_t>(t_vals[i]), arity[i], spec.d_conf);
    for (std::size_t j = 0; j < spec.d_conf; ++j) {
      inst.x.push_back(spec.nu * dir[j] + spec.sigma * rng.normal());
    }
  }
  return inst;
}

void fill_split(const SyntheticSpec& spec, std::vector<Instance>& out, std::size_t n,
                bool target_domain, const std::string& split, Rng& rng) {
  const int target = static_cast<int>(spec.domains) - 1;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    int domain = target;
    if (!target_domain) {
      domain = spec.domains == 2 ? 0 : static_cast<int>(rng.below(spec.domains - 1));
    }
    out.push_back(sample_instance(spec, domain, split, rng));
  }
}

}  // namespace

SplitSet generate_numeric(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  SplitSet s;
  fill_split(spec, s.source_train, spec.n_source_train, false, "source_train", rng);
  fill_split(spec, s.id_test, spec.n_id_test, false, "id_test", rng);
  fill_split(spec, s.target_unlabeled, spec.n_target_unlabeled, true, "target_unlabeled", rng);
  fill_split(spec, s.target_fewshot, spec.n_target_fewshot, true, "target_fewshot", rng);
  fill_split(spec, s.ood_test, spec.n_ood_test, true, "ood_test", rng);
  // The unlabeled pool masks task and confounder annotations at generation.
  for (Instance& inst : s.target_unlabeled) {
    inst.y.reset();
    for (auto& t : inst.t) t.reset();
  }
  return s;
}

}  // namespace cadaft

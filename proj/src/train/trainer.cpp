#include "train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "core/error.hpp"

namespace cadaft {

Ablation ablation_from_string(const std::string& s) {
  if (s == "full") return Ablation::full;
  if (s == "no_confounder") return Ablation::no_confounder;
  if (s == "erm_only") return Ablation::erm_only;
  if (s == "no_adversary") return Ablation::no_adversary;
  throw ConfigError("unknown ablation '" + s +
                    "' (expected full, no_confounder, erm_only or no_adversary)");
}

std::string ablation_to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::no_confounder: return "no_confounder";
    case Ablation::erm_only: return "erm_only";
    case Ablation::no_adversary: return "no_adversary";
  }
  throw Error("unreachable ablation value");
}

void TrainConfig::validate() const {
  if (batch < 1) throw ConfigError("train.batch must be >= 1");
  if (lambda < 0.0) throw ConfigError("train.lambda must be >= 0");
  if (lr < 0.0) throw ConfigError("train.lr must be >= 0");
  if (eval_every < 1) throw ConfigError("train.eval_every must be >= 1");
}

std::uint64_t params_checksum(const std::vector<Tensor*>& params) {
  // FNV-1a over the raw bytes; any bit flip changes the sum.
  std::uint64_t h = 1469598103934665603ull;
  for (const Tensor* p : params) {
    for (double v : p->values) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
  }
  return h;
}

namespace {

std::vector<Tensor*> feature_params(CadaftModel& m, bool with_confounders) {
  std::vector<Tensor*> out;
  for (Tensor* p : m.extractor.parameters()) out.push_back(p);
  for (Tensor* p : m.task_head.parameters()) out.push_back(p);
  if (with_confounders) {
    for (Mlp& head : m.confounder_heads) {
      for (Tensor* p : head.parameters()) out.push_back(p);
    }
  }
  return out;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Trainer::Trainer(CadaftModel model, TrainConfig cfg, const SplitSet& data)
    : model_(std::move(model)),
      cfg_(cfg),
      lambda_(cfg.ablation == Ablation::no_adversary ? 0.0 : cfg.lambda),
      batch_(cfg.batch),
      rng_(cfg.seed),
      feature_opt_(feature_params(model_, uses_confounders()),
                   AdamConfig{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay}),
      domain_opt_(model_.domain_head.parameters(),
                  AdamConfig{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay}) {
  cfg_.validate();
  if (data.source_train.empty()) throw ContractViolation("train: empty source dataset");
  for (const Instance& inst : data.source_train) {
    if (!inst.y.has_value()) {
      throw ContractViolation("train: source rows must be fully labeled");
    }
  }
  source_ = data.source_train;
  if (cfg_.ablation != Ablation::erm_only) {
    if (model_.dims.domains < 2) {
      throw ConfigError("adversarial training needs at least two domains");
    }
    target_ = data.target_unlabeled;
    std::size_t take = cfg_.few_shot;
    if (take > data.target_fewshot.size()) {
      take = data.target_fewshot.size();
      history_.warnings.push_back("few_shot clamped to target_fewshot pool size " +
                                  std::to_string(take));
    }
    target_.insert(target_.end(), data.target_fewshot.begin(),
                   data.target_fewshot.begin() + static_cast<std::ptrdiff_t>(take));
    if (target_.empty()) throw ContractViolation("train: empty target pool");
  }
  std::size_t cap = source_.size();
  if (!target_.empty()) cap = std::min(cap, target_.size());
  if (batch_ > cap) {
    batch_ = cap;
    history_.warnings.push_back("batch clamped to smallest split size " + std::to_string(batch_));
  }
  id_test_ = &data.id_test;
  ood_test_ = &data.ood_test;
}

bool Trainer::uses_adversary() const {
  return cfg_.ablation == Ablation::full || cfg_.ablation == Ablation::no_confounder;
}

bool Trainer::uses_confounders() const {
  return (cfg_.ablation == Ablation::full || cfg_.ablation == Ablation::no_adversary) &&
         model_.confounder_count() > 0;
}

Batch Trainer::make_batch(const std::vector<Instance>& pool, const std::vector<std::size_t>& rows,
                          bool target_side) const {
  const std::size_t b = rows.size();
  const std::size_t d = model_.dims.input;
  Batch batch;
  batch.x = Tensor::zeros({b, d});
  batch.labels.y = Tensor::zeros({b, model_.dims.classes});
  batch.labels.y_used.assign(b, 0);
  batch.labels.s = Tensor::zeros({b, model_.dims.domains});
  const std::size_t n_conf = model_.confounder_count();
  batch.labels.t.clear();
  batch.labels.t_used.assign(n_conf, std::vector<std::uint8_t>(b, 0));
  for (std::size_t i = 0; i < n_conf; ++i) {
    batch.labels.t.push_back(Tensor::zeros({b, model_.dims.confounder_arity[i]}));
  }
  for (std::size_t r = 0; r < b; ++r) {
    const Instance& inst = pool[rows[r]];
    if (inst.x.size() != d) {
      throw ShapeError("instance feature width " + std::to_string(inst.x.size()) +
                       " does not match model input " + std::to_string(d));
    }
    for (std::size_t c = 0; c < d; ++c) batch.x.values[r * d + c] = inst.x[c];
    if (!target_side && inst.y.has_value()) {
      batch.labels.y.values[r * model_.dims.classes + static_cast<std::size_t>(*inst.y)] = 1.0;
      batch.labels.y_used[r] = 1;
    }
    batch.labels.s.values[r * model_.dims.domains + static_cast<std::size_t>(inst.domain)] = 1.0;
    for (std::size_t i = 0; i < n_conf && i < inst.t.size(); ++i) {
      if (inst.t[i].has_value()) {
        batch.labels.t[i].values[r * model_.dims.confounder_arity[i] +
                                 static_cast<std::size_t>(*inst.t[i])] = 1.0;
        batch.labels.t_used[i][r] = 1;
      }
    }
  }
  return batch;
}

double Trainer::discriminator_step(const Batch& src, const Batch& tgt) {
  if (model_.dims.domains < 2) {
    throw ConfigError("discriminator step undefined for a single domain");
  }
  const std::vector<Tensor*> frozen = feature_params(model_, true);
  const std::uint64_t before = params_checksum(frozen);

  domain_opt_.zero_grad();
  // The extractor is frozen here: representations enter the tape as inputs.
  const Tensor z_src = model_.extractor.eval(src.x);
  const Tensor z_tgt = model_.extractor.eval(tgt.x);
  Tape tape;
  const Tape::Var s_src = model_.domain_head.forward(tape, tape.input(z_src), true);
  const Tape::Var s_tgt = model_.domain_head.forward(tape, tape.input(z_tgt), true);
  const std::vector<std::uint8_t> all_src(src.labels.batch_size(), 1);
  const std::vector<std::uint8_t> all_tgt(tgt.labels.batch_size(), 1);
  const CeTerm ce_src = cross_entropy_logits(tape, s_src, src.labels.s, all_src);
  const CeTerm ce_tgt = cross_entropy_logits(tape, s_tgt, tgt.labels.s, all_tgt);
  const Tape::Var loss = tape.scale(tape.add(ce_src.var, ce_tgt.var), 0.5);
  tape.backward(loss);
  domain_opt_.step();

  if (params_checksum(frozen) != before) ++phase_violations_;
  return tape.value(loss).values[0];
}

double Trainer::feature_step(const Batch& src, const Batch* tgt) {
  const std::uint64_t before = params_checksum(model_.domain_head.parameters());

  feature_opt_.zero_grad();
  Tape tape;
  const bool conf = uses_confounders();
  const bool adv = lambda_ > 0.0 && tgt != nullptr;
  const bool dom_sup = cfg_.domain_ce_into_extractor && cfg_.ablation != Ablation::erm_only;

  TapedForwardFlags flags;
  flags.extractor_trainable = true;
  flags.task_trainable = true;
  flags.confounders_trainable = conf;
  flags.domain_trainable = false;  // frozen in this phase
  flags.want_task = true;
  flags.want_confounders = conf;
  flags.want_domain = adv || dom_sup;

  const TapedOutputs out_src = taped_forward(tape, model_, src.x, flags);
  Tape::Var total = cross_entropy_logits(tape, out_src.y_logits, src.labels.y, src.labels.y_used).var;
  if (!total.valid()) total = tape.input(Tensor::scalar(0.0));

  TapedOutputs out_tgt;
  if (tgt) {
    TapedForwardFlags tf = flags;
    tf.want_task = false;
    out_tgt = taped_forward(tape, model_, tgt->x, tf);
  }

  if (conf) {
    for (std::size_t i = 0; i < model_.confounder_count(); ++i) {
      const CeTerm cs =
          cross_entropy_logits(tape, out_src.t_logits[i], src.labels.t[i], src.labels.t_used[i]);
      if (cs.any_used) total = tape.add(total, cs.var);
      if (tgt) {
        const CeTerm ct =
            cross_entropy_logits(tape, out_tgt.t_logits[i], tgt->labels.t[i], tgt->labels.t_used[i]);
        if (ct.any_used) total = tape.add(total, ct.var);
      }
    }
  }

  if (dom_sup && tgt) {
    const std::vector<std::uint8_t> all_src(src.labels.batch_size(), 1);
    const std::vector<std::uint8_t> all_tgt(tgt->labels.batch_size(), 1);
    const CeTerm ds = cross_entropy_logits(tape, out_src.s_logits, src.labels.s, all_src);
    const CeTerm dt = cross_entropy_logits(tape, out_tgt.s_logits, tgt->labels.s, all_tgt);
    total = tape.add(total, tape.scale(tape.add(ds.var, dt.var), 0.5));
  }

  if (adv) {
    const Tape::Var confusion = loss_adv_logits(tape, out_src.s_logits, out_tgt.s_logits);
    total = tape.add(total, tape.scale(confusion, lambda_));
  }

  tape.backward(total);
  feature_opt_.step();

  if (params_checksum(model_.domain_head.parameters()) != before) ++phase_violations_;
  return tape.value(total).values[0];
}

void Trainer::eval_and_record(std::size_t epoch, double task_ce, double disc_ce, double feat_loss) {
  if (id_test_->empty() || ood_test_->empty()) return;
  MetricsRecord rec = evaluate_model(model_, *id_test_, *ood_test_);
  rec.epoch = epoch;
  rec.ablation = ablation_to_string(cfg_.ablation);
  rec.seed = cfg_.seed;
  rec.train_task_ce = task_ce;
  rec.train_disc_ce = disc_ce;
  rec.train_feature_loss = feat_loss;
  history_.records.push_back(std::move(rec));
}

TrainResult Trainer::run(const EpochHook& hook) {
  if (cfg_.epochs > 0) {
    eval_and_record(0, kNan, kNan, kNan);
  }

  std::vector<std::size_t> src_order(source_.size());
  std::iota(src_order.begin(), src_order.end(), 0);
  std::vector<std::size_t> tgt_order(target_.size());
  std::iota(tgt_order.begin(), tgt_order.end(), 0);
  std::size_t tgt_cursor = tgt_order.size();  // force reshuffle on first use

  const auto next_target_rows = [&]() {
    std::vector<std::size_t> rows;
    rows.reserve(batch_);
    while (rows.size() < batch_) {
      if (tgt_cursor >= tgt_order.size()) {
        rng_.shuffle(tgt_order);
        tgt_cursor = 0;
      }
      rows.push_back(tgt_order[tgt_cursor++]);
    }
    return rows;
  };

  for (std::size_t epoch = 1; epoch <= cfg_.epochs; ++epoch) {
    double disc_ce_sum = 0.0;
    std::size_t disc_n = 0;
    if (uses_adversary()) {
      for (std::size_t k = 0; k < cfg_.disc_steps; ++k) {
        rng_.shuffle(src_order);
        const std::vector<std::size_t> src_rows(src_order.begin(),
                                                src_order.begin() + static_cast<std::ptrdiff_t>(batch_));
        const Batch src = make_batch(source_, src_rows, false);
        const Batch tgt = make_batch(target_, next_target_rows(), true);
        disc_ce_sum += discriminator_step(src, tgt);
        ++disc_n;
      }
    }

    rng_.shuffle(src_order);
    double feat_sum = 0.0, task_sum = 0.0;
    std::size_t feat_n = 0;
    const std::size_t n_steps = std::max<std::size_t>(1, source_.size() / batch_);
    for (std::size_t step = 0; step < n_steps; ++step) {
      const std::size_t lo = step * batch_;
      if (lo + batch_ > source_.size()) break;
      const std::vector<std::size_t> src_rows(
          src_order.begin() + static_cast<std::ptrdiff_t>(lo),
          src_order.begin() + static_cast<std::ptrdiff_t>(lo + batch_));
      const Batch src = make_batch(source_, src_rows, false);
      if (cfg_.ablation == Ablation::erm_only) {
        feat_sum += feature_step(src, nullptr);
      } else {
        const Batch tgt = make_batch(target_, next_target_rows(), true);
        feat_sum += feature_step(src, &tgt);
      }
      // Task CE alone, for the smoothed-trace diagnostics.
      {
        const Tensor y_prob = softmax_value(model_.task_head.eval(model_.extractor.eval(src.x)));
        task_sum += cross_entropy(y_prob, src.labels.y, src.labels.y_used).value;
      }
      ++feat_n;
    }

    if (epoch % cfg_.eval_every == 0 || epoch == cfg_.epochs) {
      eval_and_record(epoch, feat_n ? task_sum / static_cast<double>(feat_n) : kNan,
                      disc_n ? disc_ce_sum / static_cast<double>(disc_n) : kNan,
                      feat_n ? feat_sum / static_cast<double>(feat_n) : kNan);
    }
    if (hook) hook(model_, epoch);
  }

  TrainResult result{std::move(model_), std::move(history_), phase_violations_};
  return result;
}

TrainResult train(const ModelDims& dims, const TrainConfig& cfg, const SplitSet& data,
                  const Trainer::EpochHook& hook) {
  Rng rng(cfg.seed);
  CadaftModel model = CadaftModel::init(dims, rng);
  return train_from(std::move(model), cfg, data, hook);
}

TrainResult train_from(CadaftModel model, const TrainConfig& cfg, const SplitSet& data,
                       const Trainer::EpochHook& hook) {
  cfg.validate();
  Trainer trainer(std::move(model), cfg, data);
  return trainer.run(hook);
}

}  // namespace cadaft

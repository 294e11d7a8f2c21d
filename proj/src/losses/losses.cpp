#include "losses/losses.hpp"

#include <cmath>

#include "core/error.hpp"

namespace cadaft {

Tensor one_hot(const std::vector<int>& values, std::size_t width) {
  Tensor out = Tensor::zeros({values.size(), width});
  for (std::size_t r = 0; r < values.size(); ++r) {
    const int v = values[r];
    if (v < 0 || static_cast<std::size_t>(v) >= width) {
      throw ContractViolation("one_hot value " + std::to_string(v) + " outside [0, " +
                              std::to_string(width) + ")");
    }
    out.values[r * width + static_cast<std::size_t>(v)] = 1.0;
  }
  return out;
}

namespace {

void check_ce_shapes(const Tensor& a, const Tensor& b, std::size_t used_size, const char* op) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape != b.shape) {
    throw ShapeError(std::string(op) + ": prediction " + shape_str(a.shape) +
                     " and target " + shape_str(b.shape) + " must be equal matrices");
  }
  if (used_size != a.shape[0]) {
    throw ShapeError(std::string(op) + ": row flags length " + std::to_string(used_size) +
                     " does not match batch " + std::to_string(a.shape[0]));
  }
}

}  // namespace

CeValue cross_entropy(const Tensor& prob, const Tensor& target_onehot,
                      const std::vector<std::uint8_t>& used) {
  check_ce_shapes(prob, target_onehot, used.size(), "cross_entropy");
  for (double p : prob.values) {
    if (std::isnan(p)) throw ContractViolation("cross_entropy: NaN in probabilities");
  }
  const std::size_t rows = prob.rows(), cols = prob.cols();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!used[r]) continue;
    ++n;
    for (std::size_t c = 0; c < cols; ++c) {
      const double t = target_onehot.values[r * cols + c];
      if (t != 0.0) sum -= t * std::log(prob.values[r * cols + c]);
    }
  }
  if (n == 0) return {0.0, false};
  return {sum / static_cast<double>(n), true};
}

CeTerm cross_entropy_logits(Tape& tape, Tape::Var logits, const Tensor& target_onehot,
                            const std::vector<std::uint8_t>& used) {
  const Tensor& lv = tape.value(logits);
  check_ce_shapes(lv, target_onehot, used.size(), "cross_entropy_logits");
  std::size_t n = 0;
  Tensor masked = target_onehot;
  const std::size_t cols = masked.cols();
  for (std::size_t r = 0; r < masked.rows(); ++r) {
    if (used[r]) {
      ++n;
    } else {
      for (std::size_t c = 0; c < cols; ++c) masked.values[r * cols + c] = 0.0;
    }
  }
  if (n == 0) return {Tape::Var{}, 0.0, false};
  const Tape::Var ls = tape.log_softmax(logits);
  const Tape::Var picked = tape.mul(ls, tape.input(std::move(masked)));
  const Tape::Var loss = tape.scale(tape.sum(picked), -1.0 / static_cast<double>(n));
  return {loss, tape.value(loss).values[0], true};
}

double loss_adv(const Tensor& s_prob_src, const Tensor& s_prob_tgt) {
  if (s_prob_src.rank() != 2 || s_prob_tgt.rank() != 2 ||
      s_prob_src.shape[1] != s_prob_tgt.shape[1]) {
    throw ShapeError("loss_adv: incompatible batches " + shape_str(s_prob_src.shape) + " and " +
                     shape_str(s_prob_tgt.shape));
  }
  const std::size_t n_domains = s_prob_src.shape[1];
  if (n_domains < 2) {
    throw ConfigError("loss_adv undefined for a single domain (need >= 2)");
  }
  const auto batch_mean = [n_domains](const Tensor& p) {
    const std::size_t rows = p.rows();
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < n_domains; ++c) row -= std::log(p.values[r * n_domains + c]);
      acc += row / static_cast<double>(n_domains);
    }
    return acc / static_cast<double>(rows);
  };
  return 0.5 * (batch_mean(s_prob_src) + batch_mean(s_prob_tgt));
}

Tape::Var loss_adv_logits(Tape& tape, Tape::Var s_logits_src, Tape::Var s_logits_tgt) {
  const Tensor& sv = tape.value(s_logits_src);
  const Tensor& tv = tape.value(s_logits_tgt);
  if (sv.shape[1] != tv.shape[1]) {
    throw ShapeError("loss_adv: incompatible batches " + shape_str(sv.shape) + " and " +
                     shape_str(tv.shape));
  }
  const std::size_t n_domains = sv.shape[1];
  if (n_domains < 2) {
    throw ConfigError("loss_adv undefined for a single domain (need >= 2)");
  }
  const auto uniform_ce = [&tape, n_domains](Tape::Var logits, std::size_t rows) {
    Tensor uniform = Tensor::zeros({rows, n_domains});
    for (double& v : uniform.values) v = 1.0 / static_cast<double>(n_domains);
    const Tape::Var picked = tape.mul(tape.log_softmax(logits), tape.input(std::move(uniform)));
    return tape.scale(tape.sum(picked), -1.0 / static_cast<double>(rows));
  };
  return tape.scale(tape.add(uniform_ce(s_logits_src, sv.rows()), uniform_ce(s_logits_tgt, tv.rows())), 0.5);
}

Tape::Var loss_max_step(Tape& tape, const TapedOutputs& src, const BatchLabels& src_labels,
                        const TapedOutputs* tgt, const BatchLabels* tgt_labels,
                        MaxStepBreakdown* breakdown) {
  if ((tgt == nullptr) != (tgt_labels == nullptr)) {
    throw ContractViolation("loss_max_step: target outputs and labels must come together");
  }
  if (tgt_labels) {
    for (std::uint8_t u : tgt_labels->y_used) {
      if (u) throw ContractViolation("loss_max_step: target rows must not carry a usable task label");
    }
  }
  MaxStepBreakdown bd;
  std::vector<Tape::Var> terms;

  const CeTerm task = cross_entropy_logits(tape, src.y_logits, src_labels.y, src_labels.y_used);
  bd.task_src = task.value;
  if (task.any_used) terms.push_back(task.var);

  const std::vector<std::uint8_t> all_src(src_labels.batch_size(), 1);
  const CeTerm dom_src = cross_entropy_logits(tape, src.s_logits, src_labels.s, all_src);
  bd.domain_src = dom_src.value;
  if (dom_src.any_used) terms.push_back(dom_src.var);

  if (tgt) {
    const std::vector<std::uint8_t> all_tgt(tgt_labels->batch_size(), 1);
    const CeTerm dom_tgt = cross_entropy_logits(tape, tgt->s_logits, tgt_labels->s, all_tgt);
    bd.domain_tgt = dom_tgt.value;
    if (dom_tgt.any_used) terms.push_back(dom_tgt.var);
  }

  const std::size_t n_conf = src.t_logits.size();
  bd.conf_src.assign(n_conf, 0.0);
  bd.conf_tgt.assign(n_conf, 0.0);
  for (std::size_t i = 0; i < n_conf; ++i) {
    const CeTerm cs = cross_entropy_logits(tape, src.t_logits[i], src_labels.t[i], src_labels.t_used[i]);
    bd.conf_src[i] = cs.value;
    if (cs.any_used) terms.push_back(cs.var);
    if (tgt && i < tgt->t_logits.size()) {
      const CeTerm ct =
          cross_entropy_logits(tape, tgt->t_logits[i], tgt_labels->t[i], tgt_labels->t_used[i]);
      bd.conf_tgt[i] = ct.value;
      if (ct.any_used) terms.push_back(ct.var);
    }
  }

  Tape::Var total = terms.empty() ? tape.input(Tensor::scalar(0.0)) : terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) total = tape.add(total, terms[i]);
  bd.total = tape.value(total).values[0];
  if (breakdown) *breakdown = bd;
  return total;
}

std::optional<double> domain_discrepancy(
    const Tensor& s_prob_src, const Tensor& s_prob_tgt, std::size_t designated_domain,
    const std::optional<StratumFilter>& stratum,
    const std::vector<std::vector<std::optional<int>>>* t_src,
    const std::vector<std::vector<std::optional<int>>>* t_tgt) {
  if (s_prob_src.rank() != 2 || s_prob_tgt.rank() != 2 ||
      s_prob_src.shape[1] != s_prob_tgt.shape[1]) {
    throw ShapeError("domain_discrepancy: incompatible batches " + shape_str(s_prob_src.shape) +
                     " and " + shape_str(s_prob_tgt.shape));
  }
  if (designated_domain >= s_prob_src.shape[1]) {
    throw ContractViolation("domain_discrepancy: designated domain index out of range");
  }
  if (stratum && (!t_src || !t_tgt)) {
    throw ContractViolation("domain_discrepancy: stratum filter needs confounder values");
  }
  const auto filtered_mean = [&](const Tensor& p,
                                 const std::vector<std::vector<std::optional<int>>>* t) -> std::optional<double> {
    const std::size_t rows = p.rows(), cols = p.cols();
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (stratum) {
        const auto& row_t = (*t)[r];
        if (stratum->confounder >= row_t.size()) continue;
        const auto& v = row_t[stratum->confounder];
        if (!v.has_value() || *v != stratum->value) continue;
      }
      acc += p.values[r * cols + designated_domain];
      ++n;
    }
    if (n == 0) return std::nullopt;
    return acc / static_cast<double>(n);
  };
  const auto ms = filtered_mean(s_prob_src, t_src);
  const auto mt = filtered_mean(s_prob_tgt, t_tgt);
  if (!ms || !mt) return std::nullopt;
  return std::abs(*ms - *mt);
}

}  // namespace cadaft

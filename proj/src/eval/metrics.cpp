#include "eval/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "losses/losses.hpp"

namespace cadaft {

Tensor features_of(const std::vector<Instance>& split) {
  if (split.empty()) throw ContractViolation("features_of: empty split");
  const std::size_t d = split.front().x.size();
  Tensor x = Tensor::zeros({split.size(), d});
  for (std::size_t r = 0; r < split.size(); ++r) {
    if (split[r].x.size() != d) {
      throw ShapeError("inconsistent feature width in split: row " + std::to_string(r));
    }
    for (std::size_t c = 0; c < d; ++c) x.values[r * d + c] = split[r].x[c];
  }
  return x;
}

double accuracy(const CadaftModel& m, const std::vector<Instance>& split, Head head,
                std::size_t conf_index) {
  if (split.empty()) throw ContractViolation("accuracy: empty split");
  const ModelOutputs out = model_forward(m, features_of(split));
  std::size_t correct = 0, counted = 0;
  for (std::size_t r = 0; r < split.size(); ++r) {
    int truth = -1;
    const Tensor* prob = nullptr;
    switch (head) {
      case Head::task:
        if (!split[r].y.has_value()) continue;
        truth = *split[r].y;
        prob = &out.y_prob;
        break;
      case Head::domain:
        truth = split[r].domain;
        prob = &out.s_prob;
        break;
      case Head::confounder:
        if (conf_index >= split[r].t.size() || !split[r].t[conf_index].has_value()) continue;
        truth = *split[r].t[conf_index];
        prob = &out.t_prob[conf_index];
        break;
    }
    ++counted;
    if (static_cast<int>(argmax_row(*prob, r)) == truth) ++correct;
  }
  if (counted == 0) {
    throw ContractViolation("accuracy: no row in the split carries the requested label");
  }
  return static_cast<double>(correct) / static_cast<double>(counted);
}

MetricsRecord evaluate_model(const CadaftModel& m, const std::vector<Instance>& id_test,
                             const std::vector<Instance>& ood_test) {
  MetricsRecord rec;
  rec.task_acc_id = accuracy(m, id_test, Head::task);
  rec.task_acc_ood = accuracy(m, ood_test, Head::task);

  std::vector<Instance> mixed = id_test;
  mixed.insert(mixed.end(), ood_test.begin(), ood_test.end());
  rec.domain_acc = accuracy(m, mixed, Head::domain);
  for (std::size_t i = 0; i < m.confounder_count(); ++i) {
    rec.conf_acc.push_back(accuracy(m, mixed, Head::confounder, i));
  }

  const Tensor x_id = features_of(id_test);
  const Tensor x_ood = features_of(ood_test);
  const Tensor s_logits_id = m.domain_head.eval(m.extractor.eval(x_id));
  const Tensor s_logits_ood = m.domain_head.eval(m.extractor.eval(x_ood));
  // Confusion value from log-probabilities so saturated heads stay finite.
  const Tensor ls_id = log_softmax_value(s_logits_id);
  const Tensor ls_ood = log_softmax_value(s_logits_ood);
  const std::size_t n_dom = ls_id.cols();
  const auto mean_uniform_ce = [n_dom](const Tensor& ls) {
    double acc = 0.0;
    for (std::size_t r = 0; r < ls.rows(); ++r) {
      for (std::size_t c = 0; c < n_dom; ++c) acc -= ls.values[r * n_dom + c];
    }
    return acc / static_cast<double>(n_dom) / static_cast<double>(ls.rows());
  };
  rec.loss_adv_holdout = 0.5 * (mean_uniform_ce(ls_id) + mean_uniform_ce(ls_ood));

  const Tensor s_prob_id = softmax_value(s_logits_id);
  const Tensor s_prob_ood = softmax_value(s_logits_ood);
  const std::size_t designated = m.dims.domains - 1;
  rec.disc_pooled = domain_discrepancy(s_prob_id, s_prob_ood, designated).value();

  std::vector<std::vector<std::optional<int>>> t_id, t_ood;
  for (const Instance& inst : id_test) t_id.push_back(inst.t);
  for (const Instance& inst : ood_test) t_ood.push_back(inst.t);
  for (std::size_t i = 0; i < m.confounder_count(); ++i) {
    const std::size_t arity = m.dims.confounder_arity[i];
    for (std::size_t v = 0; v < arity; ++v) {
      const StratumFilter f{i, static_cast<int>(v)};
      rec.disc_strata.emplace_back(
          "c" + std::to_string(i) + "_v" + std::to_string(v),
          domain_discrepancy(s_prob_id, s_prob_ood, designated, f, &t_id, &t_ood));
    }
  }
  return rec;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records,
                       std::size_t confounders, const std::vector<std::size_t>& arities,
                       const std::vector<std::string>& warnings) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open metrics file for writing: " + path);
  os << "# cadaft-metrics v1\n";
  for (const std::string& w : warnings) os << "# warning: " << w << "\n";
  os << "epoch,ablation,seed,task_acc_id,task_acc_ood,domain_acc";
  for (std::size_t i = 0; i < confounders; ++i) os << ",conf" << i << "_acc";
  os << ",loss_adv,disc_pooled";
  for (std::size_t i = 0; i < confounders; ++i) {
    for (std::size_t v = 0; v < arities[i]; ++v) os << ",disc_c" << i << "_v" << v;
  }
  os << ",train_task_ce,train_disc_ce,train_feature_loss\n";
  for (const MetricsRecord& r : records) {
    os << r.epoch << "," << r.ablation << "," << r.seed << "," << fmt(r.task_acc_id) << ","
       << fmt(r.task_acc_ood) << "," << fmt(r.domain_acc);
    for (std::size_t i = 0; i < confounders; ++i) {
      os << "," << (i < r.conf_acc.size() ? fmt(r.conf_acc[i]) : "");
    }
    os << "," << fmt(r.loss_adv_holdout) << "," << fmt(r.disc_pooled);
    std::size_t k = 0;
    for (std::size_t i = 0; i < confounders; ++i) {
      for (std::size_t v = 0; v < arities[i]; ++v, ++k) {
        os << ",";
        if (k < r.disc_strata.size() && r.disc_strata[k].second.has_value()) {
          os << fmt(*r.disc_strata[k].second);
        }
      }
    }
    os << "," << (std::isnan(r.train_task_ce) ? "" : fmt(r.train_task_ce)) << ","
       << (std::isnan(r.train_disc_ce) ? "" : fmt(r.train_disc_ce)) << ","
       << (std::isnan(r.train_feature_loss) ? "" : fmt(r.train_feature_loss)) << "\n";
  }
  if (!os) throw IoError("write failed for metrics file: " + path);
}

void dump_representations(const CadaftModel& m, const std::vector<Instance>& split,
                          const std::string& path) {
  if (split.empty()) throw ContractViolation("dump_representations: empty split");
  std::ofstream os(path);
  if (!os) throw IoError("cannot open representation dump for writing: " + path);
  const Tensor z = m.extractor.eval(features_of(split));
  const std::size_t l = z.cols();
  os << "# cadaft-repr v1\n";
  for (std::size_t c = 0; c < l; ++c) os << "z" << c << ",";
  os << "y,s";
  for (std::size_t i = 0; i < m.confounder_count(); ++i) os << ",t" << i;
  os << "\n";
  for (std::size_t r = 0; r < split.size(); ++r) {
    for (std::size_t c = 0; c < l; ++c) os << fmt(z.values[r * l + c]) << ",";
    if (split[r].y.has_value()) os << *split[r].y;
    os << "," << split[r].domain;
    for (std::size_t i = 0; i < m.confounder_count(); ++i) {
      os << ",";
      if (i < split[r].t.size() && split[r].t[i].has_value()) os << *split[r].t[i];
    }
    os << "\n";
  }
  if (!os) throw IoError("write failed for representation dump: " + path);
}

std::vector<std::vector<double>> read_representation_dump(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open representation dump: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t z_width = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("z0,", 0) == 0) {
      std::size_t count = 0;
      std::istringstream hs(line);
      std::string col;
      while (std::getline(hs, col, ',')) {
        if (!col.empty() && col[0] == 'z') ++count;
      }
      z_width = count;
      continue;
    }
    std::vector<double> z;
    std::istringstream ls(line);
    std::string cell;
    while (z.size() < z_width && std::getline(ls, cell, ',')) {
      z.push_back(std::strtod(cell.c_str(), nullptr));
    }
    rows.push_back(std::move(z));
  }
  return rows;
}

}  // namespace cadaft

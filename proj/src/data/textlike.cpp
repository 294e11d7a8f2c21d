#include "data/textlike.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace cadaft {

using nlohmann::ordered_json;

double overlap_score(const std::vector<std::string>& tokens_1,
                     const std::vector<std::string>& tokens_2) {
  const std::size_t m = tokens_1.size(), n = tokens_2.size();
  if (m + n == 0) throw DomainError("overlap_score undefined for two empty token lists");
  std::size_t matches = 0;
  for (const std::string& a : tokens_1) {
    for (const std::string& b : tokens_2) {
      if (a == b) ++matches;
    }
  }
  return static_cast<double>(matches) / static_cast<double>(m + n);
}

double overlap_score_set(const std::vector<std::string>& tokens_1,
                         const std::vector<std::string>& tokens_2) {
  const std::size_t m = tokens_1.size(), n = tokens_2.size();
  if (m + n == 0) throw DomainError("overlap_score undefined for two empty token lists");
  const std::set<std::string> s1(tokens_1.begin(), tokens_1.end());
  const std::set<std::string> s2(tokens_2.begin(), tokens_2.end());
  std::size_t matches = 0;
  for (const std::string& a : s1) {
    if (s2.count(a)) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(m + n);
}

int annotate_overlap(const SentencePair& pair, double alpha, bool set_based) {
  const double score = set_based ? overlap_score_set(pair.tokens_1, pair.tokens_2)
                                 : overlap_score(pair.tokens_1, pair.tokens_2);
  return score >= alpha ? 1 : 0;
}

std::vector<std::array<double, 2>> TextlikeSpec::p_highs() const {
  if (!p_high.empty()) return p_high;
  std::vector<std::array<double, 2>> p(domains, {0.95, 0.05});
  p.back() = {1.0, 1.0};  // target regime: high overlap for both labels
  return p;
}

std::size_t TextlikeSpec::high_shared() const {
  // Smallest shared-token count whose score reaches alpha. Sentence 1 also
  // carries the label marker, so the combined length is 2 * len + 1.
  const double combined = static_cast<double>(2 * sentence_len + 1);
  return static_cast<std::size_t>(std::ceil(alpha * combined - 1e-12));
}

void TextlikeSpec::validate() const {
  if (vocab < 4) throw ConfigError("data.textlike.vocab must be >= 4");
  if (sentence_len < 1) throw ConfigError("data.textlike.sentence_len must be >= 1");
  if (classes < 2) throw ConfigError("data.textlike.classes must be >= 2");
  if (domains < 2) throw ConfigError("data.textlike.domains must be >= 2");
  if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("data.textlike.alpha must be in (0, 1]");
  if (!p_high.empty() && p_high.size() != domains) {
    throw ConfigError("data.textlike.p_high must have one entry per domain");
  }
  for (const auto& pd : p_highs()) {
    for (double p : pd) {
      if (p < 0.0 || p > 1.0) throw ConfigError("data.textlike.p_high values must be in [0, 1]");
    }
  }
  const std::size_t c_hi = high_shared();
  if (c_hi > sentence_len) {
    throw ConfigError("data.textlike: cannot reach overlap alpha=" + std::to_string(alpha) +
                      " with sentence_len=" + std::to_string(sentence_len) +
                      " (needs " + std::to_string(c_hi) + " shared tokens)");
  }
  // Low-overlap pairs share nothing, so both sentences need fresh tokens.
  if (vocab < classes + 2 * sentence_len) {
    throw ConfigError("data.textlike.vocab too small: need >= classes + 2*sentence_len = " +
                      std::to_string(classes + 2 * sentence_len));
  }
}

ordered_json TextlikeSpec::echo() const {
  ordered_json j;
  j["kind"] = "textlike";
  j["vocab"] = vocab;
  j["sentence_len"] = sentence_len;
  j["classes"] = classes;
  j["domains"] = domains;
  j["alpha"] = alpha;
  ordered_json ph = ordered_json::array();
  for (const auto& pd : p_highs()) ph.push_back({pd[0], pd[1]});
  j["p_high"] = ph;
  j["sizes"] = {{"source_train", n_source_train},
                {"id_test", n_id_test},
                {"target_unlabeled", n_target_unlabeled},
                {"target_fewshot", n_target_fewshot},
                {"ood_test", n_ood_test}};
  return j;
}

namespace {

std::string word(std::size_t index) { return "w" + std::to_string(index); }

// Draw `count` distinct indices from [lo, hi) avoiding `taken`.
std::vector<std::size_t> draw_distinct(Rng& rng, std::size_t lo, std::size_t hi, std::size_t count,
                                       const std::set<std::size_t>& taken) {
  std::set<std::size_t> chosen;
  std::vector<std::size_t> out;
  while (out.size() < count) {
    const std::size_t idx = lo + rng.below(hi - lo);
    if (taken.count(idx) || chosen.count(idx)) continue;
    chosen.insert(idx);
    out.push_back(idx);
  }
  return out;
}

SentencePair sample_pair(const TextlikeSpec& spec, int domain, Rng& rng) {
  const auto ph = spec.p_highs();
  SentencePair pair;
  pair.domain = domain;
  pair.label = static_cast<int>(rng.below(spec.classes));
  const double p = pair.label == 1 ? ph[static_cast<std::size_t>(domain)][0]
                                   : ph[static_cast<std::size_t>(domain)][1];
  const bool high = rng.uniform() < p;
  const std::size_t shared = high ? spec.high_shared() : 0;

  const std::vector<std::size_t> s1 =
      draw_distinct(rng, spec.classes, spec.vocab, spec.sentence_len, {});
  const std::set<std::size_t> s1_set(s1.begin(), s1.end());
  const std::vector<std::size_t> fresh =
      draw_distinct(rng, spec.classes, spec.vocab, spec.sentence_len - shared, s1_set);

  pair.tokens_1.push_back(word(static_cast<std::size_t>(pair.label)));  // label marker
  for (std::size_t idx : s1) pair.tokens_1.push_back(word(idx));
  for (std::size_t k = 0; k < shared; ++k) pair.tokens_2.push_back(word(s1[k]));
  for (std::size_t idx : fresh) pair.tokens_2.push_back(word(idx));
  return pair;
}

Instance pair_to_instance(const TextlikeSpec& spec, const SentencePair& pair,
                          const std::string& split) {
  Instance inst;
  inst.domain = pair.domain;
  inst.split = split;
  inst.y = pair.label;
  inst.t.emplace_back(annotate_overlap(pair, spec.alpha));
  inst.x.assign(spec.vocab, 0.0);
  const auto count = [&](const std::vector<std::string>& toks) {
    for (const std::string& t : toks) {
      const std::size_t idx = std::stoul(t.substr(1));
      inst.x[idx] += 1.0;
    }
  };
  count(pair.tokens_1);
  count(pair.tokens_2);
  return inst;
}

}  // namespace

TextlikeData generate_textlike(const TextlikeSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  TextlikeData data;
  data.pairs.resize(SplitSet::names().size());
  const int target = static_cast<int>(spec.domains) - 1;
  const std::vector<std::pair<std::string, std::size_t>> plan = {
      {"source_train", spec.n_source_train},
      {"id_test", spec.n_id_test},
      {"target_unlabeled", spec.n_target_unlabeled},
      {"target_fewshot", spec.n_target_fewshot},
      {"ood_test", spec.n_ood_test}};
  for (std::size_t si = 0; si < plan.size(); ++si) {
    const auto& [split, n] = plan[si];
    const bool is_target = split == "target_unlabeled" || split == "target_fewshot" || split == "ood_test";
    auto& bucket = data.instances.by_name(split);
    for (std::size_t k = 0; k < n; ++k) {
      int domain = target;
      if (!is_target) {
        domain = spec.domains == 2 ? 0 : static_cast<int>(rng.below(spec.domains - 1));
      }
      SentencePair pair = sample_pair(spec, domain, rng);
      bucket.push_back(pair_to_instance(spec, pair, split));
      data.pairs[si].push_back(std::move(pair));
    }
  }
  for (Instance& inst : data.instances.target_unlabeled) {
    inst.y.reset();
    for (auto& t : inst.t) t.reset();
  }
  return data;
}

std::vector<AlphaSweepRow> sweep_alpha(const std::vector<SentencePair>& pairs,
                                       const std::vector<double>& grid) {
  if (pairs.empty()) throw ContractViolation("sweep_alpha: empty pair set");
  if (grid.empty()) throw ContractViolation("sweep_alpha: empty alpha grid");
  int max_label = 0;
  for (const SentencePair& p : pairs) max_label = std::max(max_label, p.label);
  const std::size_t labels = static_cast<std::size_t>(max_label) + 1;
  std::vector<double> scores(pairs.size());
  std::vector<std::size_t> label_counts(labels, 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    scores[i] = overlap_score(pairs[i].tokens_1, pairs[i].tokens_2);
    ++label_counts[static_cast<std::size_t>(pairs[i].label)];
  }
  std::vector<AlphaSweepRow> rows;
  rows.reserve(grid.size());
  for (double alpha : grid) {
    AlphaSweepRow row;
    row.alpha = alpha;
    std::vector<std::size_t> high(labels, 0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (scores[i] >= alpha) ++high[static_cast<std::size_t>(pairs[i].label)];
    }
    for (std::size_t l = 0; l < labels; ++l) {
      row.frac_high_per_label.push_back(
          label_counts[l] == 0 ? 0.0
                               : static_cast<double>(high[l]) / static_cast<double>(label_counts[l]));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(static_cast<double>(i) * 0.05);
  return grid;
}

void write_pairs(const std::string& path, const ordered_json& header_echo,
                 const std::vector<SentencePair>& pairs, const std::vector<int>* t) {
  if (t && t->size() != pairs.size()) {
    throw ContractViolation("write_pairs: annotation length does not match pair count");
  }
  std::ofstream os(path);
  if (!os) throw IoError("cannot open pairs file for writing: " + path);
  ordered_json header;
  header["format"] = "cadaft-pairs";
  header["version"] = 1;
  header["spec"] = header_echo;
  header["count"] = pairs.size();
  os << header.dump() << "\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const SentencePair& p = pairs[i];
    ordered_json j;
    j["tokens_1"] = p.tokens_1;
    j["tokens_2"] = p.tokens_2;
    j["label"] = p.label;
    j["domain"] = p.domain;
    if (t) j["t"] = (*t)[i];
    os << j.dump() << "\n";
  }
  if (!os) throw IoError("write failed for pairs file: " + path);
}

PairsFile read_pairs(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open pairs file: " + path);
  PairsFile out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (line_no == 1) {
      if (!j.contains("format") || j["format"] != "cadaft-pairs") {
        throw IoError(path + ": not a cadaft-pairs file");
      }
      out.header = j;
      continue;
    }
    SentencePair p;
    const auto fail = [&](const std::string& what) {
      throw IoError(path + ":" + std::to_string(line_no) + ": " + what);
    };
    if (!j.contains("tokens_1") || !j["tokens_1"].is_array()) fail("record missing 'tokens_1'");
    if (!j.contains("tokens_2") || !j["tokens_2"].is_array()) fail("record missing 'tokens_2'");
    p.tokens_1 = j["tokens_1"].get<std::vector<std::string>>();
    p.tokens_2 = j["tokens_2"].get<std::vector<std::string>>();
    if (!j.contains("label") || !j["label"].is_number_integer()) fail("record missing 'label'");
    p.label = j["label"].get<int>();
    if (j.contains("domain") && j["domain"].is_number_integer()) p.domain = j["domain"].get<int>();
    out.pairs.push_back(std::move(p));
  }
  if (line_no == 0) throw IoError(path + ": empty pairs file (missing header)");
  return out;
}

}  // namespace cadaft

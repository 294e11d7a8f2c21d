#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "data/dataset.hpp"
#include "json.hpp"

namespace cadaft {

struct SentencePair {
  std::vector<std::string> tokens_1;
  std::vector<std::string> tokens_2;
  int label = 0;
  int domain = 0;
};

/// Cross-pair token match count over combined length: every (i, j) pair with
/// equal tokens counts, duplicates included, divided by M + N. Symmetric in
/// the two lists. Both lists empty is a domain error.
double overlap_score(const std::vector<std::string>& tokens_1,
                     const std::vector<std::string>& tokens_2);

/// Overlap confounder: 1 iff the score reaches alpha. `set_based` switches
/// to unique-token intersection counting for sensitivity analysis.
int annotate_overlap(const SentencePair& pair, double alpha, bool set_based = false);

double overlap_score_set(const std::vector<std::string>& tokens_1,
                         const std::vector<std::string>& tokens_2);

/// Paired-sentence benchmark with a controllable overlap-label association.
/// Per domain, p_high gives the probability of a high-overlap pair for
/// label 1 and label 0; the source regime correlates overlap with the
/// label, the target regime makes overlap high for both labels. Features
/// are bag-of-token counts of the concatenated pair; the first `classes`
/// vocabulary slots are label-marker tokens carried by sentence 1, so the
/// label stays decodable independent of overlap.
struct TextlikeSpec {
  std::size_t vocab = 64;
  std::size_t sentence_len = 8;  // tokens per sentence, label marker excluded
  std::size_t classes = 2;
  std::size_t domains = 2;
  double alpha = 0.4;
  std::vector<std::array<double, 2>> p_high;  // per domain: {P(high|y=1), P(high|y=0)}
  std::size_t n_source_train = 2000;
  std::size_t n_id_test = 500;
  std::size_t n_target_unlabeled = 2000;
  std::size_t n_target_fewshot = 128;
  std::size_t n_ood_test = 500;

  std::vector<std::array<double, 2>> p_highs() const;
  std::size_t high_shared() const;  // shared tokens needed to reach alpha
  void validate() const;
  nlohmann::ordered_json echo() const;
};

struct TextlikeData {
  SplitSet instances;
  std::vector<std::vector<SentencePair>> pairs;  // aligned with SplitSet::names()
};

TextlikeData generate_textlike(const TextlikeSpec& spec, std::uint64_t seed);

/// Fraction of pairs annotated 1 at each threshold, split by label.
/// Fractions are non-increasing in alpha.
struct AlphaSweepRow {
  double alpha = 0.0;
  std::vector<double> frac_high_per_label;  // indexed by label
};

std::vector<AlphaSweepRow> sweep_alpha(const std::vector<SentencePair>& pairs,
                                       const std::vector<double>& grid);

std::vector<double> default_alpha_grid();  // 0.0 .. 1.0 step 0.05

// Sentence-pair line format (JSONL with a header line, fields
// {tokens_1, tokens_2, label, domain} plus optional "t" once annotated).
void write_pairs(const std::string& path, const nlohmann::ordered_json& header_echo,
                 const std::vector<SentencePair>& pairs, const std::vector<int>* t = nullptr);

struct PairsFile {
  nlohmann::ordered_json header;
  std::vector<SentencePair> pairs;
};

PairsFile read_pairs(const std::string& path);

}  // namespace cadaft

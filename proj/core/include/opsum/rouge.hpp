#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "opsum/corpus.hpp"
#include "opsum/text.hpp"

namespace opsum::rouge {

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Maximum number of words skipped between the two halves of a skip-bigram.
inline constexpr std::size_t kSkipDistance = 4;

/// Clipped n-gram overlap (n >= 1). Precision is over candidate n-grams,
/// recall over reference n-grams; F1 is 0 when both are 0. An empty
/// reference scores all zeros.
Score rouge_n(const Tokens& candidate, const Tokens& reference, std::size_t n);
/// Longest-common-subsequence precision/recall/F1.
Score rouge_l(const Tokens& candidate, const Tokens& reference);
/// Overlap of the unigram plus skip-bigram (at most kSkipDistance words in
/// between) multisets. The reported ROUGE-SU4 value is `recall`.
Score rouge_su4(const Tokens& candidate, const Tokens& reference);

// Same metrics over interned token ids.
Score rouge_n(std::span<const std::uint32_t> candidate, std::span<const std::uint32_t> reference,
              std::size_t n);
Score rouge_l(std::span<const std::uint32_t> candidate, std::span<const std::uint32_t> reference);
Score rouge_su4(std::span<const std::uint32_t> candidate, std::span<const std::uint32_t> reference);

/// Length of the longest common subsequence.
std::size_t lcs_length(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

struct InstanceMetrics {
  std::string cluster_id;
  double rouge1_f1 = 0.0;
  double rouge2_f1 = 0.0;
  double rougeL_f1 = 0.0;
  double rouge_su4_recall = 0.0;
  double rouge_su4_f1 = 0.0;
};

struct MetricReport {
  std::vector<InstanceMetrics> instances;
  InstanceMetrics mean;
  /// Instances whose reference was empty.
  std::size_t empty_references = 0;
};

/// Scores one prediction per cluster that has a reference summary (in
/// corpus order). Title tokens are unmasked on both sides first.
MetricReport evaluate_corpus(const std::vector<Tokens>& predictions, const Corpus& corpus);

/// "metric value" lines.
void write_report_text(std::ostream& out, const MetricReport& report);
/// One JSON record per instance plus a final {"cluster_id":"mean",...}.
void write_report_jsonl(std::ostream& out, const MetricReport& report);

}  // namespace opsum::rouge

#include "opsum/rouge.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "opsum/error.hpp"

namespace opsum::rouge {

namespace {

using Ids = std::vector<std::uint32_t>;
using Key = std::vector<std::uint32_t>;

Score make_score(double overlap, double candidate_units, double reference_units) {
  Score s;
  if (reference_units == 0.0) return s;
  s.precision = candidate_units > 0.0 ? overlap / candidate_units : 0.0;
  s.recall = overlap / reference_units;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

// Sorted n-gram keys; n-grams of length up to 3 pack into 64 bits.
std::vector<std::uint64_t> ngrams(std::span<const std::uint32_t> seq, std::size_t n) {
  std::vector<std::uint64_t> out;
  if (seq.size() < n) return out;
  out.reserve(seq.size() - n + 1);
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < n; ++k) key = key * 0x1000003ull + seq[i + k] + 1;
    out.push_back(key);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Skip-bigrams with at most kSkipDistance words in between, plus unigrams.
std::vector<std::uint64_t> su4_units(std::span<const std::uint32_t> seq) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out.push_back(static_cast<std::uint64_t>(seq[i]) + 1);
    for (std::size_t j = i + 1; j < seq.size() && j - i - 1 <= kSkipDistance; ++j) {
      out.push_back(((static_cast<std::uint64_t>(seq[i]) + 1) << 32) |
                    (static_cast<std::uint64_t>(seq[j]) + 1));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Size of the multiset intersection of two sorted ranges.
std::size_t clipped_overlap(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::size_t i = 0, j = 0, count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

std::pair<Ids, Ids> intern(const Tokens& a, const Tokens& b) {
  std::unordered_map<std::string, std::uint32_t> table;
  auto map = [&table](const Tokens& t) {
    Ids out;
    out.reserve(t.size());
    for (const auto& w : t) {
      out.push_back(table.try_emplace(w, static_cast<std::uint32_t>(table.size())).first->second);
    }
    return out;
  };
  Ids x = map(a);
  Ids y = map(b);
  return {std::move(x), std::move(y)};
}

}  // namespace

Score rouge_n(std::span<const std::uint32_t> candidate, std::span<const std::uint32_t> reference,
              std::size_t n) {
  require(n >= 1 && n <= 3, ErrorKind::kArgument, "rouge_n: n must be 1, 2 or 3");
  const auto c = ngrams(candidate, n);
  const auto r = ngrams(reference, n);
  return make_score(static_cast<double>(clipped_overlap(c, r)), static_cast<double>(c.size()),
                    static_cast<double>(r.size()));
}

std::size_t lcs_length(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

Score rouge_l(std::span<const std::uint32_t> candidate, std::span<const std::uint32_t> reference) {
  return make_score(static_cast<double>(lcs_length(candidate, reference)),
                    static_cast<double>(candidate.size()), static_cast<double>(reference.size()));
}

Score rouge_su4(std::span<const std::uint32_t> candidate, std::span<const std::uint32_t> reference) {
  const auto c = su4_units(candidate);
  const auto r = su4_units(reference);
  return make_score(static_cast<double>(clipped_overlap(c, r)), static_cast<double>(c.size()),
                    static_cast<double>(r.size()));
}

Score rouge_n(const Tokens& candidate, const Tokens& reference, std::size_t n) {
  auto [c, r] = intern(candidate, reference);
  return rouge_n(c, r, n);
}

Score rouge_l(const Tokens& candidate, const Tokens& reference) {
  auto [c, r] = intern(candidate, reference);
  return rouge_l(c, r);
}

Score rouge_su4(const Tokens& candidate, const Tokens& reference) {
  auto [c, r] = intern(candidate, reference);
  return rouge_su4(c, r);
}

MetricReport evaluate_corpus(const std::vector<Tokens>& predictions, const Corpus& corpus) {
  std::vector<const ReviewCluster*> scored;
  for (const auto& c : corpus.clusters) {
    if (c.summary) scored.push_back(&c);
  }
  require(predictions.size() == scored.size(), ErrorKind::kArgument,
          "evaluate_corpus: " + std::to_string(predictions.size()) + " predictions for " +
              std::to_string(scored.size()) + " reference summaries");
  MetricReport report;
  report.mean.cluster_id = "mean";
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const ReviewCluster& c = *scored[i];
    const Tokens title = c.title_tokens();
    const Tokens cand = unmask_title(predictions[i], title);
    const Tokens ref = unmask_title(c.summary->words, title);
    if (ref.empty()) ++report.empty_references;
    auto [ci, ri] = intern(cand, ref);
    InstanceMetrics m;
    m.cluster_id = c.id;
    m.rouge1_f1 = rouge_n(ci, ri, 1).f1;
    m.rouge2_f1 = rouge_n(ci, ri, 2).f1;
    m.rougeL_f1 = rouge_l(ci, ri).f1;
    const Score su4 = rouge_su4(ci, ri);
    m.rouge_su4_recall = su4.recall;
    m.rouge_su4_f1 = su4.f1;
    report.mean.rouge1_f1 += m.rouge1_f1;
    report.mean.rouge2_f1 += m.rouge2_f1;
    report.mean.rougeL_f1 += m.rougeL_f1;
    report.mean.rouge_su4_recall += m.rouge_su4_recall;
    report.mean.rouge_su4_f1 += m.rouge_su4_f1;
    report.instances.push_back(std::move(m));
  }
  if (!report.instances.empty()) {
    const double inv = 1.0 / static_cast<double>(report.instances.size());
    report.mean.rouge1_f1 *= inv;
    report.mean.rouge2_f1 *= inv;
    report.mean.rougeL_f1 *= inv;
    report.mean.rouge_su4_recall *= inv;
    report.mean.rouge_su4_f1 *= inv;
  }
  return report;
}

void write_report_text(std::ostream& out, const MetricReport& report) {
  const auto& m = report.mean;
  out << std::fixed << std::setprecision(6);
  out << "instances " << report.instances.size() << "\n";
  out << "rouge1_f1 " << m.rouge1_f1 << "\n";
  out << "rouge2_f1 " << m.rouge2_f1 << "\n";
  out << "rougeL_f1 " << m.rougeL_f1 << "\n";
  out << "rouge_su4_recall " << m.rouge_su4_recall << "\n";
  out << "rouge_su4_f1 " << m.rouge_su4_f1 << "\n";
  out << std::defaultfloat;
}

void write_report_jsonl(std::ostream& out, const MetricReport& report) {
  auto record = [&out](const InstanceMetrics& m) {
    nlohmann::json j;
    j["cluster_id"] = m.cluster_id;
    j["rouge1_f1"] = m.rouge1_f1;
    j["rouge2_f1"] = m.rouge2_f1;
    j["rougeL_f1"] = m.rougeL_f1;
    j["rouge_su4_recall"] = m.rouge_su4_recall;
    j["rouge_su4_f1"] = m.rouge_su4_f1;
    out << j.dump() << "\n";
  };
  for (const auto& m : report.instances) record(m);
  record(report.mean);
}

}  // namespace opsum::rouge

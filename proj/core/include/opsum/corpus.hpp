#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opsum/text.hpp"
#include "opsum/vocab.hpp"

namespace opsum {

struct Review {
  std::string raw_text;
  /// Lowercased, title-masked, truncated tokens.
  Tokens words;
  /// Base-vocabulary ids (out-of-vocabulary words map to kUnkId).
  std::vector<TokenId> ids;
  /// Cluster-level ids: base id, or an extended id for copyable OOV words.
  std::vector<TokenId> extended_ids;

  std::size_t size() const { return words.size(); }
};

/// N reviews of one target plus an optional reference summary.
struct ReviewCluster {
  std::string id;
  std::string title;
  std::vector<Review> reviews;
  std::optional<Review> summary;
  /// Surface forms of the per-cluster extended ids, which start at the base
  /// vocabulary size in order of first appearance in the reviews.
  std::vector<std::string> extended_vocab;

  /// Base plus extended vocabulary size.
  std::size_t output_size(const Vocabulary& vocab) const {
    return vocab.size() + extended_vocab.size();
  }
  /// Surface token of a base or extended id.
  const std::string& surface(TokenId id, const Vocabulary& vocab) const;
  Tokens title_tokens() const { return tokenize(title); }
};

enum class Split { kTrain, kDev, kTest };

struct CorpusStats {
  std::size_t clusters = 0;
  double reviews_per_cluster = 0.0;
  double tokens_per_review = 0.0;
  double tokens_per_summary = 0.0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

struct Corpus {
  Split split = Split::kTrain;
  std::vector<ReviewCluster> clusters;
  CorpusStats stats;

  /// Fills base and extended ids of every review and summary.
  void assign_ids(const Vocabulary& vocab);
};

CorpusStats compute_stats(const Corpus& corpus);

inline constexpr std::size_t kMaxReviewTokens = 60;
inline constexpr std::size_t kMaxSummaryTokens = 40;

struct LoadOptions {
  Split split = Split::kTrain;
  std::size_t max_review_tokens = kMaxReviewTokens;
  std::size_t max_summary_tokens = kMaxSummaryTokens;
};

/// Tokenizes, title-masks and truncates one text.
Review make_review(std::string raw_text, const Tokens& title, std::size_t max_tokens);

/// Line-delimited JSON, one cluster per line:
///   {"id": "...", "title": "...", "reviews": ["...", ...], "summary": "..."}
/// "title" and "summary" are optional. Blank lines are skipped. Errors name
/// the offending line.
Corpus parse_corpus(std::istream& in, const LoadOptions& options = {},
                    const std::string& source = "<stream>");
Corpus load_corpus(const std::string& path, const LoadOptions& options = {});
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::string& path, const Corpus& corpus);

}  // namespace opsum

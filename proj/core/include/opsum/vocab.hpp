#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "opsum/text.hpp"

namespace opsum {

using TokenId = std::size_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kBosId = 2;
inline constexpr TokenId kEosId = 3;
inline constexpr TokenId kTitleId = 4;
inline constexpr std::size_t kReservedCount = 5;

/// Token <-> id bijection over kept tokens. Ids 0-4 are reserved for
/// padding, unknown, sequence start, sequence end and the title token.
class Vocabulary {
 public:
  Vocabulary();

  /// Appends a token if absent; returns its id.
  TokenId add(const std::string& token);

  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  /// Id of `token`, or kUnkId when it was not kept.
  TokenId id(const std::string& token) const;
  const std::string& token(TokenId id) const;
  std::size_t size() const { return tokens_.size(); }

  std::vector<TokenId> encode(const Tokens& tokens) const;
  Tokens decode(const std::vector<TokenId>& ids) const;

  /// One token per line; line k holds id k (reserved tokens first).
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

struct Corpus;

/// Keeps every token seen at least `min_frequency` times across reviews and
/// summaries, ordered by descending count then lexicographically.
Vocabulary build_vocab(const Corpus& corpus, std::size_t min_frequency = 2);

}  // namespace opsum

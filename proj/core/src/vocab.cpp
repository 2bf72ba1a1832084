#include "opsum/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "opsum/corpus.hpp"
#include "opsum/error.hpp"

namespace opsum {

namespace {
const char* const kReservedTokens[kReservedCount] = {"<pad>", "<unk>", "<s>", "</s>", "<title>"};
}  // namespace

Vocabulary::Vocabulary() {
  for (const char* t : kReservedTokens) add(t);
}

TokenId Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.try_emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

TokenId Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  require(id < tokens_.size(), ErrorKind::kArgument,
          "token id " + std::to_string(id) + " outside vocabulary of " +
              std::to_string(tokens_.size()));
  return tokens_[id];
}

std::vector<TokenId> Vocabulary::encode(const Tokens& tokens) const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

Tokens Vocabulary::decode(const std::vector<TokenId>& ids) const {
  Tokens out;
  out.reserve(ids.size());
  for (TokenId i : ids) out.push_back(token(i));
  return out;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kData, "cannot write vocabulary " + path);
  for (const auto& t : tokens_) out << t << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kData, "cannot open vocabulary " + path);
  Vocabulary v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (line_no < kReservedCount) {
      require(line == kReservedTokens[line_no], ErrorKind::kData,
              path + ":" + std::to_string(line_no + 1) + ": expected reserved token " +
                  kReservedTokens[line_no]);
    } else {
      require(!line.empty() && !v.contains(line), ErrorKind::kData,
              path + ":" + std::to_string(line_no + 1) + ": empty or duplicate token");
      v.add(line);
    }
    ++line_no;
  }
  require(line_no >= kReservedCount, ErrorKind::kData, path + ": missing reserved tokens");
  return v;
}

Vocabulary build_vocab(const Corpus& corpus, std::size_t min_frequency) {
  require(min_frequency >= 1, ErrorKind::kArgument, "min_frequency must be at least 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& cluster : corpus.clusters) {
    for (const auto& r : cluster.reviews)
      for (const auto& w : r.words) ++counts[w];
    if (cluster.summary)
      for (const auto& w : cluster.summary->words) ++counts[w];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [token, count] : counts) {
    if (count >= min_frequency) kept.emplace_back(token, count);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (const auto& [token, _] : kept) v.add(token);
  return v;
}

}  // namespace opsum

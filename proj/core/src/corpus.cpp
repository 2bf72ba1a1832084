#include "opsum/corpus.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "opsum/error.hpp"

namespace opsum {

using nlohmann::json;

const std::string& ReviewCluster::surface(TokenId id, const Vocabulary& vocab) const {
  if (id < vocab.size()) return vocab.token(id);
  const std::size_t ext = id - vocab.size();
  require(ext < extended_vocab.size(), ErrorKind::kArgument,
          "id " + std::to_string(id) + " outside the extended vocabulary of cluster " + this->id);
  return extended_vocab[ext];
}

void Corpus::assign_ids(const Vocabulary& vocab) {
  for (auto& cluster : clusters) {
    cluster.extended_vocab.clear();
    std::map<std::string, TokenId> extended;
    for (auto& r : cluster.reviews) {
      r.ids = vocab.encode(r.words);
      r.extended_ids = r.ids;
      for (std::size_t k = 0; k < r.words.size(); ++k) {
        if (r.ids[k] != kUnkId || r.words[k] == "<unk>") continue;
        auto [it, inserted] =
            extended.try_emplace(r.words[k], vocab.size() + cluster.extended_vocab.size());
        if (inserted) cluster.extended_vocab.push_back(r.words[k]);
        r.extended_ids[k] = it->second;
      }
    }
    if (cluster.summary) {
      Review& s = *cluster.summary;
      s.ids = vocab.encode(s.words);
      s.extended_ids = s.ids;
      for (std::size_t k = 0; k < s.words.size(); ++k) {
        if (s.ids[k] != kUnkId) continue;
        if (auto it = extended.find(s.words[k]); it != extended.end()) s.extended_ids[k] = it->second;
      }
    }
  }
}

CorpusStats compute_stats(const Corpus& corpus) {
  CorpusStats s;
  s.clusters = corpus.clusters.size();
  std::size_t reviews = 0, review_tokens = 0, summaries = 0, summary_tokens = 0;
  for (const auto& c : corpus.clusters) {
    reviews += c.reviews.size();
    for (const auto& r : c.reviews) review_tokens += r.size();
    if (c.summary) {
      ++summaries;
      summary_tokens += c.summary->size();
    }
  }
  if (s.clusters) s.reviews_per_cluster = static_cast<double>(reviews) / s.clusters;
  if (reviews) s.tokens_per_review = static_cast<double>(review_tokens) / reviews;
  if (summaries) s.tokens_per_summary = static_cast<double>(summary_tokens) / summaries;
  return s;
}

Review make_review(std::string raw_text, const Tokens& title, std::size_t max_tokens) {
  Review r;
  r.words = mask_title(tokenize(raw_text), title);
  if (r.words.size() > max_tokens) r.words.resize(max_tokens);
  r.raw_text = std::move(raw_text);
  return r;
}

Corpus parse_corpus(std::istream& in, const LoadOptions& options, const std::string& source) {
  Corpus corpus;
  corpus.split = options.split;
  std::string line;
  std::size_t line_no = 0;
  auto bad = [&](const std::string& what) -> void {
    fail(ErrorKind::kData, source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      bad(std::string("malformed record: ") + e.what());
    }
    if (!record.is_object()) bad("record is not an object");
    if (!record.contains("id") || !record["id"].is_string()) bad("missing string field \"id\"");
    if (!record.contains("reviews") || !record["reviews"].is_array()) {
      bad("missing array field \"reviews\"");
    }
    ReviewCluster cluster;
    cluster.id = record["id"].get<std::string>();
    if (record.contains("title")) {
      if (!record["title"].is_string()) bad("field \"title\" must be a string");
      cluster.title = record["title"].get<std::string>();
    }
    const Tokens title = cluster.title_tokens();
    if (record["reviews"].empty()) bad("cluster '" + cluster.id + "' has zero reviews");
    for (const auto& text : record["reviews"]) {
      if (!text.is_string()) bad("reviews must be strings");
      Review r = make_review(text.get<std::string>(), title, options.max_review_tokens);
      if (r.words.empty()) bad("empty review in cluster '" + cluster.id + "'");
      cluster.reviews.push_back(std::move(r));
    }
    if (record.contains("summary") && !record["summary"].is_null()) {
      if (!record["summary"].is_string()) bad("field \"summary\" must be a string");
      Review s = make_review(record["summary"].get<std::string>(), title, options.max_summary_tokens);
      if (s.words.empty()) bad("empty summary in cluster '" + cluster.id + "'");
      cluster.summary = std::move(s);
    }
    corpus.clusters.push_back(std::move(cluster));
  }
  corpus.stats = compute_stats(corpus);
  return corpus;
}

Corpus load_corpus(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kData, "cannot open corpus " + path);
  return parse_corpus(in, options, path);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& c : corpus.clusters) {
    json record;
    record["id"] = c.id;
    if (!c.title.empty()) record["title"] = c.title;
    json reviews = json::array();
    for (const auto& r : c.reviews) reviews.push_back(r.raw_text);
    record["reviews"] = std::move(reviews);
    if (c.summary) record["summary"] = c.summary->raw_text;
    out << record.dump() << "\n";
  }
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kData, "cannot write corpus " + path);
  write_corpus(out, corpus);
}

}  // namespace opsum

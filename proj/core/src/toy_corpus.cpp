#include "opsum/toy_corpus.hpp"

#include <algorithm>
#include <set>

#include "opsum/error.hpp"
#include "opsum/params.hpp"

namespace opsum {

namespace {

const char* const kSyllables[] = {"zor", "ka", "mel", "tri", "vo", "dan", "lu", "pex", "qui", "bo"};

const char* const kTemplates[] = {
    "the {a} was {s}",
    "i thought the {a} felt {s}",
    "{t} has {s} {a}",
    "honestly the {a} in {t} is {s}",
    "{s} {a} overall",
    "what {s} {a} , really",
};

std::string fill(std::string text, const std::string& aspect, const std::string& sentiment,
                 const std::string& title) {
  auto replace = [&text](const std::string& key, const std::string& value) {
    for (std::size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key)) {
      text.replace(pos, key.size(), value);
    }
  };
  replace("{a}", aspect);
  replace("{s}", sentiment);
  replace("{t}", title);
  return text;
}

std::string make_title(Rng& rng) {
  auto word = [&rng] {
    std::string w = kSyllables[uniform_index(rng, std::size(kSyllables))];
    w += kSyllables[uniform_index(rng, std::size(kSyllables))];
    return w;
  };
  return word() + " " + word();
}

std::string make_sentence(const MarkerSet& aspect, const MarkerSet& sentiment,
                          const std::string& title, Rng& rng) {
  const std::string& a = aspect.markers[uniform_index(rng, aspect.markers.size())];
  const std::string& s = sentiment.markers[uniform_index(rng, sentiment.markers.size())];
  return fill(kTemplates[uniform_index(rng, std::size(kTemplates))], a, s, title);
}

// Labels for n items with a strict majority of `dominant` among `options`.
std::vector<std::size_t> majority_labels(std::size_t n, std::size_t dominant,
                                         std::size_t options, Rng& rng) {
  std::size_t dominant_count = n;
  if (n >= 3) {
    const std::size_t low = n / 2 + 1;
    dominant_count = low + uniform_index(rng, n - low);
  }
  std::vector<std::size_t> labels(n, dominant);
  for (std::size_t i = dominant_count; i < n; ++i) {
    std::size_t other = uniform_index(rng, options - 1);
    labels[i] = other >= dominant ? other + 1 : other;
  }
  // Fisher-Yates with the portable index draw.
  for (std::size_t i = n; i > 1; --i) std::swap(labels[i - 1], labels[uniform_index(rng, i)]);
  return labels;
}

void validate(const ToyCorpusSpec& spec) {
  require(spec.aspects.size() >= 2, ErrorKind::kArgument, "toy corpus needs at least two aspects");
  require(spec.reviews_per_cluster >= 1, ErrorKind::kArgument,
          "toy corpus needs at least one review per cluster");
  std::set<std::string> seen;
  auto take = [&seen](const MarkerSet& set) {
    require(!set.markers.empty(), ErrorKind::kArgument, "marker set '" + set.name + "' is empty");
    for (const auto& m : set.markers) {
      require(seen.insert(m).second, ErrorKind::kArgument,
              "marker '" + m + "' appears in more than one marker set");
    }
  };
  for (const auto& a : spec.aspects) take(a);
  for (const auto& s : spec.sentiments) take(s);
}

}  // namespace

ToyCorpusSpec ToyCorpusSpec::standard(std::size_t clusters, std::size_t reviews_per_cluster,
                                      std::uint64_t seed) {
  ToyCorpusSpec spec;
  spec.clusters = clusters;
  spec.reviews_per_cluster = reviews_per_cluster;
  spec.aspects = {{"acting", {"acting", "performance"}}, {"plot", {"plot", "story"}}};
  spec.sentiments = {MarkerSet{"positive", {"great", "wonderful"}},
                     MarkerSet{"negative", {"awful", "dull"}}};
  spec.seed = seed;
  return spec;
}

ToyCorpus generate_toy_corpus(const ToyCorpusSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  ToyCorpus out;
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    ReviewCluster cluster;
    cluster.id = "toy-" + std::to_string(c);
    cluster.title = make_title(rng);
    const Tokens title = cluster.title_tokens();
    const std::size_t aspect = uniform_index(rng, spec.aspects.size());
    const std::size_t sentiment = uniform_index(rng, 2);
    const auto aspects = majority_labels(spec.reviews_per_cluster, aspect, spec.aspects.size(), rng);
    const auto sentiments = majority_labels(spec.reviews_per_cluster, sentiment, 2, rng);
    for (std::size_t i = 0; i < spec.reviews_per_cluster; ++i) {
      cluster.reviews.push_back(make_review(
          make_sentence(spec.aspects[aspects[i]], spec.sentiments[sentiments[i]], cluster.title, rng),
          title, kMaxReviewTokens));
    }
    const std::string summary = cluster.title + " is a film with " +
                                spec.sentiments[sentiment].markers.front() + " " +
                                spec.aspects[aspect].markers.front() + " .";
    cluster.summary = make_review(summary, title, kMaxSummaryTokens);
    out.corpus.clusters.push_back(std::move(cluster));
    out.majority_aspect.push_back(aspect);
    out.majority_sentiment.push_back(sentiment);
    out.review_aspects.push_back(aspects);
  }
  out.corpus.stats = compute_stats(out.corpus);
  return out;
}

Corpus generate_background(const ToyCorpusSpec& spec, std::size_t aspect, std::size_t count,
                           std::uint64_t seed) {
  validate(spec);
  require(aspect < spec.aspects.size(), ErrorKind::kArgument, "background aspect out of range");
  require(count >= 1, ErrorKind::kArgument, "background set must be non-empty");
  Rng rng(seed);
  ReviewCluster cluster;
  cluster.id = "background-" + spec.aspects[aspect].name;
  for (std::size_t i = 0; i < count; ++i) {
    const std::string title = make_title(rng);
    cluster.reviews.push_back(make_review(
        make_sentence(spec.aspects[aspect], spec.sentiments[uniform_index(rng, 2)], title, rng),
        tokenize(title), kMaxReviewTokens));
  }
  Corpus corpus;
  corpus.clusters.push_back(std::move(cluster));
  corpus.stats = compute_stats(corpus);
  return corpus;
}

std::optional<std::size_t> find_marker_set(const Tokens& words, const std::vector<MarkerSet>& sets) {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!mentions(words, sets[i])) continue;
    if (found) return std::nullopt;
    found = i;
  }
  return found;
}

bool mentions(const Tokens& words, const MarkerSet& set) {
  return std::any_of(words.begin(), words.end(), [&set](const std::string& w) {
    return std::find(set.markers.begin(), set.markers.end(), w) != set.markers.end();
  });
}

}  // namespace opsum

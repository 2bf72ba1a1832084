#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "opsum/checkpoint.hpp"
#include "opsum/condense.hpp"
#include "opsum/customization.hpp"
#include "opsum/error.hpp"
#include "opsum/pipeline.hpp"
#include "opsum/rouge.hpp"
#include "opsum/toy_corpus.hpp"
#include "selfcheck.hpp"

namespace opsum::cli {

namespace {

using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string stage = "condense";
  std::string corpus, dev, checkpoint, out, background, need, predictions, metrics;
  std::uint64_t seed = 0;
  std::size_t beam = kDefaultBeam;
  std::size_t k = extractive::kDefaultTopK;
  std::size_t batch = 8;
  std::optional<std::size_t> epochs;
  std::size_t workers = 1;
  std::size_t max_length = kDefaultMaxLength;
  std::size_t embedding = 128;
  std::size_t hidden = 128;
  std::size_t attention = 256;
  double dropout = kDropoutRate;
  double learning_rate = 1e-3;
  bool no_extracts = false;
  bool extracts = false;
  bool no_fusion_loss = false;
  std::size_t clusters = 10;
  std::size_t reviews = 6;
  std::size_t count = 0;
  std::string precision = "f32";

  json to_json() const {
    json j{{"command", command},      {"corpus", corpus},       {"dev", dev},
           {"checkpoint", checkpoint}, {"out", out},             {"seed", seed},
           {"beam", beam},            {"k", k},                 {"batch", batch},
           {"workers", workers},      {"max_length", max_length}, {"precision", precision}};
    if (command == "train") {
      j["stage"] = stage;
      j["epochs"] = epochs ? *epochs : (stage == "condense" ? 10 : 30);
      j["embedding"] = embedding;
      j["hidden"] = hidden;
      j["attention"] = attention;
      j["dropout"] = dropout;
      j["learning_rate"] = learning_rate;
      j["use_extracts"] = !no_extracts;
      j["use_fusion_loss"] = !no_fusion_loss;
    }
    if (command == "customize") {
      j["background"] = background;
      j["need"] = need;
      j["use_extracts"] = extracts && !no_extracts;
    }
    if (command == "summarize") j["use_extracts"] = !no_extracts;
    if (command == "evaluate") j["predictions"] = predictions;
    if (command == "gentoy") {
      j["clusters"] = clusters;
      j["reviews"] = reviews;
      j["need"] = need;
      j["count"] = count;
    }
    return j;
  }
};

std::string vocab_path(const std::string& checkpoint) { return checkpoint + ".vocab"; }

Corpus read_corpus(const std::string& path, const Vocabulary* vocab, Split split = Split::kTrain) {
  require(!path.empty(), ErrorKind::kArgument, "--corpus is required");
  LoadOptions options;
  options.split = split;
  Corpus c = load_corpus(path, options);
  if (vocab) c.assign_ids(*vocab);
  return c;
}

Model read_model(const std::string& checkpoint) {
  require(!checkpoint.empty(), ErrorKind::kArgument, "--checkpoint is required");
  require(std::filesystem::exists(checkpoint), ErrorKind::kData,
          "checkpoint not found: " + checkpoint);
  return from_checkpoint(load_checkpoint(checkpoint), Vocabulary::load(vocab_path(checkpoint)));
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    require(static_cast<bool>(file_), ErrorKind::kData, "cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void write_metrics(std::ofstream* metrics, const json& record) {
  if (metrics) *metrics << record.dump() << "\n";
}

int train_condense(const RunConfig& cfg) {
  require(!cfg.checkpoint.empty(), ErrorKind::kArgument, "--checkpoint (output path) is required");
  Corpus train = read_corpus(cfg.corpus, nullptr);
  Vocabulary vocab = build_vocab(train);
  train.assign_ids(vocab);
  std::optional<Corpus> dev;
  if (!cfg.dev.empty()) dev = read_corpus(cfg.dev, &vocab, Split::kDev);
  spdlog::info("vocabulary: {} tokens; {} training clusters", vocab.size(), train.clusters.size());

  condense::Config config;
  config.vocab_size = vocab.size();
  config.embedding_dim = cfg.embedding;
  config.hidden = cfg.hidden;
  config.dropout = cfg.dropout;
  condense::TrainOptions options;
  options.epochs = cfg.epochs.value_or(10);
  options.batch_size = cfg.batch;
  options.seed = cfg.seed;
  options.adam.learning_rate = cfg.learning_rate;
  std::ofstream metrics_file;
  if (!cfg.metrics.empty()) metrics_file.open(cfg.metrics);
  std::ofstream* metrics = metrics_file.is_open() ? &metrics_file : nullptr;
  options.on_epoch = [metrics](const condense::EpochReport& e) {
    spdlog::info("condense epoch {}: train {:.6f} eval {:.6f} dev {:.6f}", e.epoch, e.train_loss,
                 e.eval_loss, e.dev_loss);
    write_metrics(metrics, {{"stage", "condense"}, {"epoch", e.epoch}, {"train_loss", e.train_loss},
                            {"eval_loss", e.eval_loss}, {"dev_loss", e.dev_loss}});
  };
  condense::TrainReport report;
  Model model;
  model.vocab = vocab;
  model.condense = condense::train(train, dev ? &*dev : nullptr, config, options, &report);
  spdlog::info("condense initial loss {:.6f}, best epoch {}", report.initial_loss, report.best_epoch);
  write_metrics(metrics, {{"stage", "condense"}, {"epoch", 0}, {"eval_loss", report.initial_loss}});
  save_checkpoint(cfg.checkpoint, to_checkpoint(model));
  vocab.save(vocab_path(cfg.checkpoint));
  spdlog::info("wrote {} and {}", cfg.checkpoint, vocab_path(cfg.checkpoint));
  return kOk;
}

int train_abstract_stage(const RunConfig& cfg) {
  require(!cfg.checkpoint.empty(), ErrorKind::kArgument,
          "--checkpoint (the trained condense checkpoint) is required");
  if (!std::filesystem::exists(cfg.checkpoint) ||
      !std::filesystem::exists(vocab_path(cfg.checkpoint))) {
    fail(ErrorKind::kData, "missing prerequisite: condense checkpoint " + cfg.checkpoint +
                               " (run `train --stage condense` first)");
  }
  Model model = read_model(cfg.checkpoint);
  model.abstract = ParameterSet{};
  Corpus train = read_corpus(cfg.corpus, &model.vocab);
  std::optional<Corpus> dev;
  if (!cfg.dev.empty()) dev = read_corpus(cfg.dev, &model.vocab, Split::kDev);
  const auto prepared_train = prepare_corpus(model, train, cfg.k);
  std::vector<PreparedCluster> prepared_dev;
  if (dev) prepared_dev = prepare_corpus(model, *dev, cfg.k);

  AbstractTrainOptions options;
  options.epochs = cfg.epochs.value_or(30);
  options.batch_size = cfg.batch;
  options.seed = cfg.seed;
  options.use_extracts = !cfg.no_extracts;
  options.use_fusion_loss = !cfg.no_fusion_loss;
  options.dropout = cfg.dropout;
  options.embedding_dim = cfg.embedding;
  options.attention_dim = cfg.attention;
  options.dev_beam = cfg.beam;
  options.max_length = cfg.max_length;
  options.adam.learning_rate = cfg.learning_rate;
  std::ofstream metrics_file;
  if (!cfg.metrics.empty()) metrics_file.open(cfg.metrics);
  std::ofstream* metrics = metrics_file.is_open() ? &metrics_file : nullptr;
  options.on_epoch = [metrics](const AbstractEpochReport& e) {
    spdlog::info("abstract epoch {}: loss {:.6f} (generation {:.6f}, fusion {:.6f}) dev ROUGE-L {:.4f}",
                 e.epoch, e.train_loss, e.generation_loss, e.fusion_loss, e.dev_rouge_l);
    write_metrics(metrics, {{"stage", "abstract"}, {"epoch", e.epoch}, {"train_loss", e.train_loss},
                            {"generation_loss", e.generation_loss}, {"fusion_loss", e.fusion_loss},
                            {"dev_rouge_l", e.dev_rouge_l}});
  };
  AbstractTrainReport report;
  model.abstract = train_abstract(model, prepared_train, dev ? &prepared_dev : nullptr, options, &report);
  const std::string out = cfg.out.empty() ? cfg.checkpoint : cfg.out;
  save_checkpoint(out, to_checkpoint(model));
  model.vocab.save(vocab_path(out));
  spdlog::info("best epoch {}; wrote {}", report.best_epoch, out);
  return kOk;
}

json summary_record(const ReviewCluster& cluster, const Summary& s) {
  return {{"id", cluster.id},
          {"summary", s.text},
          {"score", s.score},
          {"pooling_weights", std::vector<double>(s.pooling_weights.values().begin(),
                                                  s.pooling_weights.values().end())}};
}

int summarize_cmd(const RunConfig& cfg) {
  Model model = read_model(cfg.checkpoint);
  require(model.has_abstract(), ErrorKind::kData,
          "checkpoint " + cfg.checkpoint + " has no Abstract parameters (run `train --stage abstract`)");
  Corpus corpus = read_corpus(cfg.corpus, &model.vocab);
  const auto prepared = prepare_corpus(model, corpus, cfg.k);
  SummarizeOptions options;
  options.beam = cfg.beam;
  options.max_length = cfg.max_length;
  if (cfg.no_extracts) options.use_extracts = false;
  const auto summaries = summarize_all(model, prepared, options, cfg.workers);
  Output out(cfg.out);
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    out.stream() << summary_record(corpus.clusters[i], summaries[i]).dump() << "\n";
  }
  spdlog::info("summarized {} clusters", summaries.size());
  return kOk;
}

int customize_cmd(const RunConfig& cfg) {
  require(!cfg.background.empty(), ErrorKind::kArgument, "--background is required");
  require(!cfg.need.empty(), ErrorKind::kArgument, "--need is required");
  Model model = read_model(cfg.checkpoint);
  require(model.has_abstract(), ErrorKind::kData,
          "checkpoint " + cfg.checkpoint + " has no Abstract parameters");
  Corpus corpus = read_corpus(cfg.corpus, &model.vocab);
  Corpus background_corpus = read_corpus(cfg.background, &model.vocab);
  const auto background =
      customization::background_from_corpus(background_corpus, cfg.need, cfg.count);
  const Tensor query = customization::build_query(background, model.condense);
  spdlog::info("need '{}': {} background reviews", cfg.need, background.reviews.size());

  customization::CustomizeOptions options;
  options.beam = cfg.beam;
  options.max_length = cfg.max_length;
  options.use_extracts = cfg.extracts && !cfg.no_extracts;
  Output out(cfg.out);
  for (const auto& cluster : corpus.clusters) {
    const PreparedCluster p = prepare_cluster(model, cluster, cfg.k);
    json record = summary_record(cluster, customization::summarize_customized(model, p, query, options));
    record["need"] = cfg.need;
    out.stream() << record.dump() << "\n";
  }
  return kOk;
}

int extract_cmd(const RunConfig& cfg) {
  Model model = read_model(cfg.checkpoint);
  Corpus corpus = read_corpus(cfg.corpus, &model.vocab);
  const extractive::CondenseEmbedder embedder(model.condense);
  Output out(cfg.out);
  for (const auto& cluster : corpus.clusters) {
    const auto sel = extractive::select_top_k(cluster.reviews, std::min(cfg.k, cluster.reviews.size()), embedder);
    std::string text;
    for (std::size_t i : sel.selected) {
      if (!text.empty()) text += " ";
      text += cluster.reviews[i].raw_text;
    }
    out.stream() << json{{"id", cluster.id}, {"summary", text}, {"indices", sel.selected}}.dump() << "\n";
  }
  return kOk;
}

int evaluate_cmd(const RunConfig& cfg) {
  require(!cfg.predictions.empty(), ErrorKind::kArgument, "--predictions is required");
  Corpus corpus = read_corpus(cfg.corpus, nullptr);
  std::ifstream in(cfg.predictions);
  require(static_cast<bool>(in), ErrorKind::kData, "cannot open predictions " + cfg.predictions);
  std::map<std::string, std::string> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      by_id[j.at("id").get<std::string>()] = j.at("summary").get<std::string>();
    } catch (const json::exception& e) {
      fail(ErrorKind::kData, cfg.predictions + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::vector<Tokens> predictions;
  for (const auto& c : corpus.clusters) {
    if (!c.summary) continue;
    auto it = by_id.find(c.id);
    require(it != by_id.end(), ErrorKind::kData, "no prediction for cluster '" + c.id + "'");
    predictions.push_back(tokenize(it->second));
  }
  const auto report = rouge::evaluate_corpus(predictions, corpus);
  rouge::write_report_text(std::cout, report);
  if (!cfg.out.empty()) {
    Output out(cfg.out);
    rouge::write_report_jsonl(out.stream(), report);
  }
  return kOk;
}

int gentoy_cmd(const RunConfig& cfg) {
  require(!cfg.out.empty(), ErrorKind::kArgument, "--out is required");
  const auto spec = ToyCorpusSpec::standard(cfg.clusters, cfg.reviews, cfg.seed);
  if (!cfg.need.empty()) {
    std::optional<std::size_t> aspect;
    for (std::size_t a = 0; a < spec.aspects.size(); ++a)
      if (spec.aspects[a].name == cfg.need) aspect = a;
    require(aspect.has_value(), ErrorKind::kArgument, "unknown toy aspect '" + cfg.need + "'");
    save_corpus(cfg.out, generate_background(spec, *aspect, cfg.count ? cfg.count : 50, cfg.seed));
  } else {
    save_corpus(cfg.out, generate_toy_corpus(spec).corpus);
  }
  spdlog::info("wrote {}", cfg.out);
  return kOk;
}

int selfcheck_cmd(const RunConfig& cfg) {
  bool ok = true;
  for (const auto& line : selfcheck::run_all(cfg.seed)) {
    std::cout << (line.passed ? "ok   " : "FAIL ") << line.name << ": " << line.detail << "\n";
    ok &= line.passed;
  }
  return ok ? kOk : kCheckFailure;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument:
      return kUsage;
    case ErrorKind::kCheck:
      return kCheckFailure;
    default:
      return kDataError;
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  if (!spdlog::get("opsum")) {
    auto logger = spdlog::stderr_logger_st("opsum");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
  }

  RunConfig cfg;
  CLI::App app{"Opinion summarization: condense, fuse and abstract review clusters"};
  app.require_subcommand(1);

  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("--corpus", cfg.corpus, "Line-delimited JSON corpus");
    sub->add_option("--checkpoint", cfg.checkpoint, "Model checkpoint path");
    sub->add_option("--out", cfg.out, "Output path (stdout when omitted)");
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--precision", cfg.precision, "Arithmetic precision: f32 or f64");
  };
  auto decoding = [&cfg](CLI::App* sub) {
    sub->add_option("--beam", cfg.beam, "Beam width")->check(CLI::PositiveNumber);
    sub->add_option("--k", cfg.k, "Number of extracted reviews")->check(CLI::PositiveNumber);
    sub->add_option("--max-length", cfg.max_length, "Maximum summary length")->check(CLI::PositiveNumber);
    sub->add_option("--workers", cfg.workers, "Worker threads for inference")->check(CLI::PositiveNumber);
  };

  auto* train = app.add_subcommand("train", "Train the condense or abstract stage");
  common(train);
  decoding(train);
  train->add_option("--stage", cfg.stage, "condense or abstract")
      ->check(CLI::IsMember({"condense", "abstract"}));
  train->add_option("--dev", cfg.dev, "Development corpus for early stopping");
  train->add_option("--epochs", cfg.epochs, "Training epochs");
  train->add_option("--batch", cfg.batch, "Batch size")->check(CLI::PositiveNumber);
  train->add_option("--embedding", cfg.embedding, "Word embedding width");
  train->add_option("--hidden", cfg.hidden, "Condense hidden size per direction");
  train->add_option("--attention", cfg.attention, "Attention width");
  train->add_option("--dropout", cfg.dropout, "Dropout rate")->check(CLI::Range(0.0, 0.99));
  train->add_option("--lr", cfg.learning_rate, "Adam learning rate");
  train->add_flag("--no-extracts", cfg.no_extracts, "Train without the salience-biased extracts");
  train->add_flag("--no-fusion-loss", cfg.no_fusion_loss, "Train without the fusion loss");
  train->add_option("--metrics", cfg.metrics, "Write per-epoch metrics as JSON lines");

  auto* summarize_app = app.add_subcommand("summarize", "Summarize every cluster of a corpus");
  common(summarize_app);
  decoding(summarize_app);
  summarize_app->add_flag("--no-extracts", cfg.no_extracts, "Decode without extracts");

  auto* customize = app.add_subcommand("customize", "Summarize under a user need");
  common(customize);
  decoding(customize);
  customize->add_option("--background", cfg.background, "Corpus of reviews expressing the need");
  customize->add_option("--need", cfg.need, "Label of the need");
  customize->add_option("--background-limit", cfg.count, "Cap on background reviews (0 keeps all)");
  customize->add_flag("--no-extracts", cfg.no_extracts, "Decode without extracts (default)");
  customize->add_flag("--extracts", cfg.extracts, "Decode with extracts");

  auto* extract = app.add_subcommand("extract", "Centroid-nearest review per cluster");
  common(extract);
  extract->add_option("--k", cfg.k, "Reviews to select")->check(CLI::PositiveNumber);

  auto* evaluate = app.add_subcommand("evaluate", "ROUGE against reference summaries");
  common(evaluate);
  evaluate->add_option("--predictions", cfg.predictions, "JSON lines with id and summary");

  auto* gentoy = app.add_subcommand("gentoy", "Write a synthetic aspect corpus");
  common(gentoy);
  gentoy->add_option("--clusters", cfg.clusters, "Number of clusters")->check(CLI::PositiveNumber);
  gentoy->add_option("--reviews", cfg.reviews, "Reviews per cluster")->check(CLI::PositiveNumber);
  gentoy->add_option("--need", cfg.need, "Write a background set for this aspect instead");
  gentoy->add_option("--count", cfg.count, "Background set size");

  auto* selfcheck_app = app.add_subcommand("selfcheck", "Gradient and oracle checks");
  common(selfcheck_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (extract->parsed() && extract->count("--k") == 0) cfg.k = 1;

  try {
    const PrecisionScope precision(parse_precision(cfg.precision));
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    spdlog::info("config {}", cfg.to_json().dump());
    if (sub == train) return cfg.stage == "condense" ? train_condense(cfg) : train_abstract_stage(cfg);
    if (sub == summarize_app) return summarize_cmd(cfg);
    if (sub == customize) return customize_cmd(cfg);
    if (sub == extract) return extract_cmd(cfg);
    if (sub == evaluate) return evaluate_cmd(cfg);
    if (sub == gentoy) return gentoy_cmd(cfg);
    return selfcheck_cmd(cfg);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e.kind());
  }
}

}  // namespace opsum::cli

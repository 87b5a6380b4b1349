// amaq command line front end. Talks to the library only through amaq.h.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "amaq/amaq.h"

namespace fs = std::filesystem;
using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(amaq_status status, const std::string& what) {
  if (status == AMAQ_OK) return;
  throw Failure(what + ": " + amaq_status_name(status) + ": " + amaq_last_error());
}

std::string take(char* s) {
  std::string out = s ? s : "";
  amaq_string_free(s);
  return out;
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    std::swap(ptr, o.ptr);
    return *this;
  }
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Dataset = Handle<amaq_dataset, amaq_dataset_free>;
using Embeddings = Handle<amaq_embeddings, amaq_embeddings_free>;
using Pairs = Handle<amaq_pairs, amaq_pairs_free>;
using Model = Handle<amaq_model, amaq_model_free>;

// Outputs are written to hidden temporaries and renamed into place only
// after the whole command succeeded; a failure leaves earlier outputs as they were.
class Staging {
 public:
  explicit Staging(fs::path dir) : dir_(std::move(dir)) {}
  ~Staging() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& [tmp, final_path] : files_) fs::remove(tmp, ec);
  }

  fs::path path(const std::string& name) {
    fs::path tmp = dir_ / (".tmp." + name);
    files_.emplace_back(tmp, dir_ / name);
    return tmp;
  }

  void text(const std::string& name, const std::string& content) {
    const fs::path tmp = path(name);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw Failure("cannot write " + tmp.string());
  }

  void checkpoint(const amaq_model* model, const std::string& base) {
    path(base + ".json");
    path(base + ".bin");
    check(amaq_model_save(model, (dir_ / (".tmp." + base)).c_str()), "saving " + base);
  }

  void dataset(const amaq_dataset* data, const std::string& name) {
    check(amaq_dataset_save(data, path(name).c_str()), "writing " + name);
  }

  void commit() {
    for (const auto& [tmp, final_path] : files_) fs::rename(tmp, final_path);
    committed_ = true;
  }

 private:
  fs::path dir_;
  std::vector<std::pair<fs::path, fs::path>> files_;
  bool committed_ = false;
};

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string threads_file;
  std::string embeddings;
  bool deterministic = false;
};

json load_config(const Common& c) {
  if (c.config_path.empty()) return json::object();
  std::ifstream in(c.config_path);
  if (!in) throw Failure("cannot open config " + c.config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Failure("config " + c.config_path + ": " + e.what());
  }
  if (!j.is_object()) throw Failure("config " + c.config_path + ": top level must be an object");
  return j;
}

// Precedence: flags, then the config file, then built-in defaults.
json resolve_common(const Common& c, json config) {
  if (c.seed) config["seed"] = *c.seed;
  if (!config.contains("seed")) config["seed"] = 0;
  if (!c.out.empty()) config["out"] = c.out;
  if (!config.contains("out")) config["out"] = ".";
  if (!c.threads_file.empty()) config["threads_file"] = c.threads_file;
  if (!c.embeddings.empty()) config["embeddings"] = c.embeddings;
  if (c.deterministic) config["deterministic"] = true;
  if (config.value("deterministic", false)) {
    config["workers"] = 1;
    if (config.contains("training")) config["training"]["workers"] = 1;
    if (config.contains("grid")) config["grid"]["threads"] = 1;
  }
  return config;
}

fs::path out_dir(const json& config) {
  fs::path dir = config.at("out").get<std::string>();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw Failure("cannot create output directory " + dir.string());
  return dir;
}

std::string require_path(const json& config, const char* key, const char* flag) {
  const std::string p = config.value(key, std::string());
  if (p.empty()) throw Failure(std::string("missing ") + flag);
  if (!fs::exists(p)) throw Failure(std::string(flag) + ": no such file " + p);
  return p;
}

std::string dataset_path(const json& config, const char* key, const fs::path& fallback) {
  std::string p = config.value(key, std::string());
  if (p.empty()) p = fallback.string();
  if (!fs::exists(p)) throw Failure(std::string("no such dataset ") + p);
  return p;
}

Dataset load_dataset(const std::string& path) {
  Dataset d;
  check(amaq_dataset_load(path.c_str(), d.out()), "reading " + path);
  return d;
}

Embeddings load_embeddings(const json& config, bool required) {
  Embeddings e;
  const std::string p = config.value("embeddings", std::string());
  if (p.empty()) {
    if (required) throw Failure("missing --embeddings");
    return e;
  }
  check(amaq_embeddings_load(p.c_str(), e.out()), "loading embeddings");
  return e;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Model-facing part of a config with flags applied.
json model_config(const json& config) {
  json m = config;
  for (const char* k : {"out", "threads_file", "embeddings", "deterministic", "train", "valid", "test",
                        "questions", "splits", "runs", "workers"})
    m.erase(k);
  if (config.contains("workers")) m["training"]["workers"] = config["workers"];
  return m;
}

std::string resolved_echo(const json& config, const amaq_embeddings* emb) {
  const std::size_t dim = emb ? amaq_embeddings_dimension(emb) : 1;
  char* resolved = nullptr;
  check(amaq_resolve_config(model_config(config).dump().c_str(), dim, &resolved), "configuration");
  json r = json::parse(take(resolved));
  json echo = config;
  echo["model"] = r;
  return dump(echo);
}

std::vector<double> scores_for(const amaq_model* model, const amaq_dataset* data) {
  std::vector<double> scores(amaq_dataset_size(data));
  check(amaq_model_predict(model, data, scores.data(), scores.size()), "prediction");
  return scores;
}

std::vector<int> labels_of(const amaq_dataset* data) {
  std::vector<int> labels(amaq_dataset_size(data));
  for (std::size_t i = 0; i < labels.size(); ++i) check(amaq_dataset_label(data, i, &labels[i]), "labels");
  return labels;
}

// ---- subcommands

int cmd_ingest(const json& config) {
  const std::string dump_path = require_path(config, "threads_file", "--threads-file");
  const fs::path dir = out_dir(config);
  amaq_ingest_options opts;
  amaq_ingest_options_init(&opts);
  opts.min_first_tier = config.value("min_first_tier", opts.min_first_tier);
  opts.reply_scope_subtree = config.value("reply_scope", std::string("direct")) == "subtree";
  opts.workers = config.value("workers", 1u);

  Dataset questions;
  char* stats = nullptr;
  char* summary = nullptr;
  check(amaq_ingest_file(dump_path.c_str(), &opts, questions.out(), &stats, &summary), "ingest");
  const std::string stats_csv = take(stats);
  const std::string summary_json = take(summary);

  Staging stage(dir);
  stage.dataset(questions.get(), "questions.jsonl");
  stage.text("stats.csv", stats_csv);
  stage.text("ingest.json", summary_json);
  stage.text("resolved-config.json", dump(config));
  stage.commit();

  const json s = json::parse(summary_json);
  std::cout << "threads: " << s["threads_total"] << " read, " << s["threads_kept"] << " kept, "
            << s["dropped_first_tier"] << " dropped (first-tier minimum), " << s["dropped_ama_request"]
            << " dropped (AMA request)\n"
            << "quarantined posts: " << s["quarantined_posts"] << "\n"
            << "questions: " << s["questions"] << " (" << fmt(s["percent_answered"].get<double>())
            << "% answered)\n";
  return 0;
}

amaq_corpus_format corpus_format(const std::string& name) {
  if (name == "tokenized") return AMAQ_CORPUS_TOKENIZED;
  if (name == "raw") return AMAQ_CORPUS_RAW;
  if (name == "questions") return AMAQ_CORPUS_QUESTIONS;
  throw Failure("unknown corpus format '" + name + "' (tokenized, raw, questions)");
}

int cmd_ngrams(const json& config) {
  const std::string corpus = require_path(config, "corpus", "--corpus");
  const fs::path dir = out_dir(config);
  const json ng = config.value("ngrams", json::object());
  std::vector<std::uint64_t> mins = ng.value("min_counts", std::vector<std::uint64_t>{2});
  if (mins.size() == 1) mins.assign(5, mins[0]);
  if (mins.size() != 5) throw Failure("min counts: give one value or five");
  const std::size_t x = ng.value("x", std::size_t{5});
  const std::string mode = ng.value("mode", std::string("paper"));
  if (mode != "paper" && mode != "computed") throw Failure("allocation mode must be paper or computed");

  char* csv = nullptr;
  char* profile = nullptr;
  check(amaq_ngram_profile(corpus.c_str(), corpus_format(ng.value("format", std::string("tokenized"))),
                           mins.data(), config.value("workers", 1u), &csv, &profile),
        "n-gram profile");
  const std::string profile_csv = take(csv);
  const std::string profile_json = take(profile);

  json profiles = json::array({json::parse(profile_json)});
  for (const auto& extra : ng.value("profiles", std::vector<std::string>{})) {
    std::ifstream in(extra);
    if (!in) throw Failure("cannot open profile " + extra);
    json p = json::parse(in);
    if (p.is_array())
      for (auto& e : p) profiles.push_back(e);
    else
      profiles.push_back(p);
  }
  char* alloc = nullptr;
  check(amaq_derive_allocation(profiles.dump().c_str(), x, mode == "computed", &alloc), "allocation");
  const std::string allocation = take(alloc);

  Staging stage(dir);
  stage.text("ngrams.csv", profile_csv);
  stage.text("profile.json", profile_json);
  stage.text("allocation.json", allocation);
  stage.text("resolved-config.json", dump(config));
  stage.commit();
  std::cout << profile_csv << allocation;
  return 0;
}

struct SplitData {
  Dataset train, valid, test;
};

// Explicit --train/--valid files, or a seeded temporal split of --questions.
SplitData training_data(const json& config, const fs::path& dir, Staging* stage) {
  SplitData s;
  if (config.contains("train")) {
    s.train = load_dataset(dataset_path(config, "train", ""));
    if (config.contains("valid")) s.valid = load_dataset(dataset_path(config, "valid", ""));
    return s;
  }
  const std::string qpath = dataset_path(config, "questions", dir / "questions.jsonl");
  Dataset all = load_dataset(qpath);
  const std::size_t n = amaq_dataset_size(all.get());
  std::vector<std::size_t> sizes = config.value("splits", std::vector<std::size_t>{});
  if (sizes.empty()) sizes = {n * 10 / 21, n / 21, n * 10 / 21};
  if (sizes.size() != 3) throw Failure("splits needs three sizes: train,valid,test");
  check(amaq_dataset_split(all.get(), sizes[0], sizes[1], sizes[2], config.at("seed").get<std::uint64_t>(),
                           s.train.out(), s.valid.out(), s.test.out()),
        "split");
  if (stage) {
    stage->dataset(s.train.get(), "train.jsonl");
    stage->dataset(s.valid.get(), "valid.jsonl");
    stage->dataset(s.test.get(), "test.jsonl");
  }
  return s;
}

int cmd_train(const json& config) {
  const fs::path dir = out_dir(config);
  Embeddings emb = load_embeddings(config, config.value("system", std::string("context-cnn")) != "logreg");
  Staging stage(dir);
  SplitData data = training_data(config, dir, &stage);
  const std::size_t runs = config.value("runs", std::size_t{1});
  if (runs < 1) throw Failure("--runs must be at least 1");
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();

  std::string history;
  for (std::size_t r = 0; r < runs; ++r) {
    json m = model_config(config);
    m["seed"] = amaq_run_seed(seed, r);
    Model model;
    char* hist = nullptr;
    check(amaq_model_train(m.dump().c_str(), data.train.get(), data.valid.get(), emb.get(), model.out(), &hist),
          "training run " + std::to_string(r));
    std::istringstream lines(take(hist));
    std::string line;
    std::getline(lines, line);
    if (r == 0) history += "run," + line + "\n";
    while (std::getline(lines, line)) history += std::to_string(r) + "," + line + "\n";
    stage.checkpoint(model.get(), "model-" + std::to_string(r));
    std::cout << "run " << r << ": " << amaq_model_system(model.get()) << " trained\n";
  }
  stage.text("history.csv", history);
  stage.text("resolved-config.json", resolved_echo(config, emb.get()));
  stage.commit();
  return 0;
}

std::vector<std::string> model_bases(const json& config, const fs::path& dir) {
  std::vector<std::string> bases = config.value("models", std::vector<std::string>{});
  if (!bases.empty()) return bases;
  for (std::size_t r = 0;; ++r) {
    const fs::path base = dir / ("model-" + std::to_string(r));
    if (!fs::exists(fs::path(base) += ".json")) break;
    bases.push_back(base.string());
  }
  if (bases.empty()) throw Failure("no models found; pass --model");
  return bases;
}

Model load_model(const std::string& base, const amaq_embeddings* emb) {
  Model m;
  check(amaq_model_load(base.c_str(), emb, m.out()), "loading " + base);
  return m;
}

int cmd_eval(const json& config) {
  const fs::path dir = out_dir(config);
  Embeddings emb = load_embeddings(config, false);
  Dataset data = load_dataset(dataset_path(config, "data", dir / "test.jsonl"));
  const std::vector<int> labels = labels_of(data.get());

  ojson runs = ojson::array();
  std::vector<double> aucs;
  std::string roc;
  std::string system;
  for (const auto& base : model_bases(config, dir)) {
    Model model = load_model(base, emb.get());
    system = amaq_model_system(model.get());
    const auto scores = scores_for(model.get(), data.get());
    double a = 0;
    check(amaq_auc(scores.data(), labels.data(), scores.size(), &a), "AUC");
    if (roc.empty()) {
      char* csv = nullptr;
      check(amaq_roc_csv(scores.data(), labels.data(), scores.size(), &csv), "ROC");
      roc = take(csv);
    }
    aucs.push_back(a);
    runs.push_back({{"model", fs::path(base).filename().string()}, {"auc", a}});
    std::cout << fs::path(base).filename().string() << " AUC: " << fmt(a) << "\n";
  }
  double mean = 0;
  for (double a : aucs) mean += a;
  mean /= static_cast<double>(aucs.size());
  const auto [lo, hi] = std::minmax_element(aucs.begin(), aucs.end());
  mean = std::clamp(mean, *lo, *hi);
  ojson summary;
  summary["system"] = system;
  summary["mean"] = mean;
  summary["min"] = *lo;
  summary["max"] = *hi;
  summary["runs"] = runs;
  summary["positives"] = std::count(labels.begin(), labels.end(), 1);
  summary["negatives"] = std::count(labels.begin(), labels.end(), 0);

  Staging stage(dir);
  stage.text("roc.csv", roc);
  stage.text("summary.json", summary.dump(2) + "\n");
  stage.commit();
  std::cout << "AUC: " << fmt(mean) << " (min " << fmt(*lo) << ", max " << fmt(*hi) << ")\n";
  return 0;
}

int cmd_predict(const json& config) {
  const fs::path dir = out_dir(config);
  Embeddings emb = load_embeddings(config, false);
  Dataset data = load_dataset(dataset_path(config, "data", dir / "test.jsonl"));
  Model model = load_model(model_bases(config, dir).front(), emb.get());
  const auto scores = scores_for(model.get(), data.get());
  std::string csv = "post_id,score\n";
  char buf[64];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const char* id = nullptr;
    check(amaq_dataset_post_id(data.get(), i, &id), "post id");
    std::snprintf(buf, sizeof buf, ",%.17g\n", scores[i]);
    csv += std::string(id) + buf;
  }
  Staging stage(dir);
  stage.text("predictions.csv", csv);
  stage.commit();
  std::cout << scores.size() << " predictions written\n";
  return 0;
}

std::map<std::string, double> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure("cannot open predictions " + path);
  std::map<std::string, double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("post_id", 0) == 0) continue;
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw Failure(path + ":" + std::to_string(lineno) + ": expected post_id,score");
    try {
      out[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw Failure(path + ":" + std::to_string(lineno) + ": bad score");
    }
  }
  return out;
}

int cmd_pairs(const json& config) {
  const fs::path dir = out_dir(config);
  Dataset questions = load_dataset(dataset_path(config, "questions", dir / "questions.jsonl"));
  Pairs pairs;
  check(amaq_pairs_build(questions.get(), pairs.out()), "pairs");
  Staging stage(dir);
  const fs::path pairs_tmp = stage.path("pairs.jsonl");
  check(amaq_pairs_save(pairs.get(), pairs_tmp.c_str()), "writing pairs");
  std::cout << amaq_pairs_size(pairs.get()) << " pairs\n";

  const std::string pred = config.value("predictions", std::string());
  if (!pred.empty()) {
    const auto scores = read_predictions(pred);
    std::vector<const char*> ids;
    std::vector<double> values;
    for (const auto& [id, v] : scores) {
      ids.push_back(id.c_str());
      values.push_back(v);
    }
    double agreement = 0;
    check(amaq_pairs_agreement(pairs.get(), ids.data(), values.data(), ids.size(), &agreement), "agreement");
    ojson a;
    a["pairs"] = amaq_pairs_size(pairs.get());
    a["agreement"] = agreement;
    stage.text("agreement.json", a.dump(2) + "\n");
    std::cout << "agreement: " << fmt(agreement) << "\n";
  }
  stage.commit();
  return 0;
}

int cmd_grid(const json& config) {
  const fs::path dir = out_dir(config);
  Embeddings emb = load_embeddings(config, true);
  Staging stage(dir);
  SplitData data = training_data(config, dir, nullptr);
  if (!data.valid.get()) throw Failure("grid needs validation data");
  json m = model_config(config);
  if (config.contains("workers")) m["grid"]["threads"] = config["workers"];
  char* csv = nullptr;
  check(amaq_run_grid(m.dump().c_str(), data.train.get(), data.valid.get(), emb.get(), &csv), "grid");
  const std::string grid = take(csv);
  stage.text("grid.csv", grid);
  stage.text("resolved-config.json", dump(config));
  stage.commit();
  std::cout << grid;
  return 0;
}

int cmd_curve(const json& config) {
  const fs::path dir = out_dir(config);
  Embeddings emb = load_embeddings(config, config.value("system", std::string("context-cnn")) != "logreg");
  Staging stage(dir);
  SplitData data = training_data(config, dir, nullptr);
  if (!data.valid.get()) throw Failure("curve needs validation data");
  char* csv = nullptr;
  check(amaq_learning_curve(model_config(config).dump().c_str(), data.train.get(), data.valid.get(), emb.get(),
                            &csv),
        "learning curve");
  const std::string curve = take(csv);
  stage.text("curve.csv", curve);
  stage.text("resolved-config.json", resolved_echo(config, emb.get()));
  stage.commit();
  std::cout << curve;
  return 0;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "base random seed (default 0)");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--threads-file", c.threads_file, "thread dump, JSON Lines");
  app->add_option("--embeddings", c.embeddings, "word vectors in text format");
  app->add_flag("--deterministic", c.deterministic, "single-threaded execution");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Question answerability pipeline for AMA threads"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(amaq_version()));

  Common common;
  std::map<std::string, std::function<int(const json&)>> handlers;

  auto sub = [&](const char* name, const char* help, std::function<int(const json&)> fn) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s, common);
    handlers[name] = std::move(fn);
    return s;
  };

  std::string system, reply_scope, format, mode, data, questions, train, valid, predictions, corpus;
  std::vector<std::string> models, profiles;
  std::vector<std::size_t> splits;
  std::vector<std::uint64_t> min_counts;
  std::size_t runs = 0, x = 0, min_first_tier = 0;
  unsigned workers = 0;

  auto* ingest = sub("ingest", "build questions.jsonl and stats.csv from a thread dump", cmd_ingest);
  ingest->add_option("--min-first-tier", min_first_tier, "minimum first-tier posts (default 100)");
  ingest->add_option("--reply-scope", reply_scope, "direct or subtree")->check(CLI::IsMember({"direct", "subtree"}));
  ingest->add_option("--workers", workers, "parallel parse and label workers (default hardware)");

  auto* ngrams = sub("ngrams", "n-gram growth profile and filter allocation", cmd_ngrams);
  ngrams->add_option("--corpus", corpus, "corpus file");
  ngrams->add_option("--format", format, "tokenized, raw or questions")
      ->check(CLI::IsMember({"tokenized", "raw", "questions"}));
  ngrams->add_option("--min-count", min_counts, "one threshold, or one per order 1..5");
  ngrams->add_option("--x", x, "filters for window 1 (default 5)");
  ngrams->add_option("--mode", mode, "paper or computed")->check(CLI::IsMember({"paper", "computed"}));
  ngrams->add_option("--profile", profiles, "extra profile.json files to average with");
  ngrams->add_option("--workers", workers, "counting shards processed in parallel");

  for (auto* s : {sub("train", "train a model; writes model-<run>.json/.bin and history.csv", cmd_train),
                  sub("grid", "baseline CNN window/filter grid", cmd_grid),
                  sub("curve", "validation AUC against training size", cmd_curve)}) {
    s->add_option("--system", system, "context-cnn, baseline-cnn or logreg");
    s->add_option("--questions", questions, "questions.jsonl to split (default <out>/questions.jsonl)");
    s->add_option("--train", train, "explicit training set");
    s->add_option("--valid", valid, "explicit validation set");
    s->add_option("--splits", splits, "train,valid,test sizes")->delimiter(',')->expected(3);
    s->add_option("--workers", workers, "training threads; for grid, parallel configurations");
    if (std::string(s->get_name()) == "train") s->add_option("--runs", runs, "independent runs (default 1)");
  }

  for (auto* s : {sub("eval", "AUC and ROC on a labeled set; writes roc.csv and summary.json", cmd_eval),
                  sub("predict", "scores in input order; writes predictions.csv", cmd_predict)}) {
    s->add_option("--model", models, "checkpoint base path (default <out>/model-<run>)");
    s->add_option("--data", data, "questions to score (default <out>/test.jsonl)");
  }

  auto* pairs = sub("pairs", "answered/unanswered pairs; agreement with --predictions", cmd_pairs);
  pairs->add_option("--questions", questions, "questions.jsonl (default <out>/questions.jsonl)");
  pairs->add_option("--predictions", predictions, "predictions.csv to score the pairs with");

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  auto given = [&](const char* flag) {
    try {
      return chosen->get_option(flag)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };

  try {
    json config = load_config(common);
    if (given("--system")) config["system"] = system;
    if (given("--min-first-tier")) config["min_first_tier"] = min_first_tier;
    if (given("--reply-scope")) config["reply_scope"] = reply_scope;
    if (given("--workers")) config["workers"] = workers;
    if (given("--corpus")) config["corpus"] = corpus;
    if (given("--format")) config["ngrams"]["format"] = format;
    if (given("--min-count")) config["ngrams"]["min_counts"] = min_counts;
    if (given("--x")) config["ngrams"]["x"] = x;
    if (given("--mode")) config["ngrams"]["mode"] = mode;
    if (given("--profile")) config["ngrams"]["profiles"] = profiles;
    if (given("--questions")) config["questions"] = questions;
    if (given("--train")) config["train"] = train;
    if (given("--valid")) config["valid"] = valid;
    if (given("--splits")) config["splits"] = splits;
    if (given("--runs")) config["runs"] = runs;
    if (given("--model")) config["models"] = models;
    if (given("--data")) config["data"] = data;
    if (given("--predictions")) config["predictions"] = predictions;
    config = resolve_common(common, std::move(config));
    return handlers.at(chosen->get_name())(config);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    std::cerr << "error: configuration: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}

// acceptance [N]: runs criterion N (1-9), or all of them, printing one
// PASS/FAIL line each. Exit status is non-zero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "amaq/cnn.hpp"
#include "amaq/corpus.hpp"
#include "amaq/experiments.hpp"
#include "amaq/logreg.hpp"
#include "amaq/metrics.hpp"
#include "amaq/ngram.hpp"
#include "amaq/synthetic.hpp"

using namespace amaq;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

fs::path scratch(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("amaq-accept-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(AMAQ_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  if (output) *output = out;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

fs::path fixture(const char* name) { return fs::path(AMAQ_FIXTURES) / name; }

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

// ---------------------------------------------------------------------------

Outcome gradients() {
  Outcome o;
  std::mt19937_64 gen(20160401);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double eps = 1e-5;
  double worst = 0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    cnn::ModelConfig c;
    c.length = 1 + gen() % 6;
    c.dim = 1 + gen() % 4;
    c.window_sizes.clear();
    c.filters.clear();
    for (std::size_t n = 1; n <= std::min<std::size_t>(3, c.length); ++n)
      if (gen() % 2 || (n == 1 && c.length == 1)) {
        c.window_sizes.push_back(n);
        c.filters.push_back(1 + gen() % 3);
      }
    if (c.window_sizes.empty()) {
      c.window_sizes = {1};
      c.filters = {2};
    }
    c.activation = gen() % 2 ? cnn::Activation::Relu : cnn::Activation::Tanh;
    c.weight_pos = 1.0 + static_cast<double>(gen() % 4);
    c.seed = gen();
    cnn::Model m = cnn::make_model(c);
    for (auto p : m.parameters())
      for (double& v : p) v = u(gen);  // biases included
    m.touch();

    EncodedQuestion x;
    x.rows = c.length;
    x.dim = c.dim;
    x.true_length = c.length;
    x.row_ids.assign(c.length, EmbeddingTable::kOov);
    x.label = static_cast<int>(gen() % 2);
    for (std::size_t i = 0; i < c.length * c.dim; ++i) x.matrix.push_back(u(gen));

    for (bool train : {false, true}) {
      const std::uint64_t seed = gen();
      auto loss = [&] {
        const auto cache = cnn::forward(m, x, train, seed);
        return cnn::weighted_loss(cache.probabilities, x.label, c.weight_pos, c.weight_neg);
      };
      const cnn::Gradients g = cnn::backward(m, cnn::forward(m, x, train, seed), x.label);
      auto params = m.parameters();
      for (std::size_t i = 0; i < g.dense.size(); ++i)
        for (std::size_t k = 0; k < params[i].size(); ++k) {
          const double keep = params[i][k];
          params[i][k] = keep + eps;
          m.touch();
          const double up = loss();
          params[i][k] = keep - eps;
          m.touch();
          const double down = loss();
          params[i][k] = keep;
          m.touch();
          const double r = rel_err(g.dense[i][k], (up - down) / (2 * eps));
          worst = std::max(worst, r);
          ++checked;
          if (r >= 1e-4) {
            std::ostringstream what;
            what << "trial " << trial << " " << m.parameter_names()[i] << "[" << k << "] rel " << r;
            o.require(false, what.str());
          }
        }
    }
  }
  o.detail << (o.pass ? "" : " | ") << checked << " partials, worst relative error " << worst;
  return o;
}

Outcome tiny_model() {
  Outcome o;
  // x = (1,2), (0,-1), (3,1), pad; windows {1,2}, one relu filter each.
  cnn::ModelConfig c;
  c.window_sizes = {1, 2};
  c.filters = {1, 1};
  c.dim = 2;
  c.length = 4;
  cnn::Model m = cnn::make_model(c);
  m.mutable_banks()[0].weights = {0.5, -1};
  m.mutable_banks()[0].bias = {0.1};
  m.mutable_banks()[1].weights = {1, 0, -1, 2};
  m.mutable_banks()[1].bias = {-1};
  m.mutable_output_weights() = {0.2, -0.3, -0.4, 0.6};
  m.mutable_output_bias() = {0.05, -0.05};
  m.touch();
  EncodedQuestion x;
  x.rows = 4;
  x.dim = 2;
  x.true_length = 3;
  x.row_ids.assign(4, EmbeddingTable::kOov);
  x.matrix = {1, 2, 0, -1, 3, 1, 0, 0};
  // Worked by hand: window 1 pre-activations -1.4, 1.1, 0.6, 0.1 -> max 1.1;
  // window 2: -2, -2, 2 -> max 2. z0 = -0.33, z1 = 0.71.
  const double p1 = 1.0 / (1.0 + std::exp(-1.04));
  const auto cache = cnn::forward(m, x, false);
  const double err = std::max(std::abs(cache.probabilities[1] - p1), std::abs(cache.probabilities[0] - (1 - p1)));
  o.require(cache.pooled == std::vector<double>{1.1, 2.0}, "pooled features differ from (1.1, 2)");
  o.require(err < 1e-10, "probability error " + std::to_string(err));
  o.detail << "p(answered) = " << cache.probabilities[1] << ", expected " << p1 << ", |error| = " << err;
  return o;
}

Outcome auc_oracle() {
  Outcome o;
  std::mt19937_64 gen(7);
  double worst_rank = 0, worst_area = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + gen() % 49;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = gen() % 3 == 0 ? static_cast<double>(gen() % 5) : std::uniform_real_distribution<double>(0, 5)(gen);
      y[i] = static_cast<int>(gen() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    double credit = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (y[i] == 1 && y[j] == 0) {
          pairs += 1;
          credit += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
        }
    const double want = credit / pairs;
    worst_rank = std::max(worst_rank, std::abs(auc(s, y) - want));
    worst_area = std::max(worst_area, std::abs(trapezoid_area(roc_curve(s, y)) - want));
  }
  o.require(worst_rank <= 1e-12, "rank AUC off by " + std::to_string(worst_rank));
  o.require(worst_area <= 1e-12, "ROC area off by " + std::to_string(worst_area));
  const double example = auc(std::vector<double>{0.9, 0.8, 0.7, 0.6}, std::vector<int>{1, 0, 1, 0});
  o.require(example == 0.75, "worked example gave " + std::to_string(example));
  o.detail << (o.pass ? "" : " | ") << "1000 instances, max |rank - pairs| = " << worst_rank
           << ", max |area - pairs| = " << worst_area << ", worked example " << example;
  return o;
}

Outcome allocation() {
  Outcome o;
  const std::vector<NgramProfile> table{
      NgramProfile::from_counts({53253, 816091, 2070512, 2222226, 1557598}),
      NgramProfile::from_counts({13588391, 314843401, 977069902, 1313818354, 1176470663})};
  const FilterAllocation one = derive_allocation(table, 1, AllocationMode::Computed);
  const FilterAllocation five = derive_allocation(table, 5, AllocationMode::Computed);
  const std::map<std::size_t, std::size_t> want1{{1, 1}, {2, 20}, {3, 60}, {4, 60}, {5, 60}};
  const std::map<std::size_t, std::size_t> want5{{1, 5}, {2, 100}, {3, 300}, {4, 300}, {5, 300}};
  o.require(one.counts == want1, "x=1 allocation differs");
  o.require(five.counts == want5, "x=5 allocation differs");
  cnn::ModelConfig c;
  c.dim = 3;
  c.length = 8;
  c.window_sizes.clear();
  c.filters.clear();
  for (const auto& [n, f] : five.counts) {
    c.window_sizes.push_back(n);
    c.filters.push_back(f);
  }
  const cnn::Model m = cnn::init_model(c);
  o.require(c.pooled_dim() == 1005 && m.output_weights().size() == 2 * 1005, "pooled dimension is not 1005");
  auto fmt = [](const FilterAllocation& a) {
    std::string s;
    for (const auto& [n, f] : a.counts) s += (s.empty() ? "" : ",") + std::to_string(f);
    return "{" + s + "}";
  };
  o.detail << (o.pass ? "" : " | ") << "x=1 " << fmt(one) << ", x=5 " << fmt(five) << ", pooled " << c.pooled_dim();
  return o;
}

Outcome pipeline() {
  Outcome o;
  const json expected = json::parse(slurp(fixture("expected.json")));
  std::ifstream in(fixture("threads.jsonl"));
  const auto dump = read_thread_dump(in, "threads.jsonl");
  const IngestResult r = ingest(dump);

  o.require(r.kept_threads == expected.at("kept_threads").get<std::vector<std::string>>(), "kept threads differ");
  o.require(r.dropped_ama_request == expected.at("dropped_ama_request").get<std::size_t>(), "AMA-request drops differ");
  o.require(r.dropped_first_tier == expected.at("dropped_first_tier").get<std::size_t>(), "first-tier drops differ");
  o.require(r.quarantined_posts == expected.at("quarantined_posts").get<std::size_t>(), "quarantine count differs");

  const auto& want = expected.at("questions");
  o.require(r.questions.size() == want.size(), "question count " + std::to_string(r.questions.size()) + " vs " +
                                                   std::to_string(want.size()));
  for (std::size_t i = 0; i < std::min(r.questions.size(), want.size()); ++i) {
    const QuestionRecord& got = r.questions[i];
    const json& w = want[i];
    if (got.post_id != w.at("post_id") || got.thread_id != w.at("thread_id") || got.text != w.at("text") ||
        got.label != w.at("label").get<int>() || got.created_utc != w.at("created_utc").get<std::int64_t>())
      o.require(false, "question " + got.post_id + " differs from the sheet");
  }
  std::set<std::string> ids;
  for (const auto& qr : r.questions) ids.insert(qr.post_id);
  for (const char* key : {"excluded_active_period", "excluded_not_question", "excluded_host"})
    for (const auto& id : expected.at(key))
      if (ids.contains(id.get<std::string>())) o.require(false, std::string(key) + " " + id.get<std::string>() + " was kept");

  for (const auto& raw : dump) {
    const Thread t = parse_thread(raw);
    if (!expected.at("active_period").contains(t.id)) continue;
    const auto [a, b] = active_period(t);
    const auto w = expected.at("active_period").at(t.id).get<std::vector<std::int64_t>>();
    o.require(a == w[0] && b == w[1], "active period of " + t.id + " differs");
  }

  // Subtree labels are an option, checked against their own column.
  IngestOptions subtree;
  subtree.scope = ReplyScope::Subtree;
  const IngestResult rs = ingest(dump, subtree);
  for (std::size_t i = 0; i < std::min(rs.questions.size(), want.size()); ++i)
    if (rs.questions[i].label != want[i].at("label_subtree").get<int>())
      o.require(false, "subtree label of " + rs.questions[i].post_id + " differs");

  for (const auto& [year, ys] : expected.at("stats").items()) {
    const auto it = r.stats.years.find(std::stoi(year));
    if (it == r.stats.years.end()) {
      o.require(false, "no statistics for " + year);
      continue;
    }
    const YearStats& s = it->second;
    o.require(s.threads == ys.at("threads") && s.posts == ys.at("posts") && s.sentences == ys.at("sentences") &&
                  s.words == ys.at("words") && s.question_posts == ys.at("question_posts") &&
                  s.answered == ys.at("answered"),
              "statistics for " + year + " differ");
  }

  const fs::path dir = scratch("pipeline");
  const int a = cli("ingest --threads-file " + q(fixture("threads.jsonl")) + " --out " + q(dir / "a"));
  const int b = cli("ingest --threads-file " + q(fixture("threads.jsonl")) + " --out " + q(dir / "b") + " --workers 4");
  o.require(a == 0 && b == 0, "CLI ingest failed");
  std::size_t identical = 0;
  for (const char* f : {"questions.jsonl", "stats.csv", "ingest.json"}) {
    const bool same = slurp(dir / "a" / f) == slurp(dir / "b" / f) && !slurp(dir / "a" / f).empty();
    o.require(same, std::string(f) + " differs between runs");
    identical += same;
  }
  fs::remove_all(dir);
  o.detail << (o.pass ? "" : " | ") << r.kept_threads.size() << " threads kept, " << r.questions.size()
           << " questions match the sheet, " << identical << "/3 outputs byte-identical across runs";
  return o;
}

// Trains one system and returns the AUC of its scores on `eval`.
double train_and_eval(const SystemSpec& spec, const std::vector<QuestionRecord>& train,
                      const std::vector<QuestionRecord>& valid, const std::vector<QuestionRecord>& eval,
                      std::shared_ptr<const EmbeddingTable> table, std::uint64_t seed) {
  std::vector<int> labels;
  for (const auto& r : eval) labels.push_back(r.label);
  if (spec.system == System::LogReg) {
    const logreg::Model m = logreg::train_on_records(train, spec.logreg);
    return auc(logreg::predict(m, eval), labels);
  }
  cnn::ModelConfig c = spec.cnn_config;
  c.seed = seed;
  cnn::Model m = cnn::init_model(c, table);
  cnn::train(m, cnn::encode_records(m, train), cnn::encode_records(m, valid), spec.cnn_training);
  return auc(cnn::predict(m, cnn::encode_records(m, eval)), labels);
}

SystemSpec sanity_spec(System s, std::size_t dim) {
  json j{{"system", to_string(s)}, {"length", 20}, {"training", {{"max_epochs", 10}}}};
  return system_spec_from_json(j, dim);
}

Outcome learning() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  SyntheticOptions opt;
  opt.count = 2000;
  const SyntheticData data = make_synthetic(opt);
  SyntheticOptions held = opt;
  held.count = 500;
  const auto valid = synthetic_records(held, 1);
  for (System s : {System::ContextCnn, System::BaselineCnn, System::LogReg}) {
    const SystemSpec spec = sanity_spec(s, opt.dim);
    if (s == System::BaselineCnn)
      o.require(spec.cnn_config.window_sizes == std::vector<std::size_t>{3} &&
                    spec.cnn_config.filters == std::vector<std::size_t>{100},
                "baseline is not n=3 with 100 filters");
    const RunResult r = train_and_score(spec, data.records, valid, data.embeddings, 11);
    o.require(r.valid_auc > 0.95, to_string(s) + " reached only " + std::to_string(r.valid_auc));
    o.detail << (o.detail.tellp() > 0 ? ", " : "") << to_string(s) << " " << r.valid_auc;
  }

  // Permutation null: labels shuffled everywhere, scored on a fresh permuted set.
  auto train_null = data.records;
  auto valid_null = valid;
  SyntheticOptions big = opt;
  big.count = 2000;
  auto eval_null = synthetic_records(big, 2);
  permute_labels(train_null, 101);
  permute_labels(valid_null, 102);
  permute_labels(eval_null, 103);
  for (System s : {System::ContextCnn, System::BaselineCnn, System::LogReg}) {
    const double a = train_and_eval(sanity_spec(s, opt.dim), train_null, valid_null, eval_null, data.embeddings, 11);
    o.require(a > 0.45 && a < 0.55, to_string(s) + " permuted AUC " + std::to_string(a));
    o.detail << ", permuted " << to_string(s) << " " << a;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < 300, "took " + std::to_string(secs) + " s");
  o.detail << ", " << static_cast<int>(secs) << " s";
  return o;
}

Outcome class_weights() {
  Outcome o;
  SyntheticOptions opt;
  opt.count = 2000;
  opt.positive_fraction = 0.2;
  opt.cue_purity = 0.75;
  const SyntheticData data = make_synthetic(opt);
  SyntheticOptions held = opt;
  held.count = 500;
  const auto valid = synthetic_records(held, 1);
  const auto test = synthetic_records(held, 2);

  double mean_pos[2] = {0, 0};
  std::size_t batches = 0, exact = 0;
  for (int weighted = 0; weighted < 2; ++weighted) {
    cnn::ModelConfig c = cnn::ModelConfig::baseline(opt.dim, 20);
    c.seed = 5;
    c.weight_pos = weighted ? 4.0 : 1.0;
    c.weight_neg = 1.0;
    cnn::Model m = cnn::init_model(c, data.embeddings);
    const auto train_set = cnn::encode_records(m, data.records);
    cnn::TrainOptions t;
    t.max_epochs = 5;
    t.patience = 5;
    if (!weighted) {
      // Plain cross-entropy, summed in batch order, must equal the reported batch loss.
      t.on_batch = [&](const cnn::BatchRecord& b) {
        double plain = 0;
        for (std::size_t i = 0; i < b.examples.size(); ++i) {
          const int y = train_set[b.examples[i]].label;
          plain += -std::log(std::max(b.probabilities[i][y], 1e-12));
        }
        ++batches;
        exact += plain == b.loss;
      };
    }
    cnn::train(m, train_set, cnn::encode_records(m, valid), t);
    const auto p = cnn::predict(m, cnn::encode_records(m, test));
    std::size_t n = 0;
    for (std::size_t i = 0; i < test.size(); ++i)
      if (test[i].label == 1) {
        mean_pos[weighted] += p[i];
        ++n;
      }
    mean_pos[weighted] /= static_cast<double>(n);
  }
  o.require(mean_pos[1] > mean_pos[0], "weighting did not raise the positive mean");
  o.require(batches > 0 && exact == batches, std::to_string(batches - exact) + " batches differ from plain loss");
  o.detail << (o.pass ? "" : " | ") << "mean p(positive): weights (4,1) " << mean_pos[1] << " vs (1,1) "
           << mean_pos[0] << "; " << exact << "/" << batches << " batches equal the unweighted loss exactly";
  return o;
}

Outcome ngram_counts() {
  Outcome o;
  std::mt19937_64 gen(99);
  // Zipf-like draws over a small vocabulary so high thresholds still bite.
  std::vector<double> w;
  for (int i = 1; i <= 40; ++i) w.push_back(1.0 / i);
  std::discrete_distribution<int> word(w.begin(), w.end());
  std::vector<Sentence> corpus;
  std::size_t tokens = 0;
  while (tokens < 10000) {
    Sentence s;
    const std::size_t len = 1 + gen() % 15;
    for (std::size_t i = 0; i < len && tokens < 10000; ++i, ++tokens) s.push_back("w" + std::to_string(word(gen)));
    corpus.push_back(std::move(s));
  }
  NgramCounter single;
  single.add(corpus);
  const NgramCounter sharded = count_sharded(corpus, 7, 3);
  std::size_t cells = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    std::map<std::vector<std::string>, std::uint64_t> brute;
    for (const auto& s : corpus)
      for (std::size_t i = 0; i + n <= s.size(); ++i) ++brute[std::vector<std::string>(s.begin() + i, s.begin() + i + n)];
    o.require(single.table(n) == sharded.table(n), "order " + std::to_string(n) + " tables differ");
    for (std::uint64_t mc : {1, 2, 40}) {
      std::uint64_t want = 0;
      for (const auto& [_, c] : brute) want += c >= mc;
      const auto a = single.unique_count(n, mc);
      const auto b = sharded.unique_count(n, mc);
      const auto c = count_unique_ngrams(corpus, n, mc);
      if (a != want || b != want || c != want) {
        std::ostringstream what;
        what << "n=" << n << " min " << mc << ": brute " << want << ", single " << a << ", sharded " << b;
        o.require(false, what.str());
      }
      if (n == 1 && mc == 40) o.detail << "unigrams >= 40: " << want << "; ";
      if (n == 5 && mc == 2) o.detail << "5-grams >= 2: " << want << "; ";
      ++cells;
    }
  }
  o.detail << tokens << " tokens, " << cells << " (order, threshold) cells agree";
  return o;
}

Outcome end_to_end() {
  Outcome o;
  const fs::path dir = scratch("e2e");
  const std::string out = " --out " + q(dir);
  const std::string emb = " --embeddings " + q(fixture("embeddings.txt"));
  spit(dir / "cfg.json", R"({"length": 20, "training": {"max_epochs": 5}})");
  struct Step {
    std::string name, args;
  };
  const std::vector<Step> steps{
      {"ingest", "ingest --threads-file " + q(fixture("threads.jsonl")) + out},
      {"train", "train --config " + q(dir / "cfg.json") + " --seed 2" + emb + out},
      {"eval", "eval" + emb + out},
      {"predict", "predict --model " + q(dir / "model-0") + " --data " + q(dir / "questions.jsonl") + emb + out},
      {"pairs", "pairs --predictions " + q(dir / "predictions.csv") + out},
  };
  for (const auto& s : steps) {
    std::string log;
    const int code = cli(s.args, &log);
    o.require(code == 0, s.name + " exited " + std::to_string(code) + ": " + log.substr(0, 200));
    if (code != 0) break;
  }
  if (!o.pass) return o;
  const double model_agreement = json::parse(slurp(dir / "agreement.json")).at("agreement").get<double>();
  const double test_auc = json::parse(slurp(dir / "summary.json")).at("mean").get<double>();

  // Scorers with known agreement, fed through the same command.
  std::ifstream qin(dir / "questions.jsonl");
  const auto questions = read_question_jsonl(qin, "questions.jsonl");
  std::string perfect = "post_id,score\n", constant = "post_id,score\n";
  for (const auto& r : questions) {
    perfect += r.post_id + "," + (r.label ? "1" : "0") + "\n";
    constant += r.post_id + ",0.5\n";
  }
  spit(dir / "perfect.csv", perfect);
  spit(dir / "constant.csv", constant);
  double agreement[2] = {-1, -1};
  const char* names[2] = {"perfect.csv", "constant.csv"};
  for (int i = 0; i < 2; ++i) {
    const fs::path sub = dir / ("score-" + std::to_string(i));
    const int code = cli("pairs --questions " + q(dir / "questions.jsonl") + " --predictions " + q(dir / names[i]) +
                         " --out " + q(sub));
    o.require(code == 0, std::string("pairs with ") + names[i] + " failed");
    if (code == 0) agreement[i] = json::parse(slurp(sub / "agreement.json")).at("agreement").get<double>();
  }
  o.require(agreement[0] == 1.0, "perfect scorer agreement " + std::to_string(agreement[0]));
  o.require(agreement[1] == 0.5, "constant scorer agreement " + std::to_string(agreement[1]));
  fs::remove_all(dir);
  o.detail << (o.pass ? "" : " | ") << "all steps exit 0; test AUC " << test_auc << ", model agreement "
           << model_agreement << ", perfect scorer " << agreement[0] << ", constant scorer " << agreement[1];
  return o;
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"gradient correctness", gradients},  {"forward pass of the hand-computed model", tiny_model},
      {"AUC oracle", auc_oracle},           {"filter allocation", allocation},
      {"ingest pipeline fidelity", pipeline}, {"learning sanity", learning},
      {"class weighting", class_weights},   {"n-gram counting", ngram_counts},
      {"end-to-end CLI", end_to_end},
  };
  std::vector<std::size_t> pick;
  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > static_cast<int>(all.size())) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], all.size());
      return 2;
    }
    pick.push_back(static_cast<std::size_t>(n - 1));
  } else {
    for (std::size_t i = 0; i < all.size(); ++i) pick.push_back(i);
  }
  int failures = 0;
  for (std::size_t i : pick) {
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].title, o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}

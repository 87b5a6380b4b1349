#include "amaq/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "amaq/error.hpp"
#include "amaq/text.hpp"

namespace amaq::logreg {

const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've",
      "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
      "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself", "they", "them",
      "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that", "that'll",
      "these", "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has",
      "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
      "because", "as", "until", "while", "of", "at", "by", "for", "with", "about", "against",
      "between", "into", "through", "during", "before", "after", "above", "below", "to", "from",
      "up", "down", "in", "out", "on", "off", "over", "under", "again", "further", "then", "once",
      "here", "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
      "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
      "too", "very", "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now",
      "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't", "didn",
      "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn",
      "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
      "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn",
      "wouldn't"};
  return words;
}

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (!index_.emplace(words_[i], i).second)
      fail(ErrorCode::InvalidArgument, "duplicate vocabulary word '" + words_[i] + "'");
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> documents,
                             const std::unordered_set<std::string>& stopwords,
                             std::size_t min_document_frequency) {
  std::map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::set<std::string> seen;
    for (const auto& tok : doc) {
      std::string w = ascii_lower(tok);
      if (stopwords.contains(w)) continue;
      seen.insert(std::move(w));
    }
    for (const auto& w : seen) ++df[w];
  }
  std::vector<std::string> words;
  for (const auto& [w, n] : df)
    if (n >= min_document_frequency) words.push_back(w);
  return Vocabulary(std::move(words));
}

std::ptrdiff_t Vocabulary::index_of(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

double BowVector::value(std::size_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](const auto& e, std::size_t i) { return e.first < i; });
  return it != entries.end() && it->first == index ? it->second : 0.0;
}

BowVector featurize(std::span<const std::string> tokens, const Vocabulary& vocabulary,
                    const std::unordered_set<std::string>& stopwords, bool binary) {
  std::map<std::size_t, double> counts;
  for (const auto& tok : tokens) {
    const std::string w = ascii_lower(tok);
    if (stopwords.contains(w)) continue;
    const std::ptrdiff_t idx = vocabulary.index_of(w);
    if (idx < 0) continue;
    double& c = counts[static_cast<std::size_t>(idx)];
    c = binary ? 1.0 : c + 1.0;
  }
  BowVector v;
  v.entries.assign(counts.begin(), counts.end());
  return v;
}

namespace {

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double margin(std::span<const double> w, double b, const BowVector& x) {
  double z = b;
  for (const auto& [i, v] : x.entries) z += w[i] * v;
  return z;
}

double objective_at(std::span<const double> w, double b, double lambda,
                    std::span<const BowVector> data, std::span<const int> labels) {
  double loss = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double s = labels[i] == 1 ? 1.0 : -1.0;
    loss += softplus_neg(s * margin(w, b, data[i]));
  }
  double reg = 0;
  for (double v : w) reg += v * v;
  return loss / static_cast<double>(data.size()) + 0.5 * lambda * reg;
}

// Gradient for weights (size V) followed by the intercept.
std::vector<double> gradient_at(std::span<const double> w, double b, double lambda,
                                std::span<const BowVector> data, std::span<const int> labels) {
  std::vector<double> g(w.size() + 1, 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = (sigmoid(margin(w, b, data[i])) - (labels[i] == 1 ? 1.0 : 0.0)) * inv_n;
    for (const auto& [j, v] : data[i].entries) g[j] += r * v;
    g.back() += r;
  }
  for (std::size_t j = 0; j < w.size(); ++j) g[j] += lambda * w[j];
  return g;
}

double inf_norm(std::span<const double> v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double objective(const Model& model, std::span<const BowVector> data, std::span<const int> labels) {
  return objective_at(model.weights, model.intercept, model.lambda, data, labels);
}

Model train(std::span<const BowVector> data, std::span<const int> labels, std::size_t features,
            const Options& options, TrainReport* report) {
  if (data.size() != labels.size()) fail(ErrorCode::Shape, "data and labels differ in length");
  std::size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) fail(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  if (pos == 0 || pos == labels.size())
    fail(ErrorCode::InvalidArgument, "logistic regression needs examples of both classes");
  if (!(options.lambda >= 0.0)) fail(ErrorCode::InvalidArgument, "lambda must be >= 0");
  for (const auto& x : data)
    for (const auto& [j, _] : x.entries)
      if (j >= features) fail(ErrorCode::Shape, "feature index out of range");

  std::vector<double> w(features, 0.0);
  double b = 0;
  double f = objective_at(w, b, options.lambda, data, labels);
  std::vector<double> g = gradient_at(w, b, options.lambda, data, labels);
  TrainReport rep;
  rep.objectives.push_back(f);

  // Armijo backtracking. The trial step starts at twice the last accepted one.
  double step = 1.0;
  std::vector<double> w_new(features);
  std::size_t it = 0;
  for (; it < options.max_iterations && inf_norm(g) >= options.tolerance; ++it) {
    double g2 = 0;
    for (double v : g) g2 += v * v;
    step = std::min(step * 2.0, 1e6);
    double f_new = 0;
    double b_new = 0;
    while (true) {
      for (std::size_t j = 0; j < features; ++j) w_new[j] = w[j] - step * g[j];
      b_new = b - step * g.back();
      f_new = objective_at(w_new, b_new, options.lambda, data, labels);
      if (f_new <= f - 1e-4 * step * g2) break;
      step *= 0.5;
      if (step < 1e-20) break;
    }
    if (step < 1e-20 || !(f_new <= f)) break;  // no further progress possible
    w.swap(w_new);
    b = b_new;
    f = f_new;
    g = gradient_at(w, b, options.lambda, data, labels);
    rep.objectives.push_back(f);
  }
  rep.iterations = it;
  rep.gradient_norm = inf_norm(g);
  rep.converged = rep.gradient_norm < options.tolerance;
  if (report) *report = std::move(rep);

  Model m;
  m.weights = std::move(w);
  m.intercept = b;
  m.lambda = options.lambda;
  m.binary = options.binary;
  return m;
}

Model train_on_records(const std::vector<QuestionRecord>& records, const Options& options,
                       TrainReport* report) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(records.size());
  for (const auto& r : records) docs.push_back(r.tokens);
  Vocabulary vocab = Vocabulary::build(docs, default_stopwords(), options.min_document_frequency);
  std::vector<BowVector> data;
  std::vector<int> labels;
  for (const auto& r : records) {
    data.push_back(featurize(r.tokens, vocab, default_stopwords(), options.binary));
    labels.push_back(r.label);
  }
  Model m = train(data, labels, vocab.size(), options, report);
  m.vocabulary = std::move(vocab);
  return m;
}

double predict(const Model& model, const BowVector& x) {
  return sigmoid(margin(model.weights, model.intercept, x));
}

double predict(const Model& model, std::span<const std::string> tokens) {
  return predict(model, featurize(tokens, model.vocabulary, default_stopwords(), model.binary));
}

std::vector<double> predict(const Model& model, const std::vector<QuestionRecord>& records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(predict(model, std::span<const std::string>(r.tokens)));
  return out;
}

Checkpoint to_checkpoint(const Model& model) {
  Checkpoint ck;
  ck.kind = "logreg";
  ck.config = nlohmann::json{{"lambda", model.lambda}, {"binary", model.binary}};
  ck.extra["system"] = "logreg";
  ck.extra["vocabulary"] = model.vocabulary.words();
  ck.arrays.push_back({"weights", {model.weights.size()}, model.weights});
  ck.arrays.push_back({"intercept", {1}, {model.intercept}});
  return ck;
}

Model from_checkpoint(const Checkpoint& ck) {
  if (ck.kind != "logreg")
    fail(ErrorCode::InvalidArgument, "checkpoint kind is '" + ck.kind + "', not logreg");
  Model m;
  try {
    m.lambda = ck.config.at("lambda").get<double>();
    m.binary = ck.config.at("binary").get<bool>();
    m.vocabulary = Vocabulary(ck.extra.at("vocabulary").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("logreg checkpoint: ") + e.what());
  }
  m.weights = ck.array("weights").values;
  m.intercept = ck.array("intercept").values.at(0);
  if (m.weights.size() != m.vocabulary.size())
    fail(ErrorCode::Shape, "logreg checkpoint weights do not match its vocabulary");
  return m;
}

}  // namespace amaq::logreg

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>

#include "amaq/checkpoint.hpp"
#include "amaq/error.hpp"
#include "amaq/logreg.hpp"
#include "amaq/synthetic.hpp"
#include "test_support.hpp"

using namespace amaq;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<EmbeddingTable> small_table() {
  SyntheticOptions o;
  o.dim = 5;
  return synthetic_embeddings(o);
}

cnn::Model small_model(bool trainable) {
  cnn::ModelConfig c;
  c.window_sizes = {1, 3};
  c.filters = {4, 2};
  c.dim = 5;
  c.length = 9;
  c.seed = 77;
  c.embeddings_trainable = trainable;
  c.activation = cnn::Activation::Tanh;
  return cnn::init_model(c, small_table());
}

std::vector<double> scores(const cnn::Model& m) {
  SyntheticOptions o;
  o.dim = 5;
  o.count = 25;
  return cnn::predict(m, cnn::encode_records(m, synthetic_records(o, 3)));
}

}  // namespace

TEST_CASE("CNN round trip is bit-exact") {
  test::TempDir dir("ckpt");
  const cnn::Model m = small_model(false);
  save_checkpoint(to_checkpoint(m, "context-cnn"), dir / "m");
  CHECK(fs::exists(dir / "m.json"));
  CHECK(fs::file_size(dir / "m.bin") == 8 * (5 * 4 + 4 + 3 * 5 * 2 + 2 + 2 * 6 + 2));

  const Checkpoint ck = load_checkpoint(dir / "m");
  CHECK(ck.kind == "cnn");
  CHECK(ck.seed == 77);
  CHECK(ck.extra.at("system") == "context-cnn");
  const cnn::Model back = cnn_from_checkpoint(ck, small_table());
  const auto a = m.parameters();
  const auto b = back.parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::equal(a[i].begin(), a[i].end(), b[i].begin(), b[i].end()));
  CHECK(scores(m) == scores(back));

  // Saving again gives identical bytes.
  save_checkpoint(to_checkpoint(back, "context-cnn"), dir / "again");
  CHECK(test::slurp(dir / "m.json") == test::slurp(dir / "again.json"));
  CHECK(test::slurp(dir / "m.bin") == test::slurp(dir / "again.bin"));

  CHECK_THROWS_AS(cnn_from_checkpoint(ck, nullptr), Error);
}

TEST_CASE("trainable embeddings travel with the checkpoint") {
  test::TempDir dir("ckpt");
  cnn::Model m = small_model(true);
  m.mutable_embeddings()->mutable_row(3)[1] = 42.0;
  m.touch();
  save_checkpoint(to_checkpoint(m), dir / "t");
  const cnn::Model back = cnn_from_checkpoint(load_checkpoint(dir / "t"), nullptr);
  CHECK(back.embeddings()->row(3)[1] == 42.0);
  CHECK(scores(m) == scores(back));
}

TEST_CASE("logreg round trip") {
  test::TempDir dir("ckpt");
  logreg::Model m;
  m.vocabulary = logreg::Vocabulary({"bees", "honey"});
  m.weights = {0.1234567890123, -3.5};
  m.intercept = 1.0 / 3.0;
  m.lambda = 0.5;
  m.binary = true;
  save_checkpoint(logreg::to_checkpoint(m), dir / "lr");
  const logreg::Model back = logreg::from_checkpoint(load_checkpoint(dir / "lr"));
  CHECK(back.weights == m.weights);
  CHECK(back.intercept == m.intercept);
  CHECK(back.lambda == 0.5);
  CHECK(back.binary);
  CHECK(back.vocabulary.words() == m.vocabulary.words());
  CHECK_THROWS_AS(cnn_from_checkpoint(load_checkpoint(dir / "lr"), small_table()), Error);
}

TEST_CASE("damaged checkpoints are rejected") {
  test::TempDir dir("ckpt");
  const cnn::Model m = small_model(false);
  save_checkpoint(to_checkpoint(m), dir / "m");
  const std::string bin = test::slurp(dir / "m.bin");
  const std::string manifest = test::slurp(dir / "m.json");

  auto code_of = [&](const fs::path& base) {
    try {
      cnn_from_checkpoint(load_checkpoint(base), small_table());
    } catch (const Error& e) {
      return std::optional<ErrorCode>(e.code());
    }
    return std::optional<ErrorCode>();
  };

  test::spit(dir / "m.bin", bin.substr(0, bin.size() - 8));
  CHECK(code_of(dir / "m") == ErrorCode::Parse);
  test::spit(dir / "m.bin", bin + "x");
  CHECK(code_of(dir / "m") == ErrorCode::Parse);
  test::spit(dir / "m.bin", bin);
  test::spit(dir / "m.json", manifest.substr(0, manifest.size() / 2));
  CHECK(code_of(dir / "m") == ErrorCode::Parse);
  test::spit(dir / "m.json", "{\"format\": \"something-else\"}");
  CHECK(code_of(dir / "m") == ErrorCode::Parse);
  CHECK(code_of(dir / "nothing") == ErrorCode::Io);

  // A model of a different shape does not load into the wrong arrays.
  test::spit(dir / "m.json", manifest);
  Checkpoint ck = load_checkpoint(dir / "m");
  ck.arrays.pop_back();
  CHECK_THROWS_AS(cnn_from_checkpoint(ck, small_table()), Error);
}

#include "amaq/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>

#include "amaq/error.hpp"

namespace amaq {

using nlohmann::json;

namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void put_le(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open checkpoint manifest " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

}  // namespace

const NamedArray& Checkpoint::array(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  fail(ErrorCode::Parse, "checkpoint has no array '" + name + "'");
}

std::filesystem::path manifest_path(const std::filesystem::path& base) {
  auto p = base;
  p += ".json";
  return p;
}

std::filesystem::path data_path(const std::filesystem::path& base) {
  auto p = base;
  p += ".bin";
  return p;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& base) {
  json manifest;
  manifest["format"] = "amaq-checkpoint";
  manifest["format_version"] = kCheckpointFormatVersion;
  manifest["kind"] = ck.kind;
  manifest["seed"] = ck.seed;
  manifest["config"] = ck.config;
  manifest["extra"] = ck.extra;
  json arrays = json::array();
  std::string blob;
  for (const auto& a : ck.arrays) {
    if (element_count(a.shape) != a.values.size())
      fail(ErrorCode::Shape, "array '" + a.name + "' shape does not match its size");
    arrays.push_back(json{{"name", a.name}, {"shape", a.shape}});
    for (double v : a.values) put_le(blob, v);
  }
  manifest["arrays"] = arrays;

  const std::string text = manifest.dump(2) + "\n";
  std::ofstream m(manifest_path(base), std::ios::binary | std::ios::trunc);
  std::ofstream d(data_path(base), std::ios::binary | std::ios::trunc);
  if (!m || !d) fail(ErrorCode::Io, "cannot write checkpoint " + base.string());
  m.write(text.data(), static_cast<std::streamsize>(text.size()));
  d.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!m || !d) fail(ErrorCode::Io, "short write for checkpoint " + base.string());
}

json read_manifest(const std::filesystem::path& base) {
  json manifest = read_json_file(manifest_path(base));
  if (!manifest.is_object() || manifest.value("format", "") != "amaq-checkpoint")
    fail(ErrorCode::Parse, manifest_path(base).string() + ": not a checkpoint manifest");
  if (manifest.value("format_version", 0) != kCheckpointFormatVersion)
    fail(ErrorCode::Parse, manifest_path(base).string() + ": unsupported format version");
  return manifest;
}

Checkpoint load_checkpoint(const std::filesystem::path& base) {
  const json manifest = read_manifest(base);
  Checkpoint ck;
  std::ifstream d(data_path(base), std::ios::binary);
  if (!d) fail(ErrorCode::Io, "cannot open checkpoint data " + data_path(base).string());
  const std::string blob((std::istreambuf_iterator<char>(d)), std::istreambuf_iterator<char>());
  try {
    ck.kind = manifest.at("kind").get<std::string>();
    ck.seed = manifest.at("seed").get<std::uint64_t>();
    ck.config = manifest.at("config");
    ck.extra = manifest.value("extra", json::object());
    std::size_t offset = 0;
    for (const auto& a : manifest.at("arrays")) {
      NamedArray arr;
      arr.name = a.at("name").get<std::string>();
      arr.shape = a.at("shape").get<std::vector<std::size_t>>();
      const std::size_t n = element_count(arr.shape);
      if (offset + 8 * n > blob.size())
        fail(ErrorCode::Parse, data_path(base).string() + ": truncated at array '" + arr.name + "'");
      arr.values.resize(n);
      const auto* p = reinterpret_cast<const unsigned char*>(blob.data()) + offset;
      for (std::size_t i = 0; i < n; ++i) arr.values[i] = get_le(p + 8 * i);
      offset += 8 * n;
      ck.arrays.push_back(std::move(arr));
    }
    if (offset != blob.size())
      fail(ErrorCode::Parse, data_path(base).string() + ": trailing bytes after last array");
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, manifest_path(base).string() + ": " + e.what());
  }
  return ck;
}

Checkpoint to_checkpoint(const cnn::Model& model, const std::string& system) {
  Checkpoint ck;
  ck.kind = "cnn";
  ck.seed = model.config().seed;
  ck.config = cnn::config_to_json(model.config());
  ck.extra["system"] = system;
  const auto names = model.parameter_names();
  const auto shapes = model.parameter_shapes();
  const auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i)
    ck.arrays.push_back({names[i], shapes[i], {params[i].begin(), params[i].end()}});
  if (model.config().embeddings_trainable && model.embeddings())
    ck.extra["vocabulary"] = model.embeddings()->words();
  return ck;
}

cnn::Model cnn_from_checkpoint(const Checkpoint& ck, std::shared_ptr<const EmbeddingTable> table) {
  if (ck.kind != "cnn") fail(ErrorCode::InvalidArgument, "checkpoint kind is '" + ck.kind + "', not cnn");
  const cnn::ModelConfig config = cnn::config_from_json(ck.config);
  if (config.embeddings_trainable) {
    // The fine-tuned table lives in the checkpoint.
    const NamedArray& emb = ck.array("embeddings");
    const auto words = ck.extra.at("vocabulary").get<std::vector<std::string>>();
    if (emb.shape.size() != 2 || emb.shape[0] != words.size() || emb.shape[1] != config.dim)
      fail(ErrorCode::Shape, "checkpoint embedding table has the wrong shape");
    auto stored = std::make_shared<EmbeddingTable>(config.dim);
    for (std::size_t i = 0; i < words.size(); ++i)
      stored->add(words[i], std::span<const double>(emb.values.data() + i * config.dim, config.dim));
    table = stored;
  } else if (!table) {
    fail(ErrorCode::InvalidArgument, "an embedding table is required to load this model");
  }
  cnn::Model model = cnn::make_model(config, table);
  const auto names = model.parameter_names();
  const auto shapes = model.parameter_shapes();
  auto params = model.parameters();
  if (ck.arrays.size() != params.size())
    fail(ErrorCode::Shape, "checkpoint holds " + std::to_string(ck.arrays.size()) +
                               " arrays, model expects " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const NamedArray& a = ck.arrays[i];
    if (a.name != names[i] || a.shape != shapes[i])
      fail(ErrorCode::Shape, "checkpoint array " + std::to_string(i) + " ('" + a.name +
                                 "') does not match expected '" + names[i] + "'");
    std::copy(a.values.begin(), a.values.end(), params[i].begin());
  }
  model.touch();
  return model;
}

}  // namespace amaq

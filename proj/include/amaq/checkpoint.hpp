#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "amaq/cnn.hpp"

namespace amaq {

inline constexpr int kCheckpointFormatVersion = 1;

struct NamedArray {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

/// On disk a checkpoint is `<base>.json` (manifest: kind, format version,
/// seed, config, array names and shapes, extra metadata) plus `<base>.bin`
/// (the arrays as little-endian IEEE-754 doubles, concatenated in manifest
/// order).
struct Checkpoint {
  std::string kind;  // "cnn" or "logreg"
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();
  std::vector<NamedArray> arrays;

  const NamedArray& array(const std::string& name) const;
};

std::filesystem::path manifest_path(const std::filesystem::path& base);
std::filesystem::path data_path(const std::filesystem::path& base);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& base);
Checkpoint load_checkpoint(const std::filesystem::path& base);

/// Reads only the manifest, e.g. to dispatch on `kind`.
nlohmann::json read_manifest(const std::filesystem::path& base);

Checkpoint to_checkpoint(const cnn::Model& model, const std::string& system = "cnn");

/// Rebuilds a CNN. A table is required unless the checkpoint stores
/// trainable embeddings.
cnn::Model cnn_from_checkpoint(const Checkpoint& checkpoint,
                               std::shared_ptr<const EmbeddingTable> table);

}  // namespace amaq

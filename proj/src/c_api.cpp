#include "amaq/amaq.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>

#include <json.hpp>

#include "amaq/checkpoint.hpp"
#include "amaq/cnn.hpp"
#include "amaq/corpus.hpp"
#include "amaq/embeddings.hpp"
#include "amaq/error.hpp"
#include "amaq/experiments.hpp"
#include "amaq/logreg.hpp"
#include "amaq/metrics.hpp"
#include "amaq/ngram.hpp"
#include "amaq/rng.hpp"
#include "amaq/text.hpp"

using nlohmann::json;

struct amaq_embeddings {
  std::shared_ptr<const amaq::EmbeddingTable> table;
};

struct amaq_dataset {
  std::vector<amaq::QuestionRecord> records;
};

struct amaq_pairs {
  std::vector<amaq::QuestionPair> pairs;
};

struct amaq_model {
  std::string system;
  std::variant<amaq::cnn::Model, amaq::logreg::Model> model;
};

namespace {

thread_local std::string g_last_error;

amaq_status to_status(amaq::ErrorCode code) {
  switch (code) {
    case amaq::ErrorCode::InvalidArgument:
      return AMAQ_ERR_INVALID_ARGUMENT;
    case amaq::ErrorCode::Io:
      return AMAQ_ERR_IO;
    case amaq::ErrorCode::Parse:
      return AMAQ_ERR_PARSE;
    case amaq::ErrorCode::Shape:
      return AMAQ_ERR_SHAPE;
    case amaq::ErrorCode::Training:
      return AMAQ_ERR_TRAINING;
    case amaq::ErrorCode::State:
      return AMAQ_ERR_STATE;
  }
  return AMAQ_ERR_INTERNAL;
}

template <typename Fn>
amaq_status guard(Fn&& fn) {
  try {
    fn();
    return AMAQ_OK;
  } catch (const amaq::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return AMAQ_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AMAQ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AMAQ_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) amaq::fail(amaq::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void set_string(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

std::ifstream open_in(const char* path) {
  require(path, "path");
  std::ifstream in(path, std::ios::binary);
  if (!in) amaq::fail(amaq::ErrorCode::Io, std::string("cannot open ") + path);
  return in;
}

std::ofstream open_out(const char* path) {
  require(path, "path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) amaq::fail(amaq::ErrorCode::Io, std::string("cannot write ") + path);
  return out;
}

json parse_config(const char* config_json) {
  if (!config_json || !*config_json) return json::object();
  try {
    return json::parse(config_json);
  } catch (const json::parse_error& e) {
    amaq::fail(amaq::ErrorCode::Parse, std::string("configuration JSON: ") + e.what());
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

extern "C" {

const char* amaq_version(void) { return "0.1.0"; }

const char* amaq_last_error(void) { return g_last_error.c_str(); }

const char* amaq_status_name(amaq_status status) {
  switch (status) {
    case AMAQ_OK:
      return "ok";
    case AMAQ_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case AMAQ_ERR_IO:
      return "i/o error";
    case AMAQ_ERR_PARSE:
      return "parse error";
    case AMAQ_ERR_SHAPE:
      return "shape mismatch";
    case AMAQ_ERR_TRAINING:
      return "training failed";
    case AMAQ_ERR_STATE:
      return "invalid state";
    case AMAQ_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown";
}

void amaq_string_free(char* s) { std::free(s); }

uint64_t amaq_run_seed(uint64_t base, size_t run) { return amaq::run_seed(base, run); }

// ---- text

amaq_status amaq_tokenize(const char* text, char** tokens_json) {
  return guard([&] {
    require(text, "text");
    require(tokens_json, "tokens_json");
    *tokens_json = dup_string(json(amaq::tokenize(text).tokens).dump());
  });
}

int amaq_is_single_question(const char* text) {
  return text && amaq::is_single_question(text) ? 1 : 0;
}

// ---- embeddings

amaq_status amaq_embeddings_load(const char* path, amaq_embeddings** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    auto table = std::make_shared<amaq::EmbeddingTable>(amaq::EmbeddingTable::load(path));
    *out = new amaq_embeddings{std::move(table)};
  });
}

void amaq_embeddings_free(amaq_embeddings* table) { delete table; }

size_t amaq_embeddings_dimension(const amaq_embeddings* table) {
  return table ? table->table->dimension() : 0;
}

size_t amaq_embeddings_size(const amaq_embeddings* table) { return table ? table->table->size() : 0; }

amaq_status amaq_embeddings_lookup(const amaq_embeddings* table, const char* word, double* out,
                                   size_t out_len) {
  return guard([&] {
    require(table, "table");
    require(word, "word");
    require(out, "out");
    const auto v = table->table->lookup(word);
    if (out_len != v.size())
      amaq::fail(amaq::ErrorCode::Shape, "output buffer length " + std::to_string(out_len) +
                                             " does not match dimension " + std::to_string(v.size()));
    std::copy(v.begin(), v.end(), out);
  });
}

// ---- datasets

amaq_status amaq_dataset_load(const char* jsonl_path, amaq_dataset** out) {
  return guard([&] {
    require(out, "out");
    auto in = open_in(jsonl_path);
    *out = new amaq_dataset{amaq::read_question_jsonl(in, jsonl_path)};
  });
}

amaq_status amaq_dataset_save(const amaq_dataset* data, const char* jsonl_path) {
  return guard([&] {
    require(data, "data");
    auto out = open_out(jsonl_path);
    amaq::write_question_jsonl(out, data->records);
    if (!out) amaq::fail(amaq::ErrorCode::Io, std::string("short write to ") + jsonl_path);
  });
}

void amaq_dataset_free(amaq_dataset* data) { delete data; }

size_t amaq_dataset_size(const amaq_dataset* data) { return data ? data->records.size() : 0; }

amaq_status amaq_dataset_label(const amaq_dataset* data, size_t index, int* out) {
  return guard([&] {
    require(data, "data");
    require(out, "out");
    if (index >= data->records.size()) amaq::fail(amaq::ErrorCode::InvalidArgument, "index out of range");
    *out = data->records[index].label;
  });
}

amaq_status amaq_dataset_post_id(const amaq_dataset* data, size_t index, const char** out) {
  return guard([&] {
    require(data, "data");
    require(out, "out");
    if (index >= data->records.size()) amaq::fail(amaq::ErrorCode::InvalidArgument, "index out of range");
    *out = data->records[index].post_id.c_str();
  });
}

amaq_status amaq_dataset_split(const amaq_dataset* data, size_t train_size, size_t valid_size,
                               size_t test_size, uint64_t seed, amaq_dataset** train_out,
                               amaq_dataset** valid_out, amaq_dataset** test_out) {
  return guard([&] {
    require(data, "data");
    require(train_out, "train_out");
    require(valid_out, "valid_out");
    require(test_out, "test_out");
    amaq::Splits s = amaq::split_dataset(data->records, train_size, valid_size, test_size, seed);
    auto tr = std::make_unique<amaq_dataset>(amaq_dataset{std::move(s.train)});
    auto va = std::make_unique<amaq_dataset>(amaq_dataset{std::move(s.valid)});
    auto te = std::make_unique<amaq_dataset>(amaq_dataset{std::move(s.test)});
    *train_out = tr.release();
    *valid_out = va.release();
    *test_out = te.release();
  });
}

// ---- ingest

void amaq_ingest_options_init(amaq_ingest_options* options) {
  if (!options) return;
  options->min_first_tier = 100;
  options->reply_scope_subtree = 0;
  options->workers = 1;
}

amaq_status amaq_ingest_file(const char* threads_path, const amaq_ingest_options* options,
                             amaq_dataset** questions, char** stats_csv, char** summary_json) {
  return guard([&] {
    require(questions, "questions");
    amaq::IngestOptions opts;
    if (options) {
      opts.min_first_tier = options->min_first_tier;
      opts.scope = options->reply_scope_subtree ? amaq::ReplyScope::Subtree
                                                : amaq::ReplyScope::DirectChildren;
      opts.workers = options->workers;
    }
    auto in = open_in(threads_path);
    const auto dump = amaq::read_thread_dump(in, threads_path);
    amaq::IngestResult result = amaq::ingest(dump, opts);

    std::size_t answered = 0;
    for (const auto& q : result.questions) answered += static_cast<std::size_t>(q.label);
    nlohmann::ordered_json summary;
    summary["threads_total"] = result.threads_total;
    summary["threads_kept"] = result.kept_threads.size();
    summary["dropped_first_tier"] = result.dropped_first_tier;
    summary["dropped_ama_request"] = result.dropped_ama_request;
    summary["quarantined_posts"] = result.quarantined_posts;
    summary["questions"] = result.questions.size();
    summary["answered"] = answered;
    summary["percent_answered"] =
        result.questions.empty() ? 0.0
                                 : 100.0 * static_cast<double>(answered) /
                                       static_cast<double>(result.questions.size());
    summary["kept_threads"] = result.kept_threads;

    std::ostringstream stats;
    amaq::write_stats_csv(stats, result.stats);
    set_string(stats_csv, stats.str());
    set_string(summary_json, summary.dump(2) + "\n");
    *questions = new amaq_dataset{std::move(result.questions)};
  });
}

// ---- pairs

amaq_status amaq_pairs_build(const amaq_dataset* questions, amaq_pairs** out) {
  return guard([&] {
    require(questions, "questions");
    require(out, "out");
    *out = new amaq_pairs{amaq::build_all_pairs(questions->records)};
  });
}

amaq_status amaq_pairs_load(const char* jsonl_path, amaq_pairs** out) {
  return guard([&] {
    require(out, "out");
    auto in = open_in(jsonl_path);
    *out = new amaq_pairs{amaq::read_pairs_jsonl(in, jsonl_path)};
  });
}

amaq_status amaq_pairs_save(const amaq_pairs* pairs, const char* jsonl_path) {
  return guard([&] {
    require(pairs, "pairs");
    auto out = open_out(jsonl_path);
    amaq::write_pairs_jsonl(out, pairs->pairs);
    if (!out) amaq::fail(amaq::ErrorCode::Io, std::string("short write to ") + jsonl_path);
  });
}

void amaq_pairs_free(amaq_pairs* pairs) { delete pairs; }

size_t amaq_pairs_size(const amaq_pairs* pairs) { return pairs ? pairs->pairs.size() : 0; }

amaq_status amaq_pairs_agreement(const amaq_pairs* pairs, const char* const* post_ids,
                                 const double* scores, size_t n, double* out) {
  return guard([&] {
    require(pairs, "pairs");
    require(out, "out");
    if (n > 0) {
      require(post_ids, "post_ids");
      require(scores, "scores");
    }
    std::unordered_map<std::string, double> by_id;
    for (size_t i = 0; i < n; ++i) {
      require(post_ids[i], "post id");
      by_id[post_ids[i]] = scores[i];
    }
    *out = amaq::pairwise_agreement(by_id, pairs->pairs);
  });
}

// ---- n-grams

amaq_status amaq_ngram_profile(const char* corpus_path, amaq_corpus_format format,
                               const uint64_t min_counts[5], unsigned workers, char** profile_csv,
                               char** profile_json) {
  return guard([&] {
    require(min_counts, "min_counts");
    auto in = open_in(corpus_path);
    std::vector<amaq::Sentence> corpus;
    switch (format) {
      case AMAQ_CORPUS_TOKENIZED:
        corpus = amaq::read_tokenized_corpus(in);
        break;
      case AMAQ_CORPUS_RAW:
        corpus = amaq::read_raw_corpus(in);
        break;
      case AMAQ_CORPUS_QUESTIONS:
        for (auto& r : amaq::read_question_jsonl(in, corpus_path)) corpus.push_back(std::move(r.tokens));
        break;
      default:
        amaq::fail(amaq::ErrorCode::InvalidArgument, "unknown corpus format");
    }
    if (corpus.empty()) amaq::fail(amaq::ErrorCode::InvalidArgument, "n-gram corpus is empty");
    std::array<std::uint64_t, amaq::kMaxNgramOrder> mins{};
    for (std::size_t i = 0; i < mins.size(); ++i) {
      if (min_counts[i] < 1) amaq::fail(amaq::ErrorCode::InvalidArgument, "min counts must be >= 1");
      mins[i] = min_counts[i];
    }
    const std::size_t shards = std::max<std::size_t>(1, workers);
    const amaq::NgramCounter counter = amaq::count_sharded(corpus, shards, workers);
    const amaq::NgramProfile profile = amaq::growth_profile(counter, mins);

    std::ostringstream csv;
    amaq::write_profile_csv(csv, profile);
    set_string(profile_csv, csv.str());
    nlohmann::ordered_json j;
    j["unique_counts"] = profile.unique_counts;
    j["min_counts"] = profile.min_counts;
    j["sentences"] = corpus.size();
    set_string(profile_json, j.dump(2) + "\n");
  });
}

amaq_status amaq_derive_allocation(const char* profiles_json, size_t x, int computed_mode,
                                   char** allocation_json) {
  return guard([&] {
    require(allocation_json, "allocation_json");
    std::vector<amaq::NgramProfile> profiles;
    if (profiles_json && *profiles_json) {
      json j = parse_config(profiles_json);
      if (!j.is_array()) j = json::array({j});
      for (const auto& p : j) {
        const auto counts = p.at("unique_counts").get<std::vector<std::uint64_t>>();
        if (counts.size() != amaq::kMaxNgramOrder)
          amaq::fail(amaq::ErrorCode::InvalidArgument, "unique_counts needs five values");
        std::array<std::uint64_t, amaq::kMaxNgramOrder> arr{};
        std::copy(counts.begin(), counts.end(), arr.begin());
        profiles.push_back(amaq::NgramProfile::from_counts(arr));
      }
    }
    const auto mode = computed_mode ? amaq::AllocationMode::Computed : amaq::AllocationMode::Paper;
    *allocation_json = dup_string(amaq::allocation_to_json(amaq::derive_allocation(profiles, x, mode), mode));
  });
}

// ---- models

amaq_status amaq_model_train(const char* config_json, const amaq_dataset* train,
                             const amaq_dataset* valid, const amaq_embeddings* embeddings,
                             amaq_model** out, char** history_csv) {
  return guard([&] {
    require(train, "train");
    require(out, "out");
    const json config = parse_config(config_json);
    const std::size_t dim = embeddings ? embeddings->table->dimension() : 1;
    const amaq::SystemSpec spec = amaq::system_spec_from_json(config, dim);
    const std::vector<amaq::QuestionRecord> none;
    const auto& valid_records = valid ? valid->records : none;
    std::ostringstream hist;

    auto handle = std::make_unique<amaq_model>();
    handle->system = amaq::to_string(spec.system);
    if (spec.system == amaq::System::LogReg) {
      amaq::logreg::TrainReport report;
      amaq::logreg::Model m = amaq::logreg::train_on_records(train->records, spec.logreg, &report);
      hist << "iterations,gradient_norm,objective,converged,valid_auc\n";
      double valid_auc = std::numeric_limits<double>::quiet_NaN();
      if (!valid_records.empty()) {
        std::vector<int> labels;
        for (const auto& r : valid_records) labels.push_back(r.label);
        valid_auc = amaq::auc(amaq::logreg::predict(m, valid_records), labels);
      }
      char buf[160];
      std::snprintf(buf, sizeof buf, "%zu,%.3e,%.10f,%d,", report.iterations, report.gradient_norm,
                    report.objectives.back(), report.converged ? 1 : 0);
      hist << buf << fmt(valid_auc) << '\n';
      handle->model = std::move(m);
    } else {
      require(embeddings, "embeddings");
      amaq::cnn::Model m = amaq::cnn::init_model(spec.cnn_config, embeddings->table);
      const auto tr = amaq::cnn::train(m, amaq::cnn::encode_records(m, train->records),
                                       amaq::cnn::encode_records(m, valid_records), spec.cnn_training);
      hist << "epoch,train_loss,valid_auc\n";
      char buf[96];
      for (const auto& e : tr.history) {
        std::snprintf(buf, sizeof buf, "%zu,%.10f,", e.epoch, e.train_loss);
        hist << buf << fmt(e.valid_auc) << '\n';
      }
      handle->model = std::move(m);
    }
    set_string(history_csv, hist.str());
    *out = handle.release();
  });
}

amaq_status amaq_resolve_config(const char* config_json, size_t dim, char** resolved_json) {
  return guard([&] {
    require(resolved_json, "resolved_json");
    json config = parse_config(config_json);
    json resolved = amaq::system_spec_to_json(amaq::system_spec_from_json(config, dim));
    for (const char* extra : {"grid", "curve"})
      if (config.contains(extra)) resolved[extra] = config[extra];
    *resolved_json = dup_string(resolved.dump(2) + "\n");
  });
}

amaq_status amaq_model_save(const amaq_model* model, const char* base_path) {
  return guard([&] {
    require(model, "model");
    require(base_path, "base_path");
    amaq::Checkpoint ck;
    if (const auto* m = std::get_if<amaq::cnn::Model>(&model->model))
      ck = amaq::to_checkpoint(*m, model->system);
    else
      ck = amaq::logreg::to_checkpoint(std::get<amaq::logreg::Model>(model->model));
    amaq::save_checkpoint(ck, base_path);
  });
}

amaq_status amaq_model_load(const char* base_path, const amaq_embeddings* embeddings, amaq_model** out) {
  return guard([&] {
    require(base_path, "base_path");
    require(out, "out");
    const amaq::Checkpoint ck = amaq::load_checkpoint(base_path);
    auto handle = std::make_unique<amaq_model>();
    handle->system = ck.extra.value("system", ck.kind);
    if (ck.kind == "logreg") {
      handle->model = amaq::logreg::from_checkpoint(ck);
    } else {
      handle->model = amaq::cnn_from_checkpoint(ck, embeddings ? embeddings->table : nullptr);
    }
    *out = handle.release();
  });
}

void amaq_model_free(amaq_model* model) { delete model; }

const char* amaq_model_system(const amaq_model* model) { return model ? model->system.c_str() : ""; }

amaq_status amaq_model_predict(const amaq_model* model, const amaq_dataset* data, double* scores, size_t n) {
  return guard([&] {
    require(model, "model");
    require(data, "data");
    if (n != data->records.size())
      amaq::fail(amaq::ErrorCode::Shape, "score buffer holds " + std::to_string(n) + " values for " +
                                             std::to_string(data->records.size()) + " records");
    if (n > 0) require(scores, "scores");
    std::vector<double> out;
    if (const auto* m = std::get_if<amaq::cnn::Model>(&model->model)) {
      const auto encoded = amaq::cnn::encode_records(*m, data->records);
      out = amaq::cnn::predict(*m, encoded);
    } else {
      out = amaq::logreg::predict(std::get<amaq::logreg::Model>(model->model), data->records);
    }
    std::copy(out.begin(), out.end(), scores);
  });
}

// ---- evaluation

amaq_status amaq_auc(const double* scores, const int* labels, size_t n, double* out) {
  return guard([&] {
    require(out, "out");
    if (n > 0) {
      require(scores, "scores");
      require(labels, "labels");
    }
    *out = amaq::auc({scores, n}, {labels, n});
  });
}

amaq_status amaq_roc_csv(const double* scores, const int* labels, size_t n, char** csv) {
  return guard([&] {
    require(csv, "csv");
    if (n > 0) {
      require(scores, "scores");
      require(labels, "labels");
    }
    std::ostringstream s;
    amaq::write_roc_csv(s, amaq::roc_curve({scores, n}, {labels, n}));
    *csv = dup_string(s.str());
  });
}

amaq_status amaq_run_grid(const char* config_json, const amaq_dataset* train, const amaq_dataset* valid,
                          const amaq_embeddings* embeddings, char** grid_csv) {
  return guard([&] {
    require(train, "train");
    require(valid, "valid");
    require(embeddings, "embeddings");
    require(grid_csv, "grid_csv");
    json config = parse_config(config_json);
    config["system"] = "baseline-cnn";
    const amaq::SystemSpec spec = amaq::system_spec_from_json(config, embeddings->table->dimension());
    const json g = config.value("grid", json::object());
    amaq::GridOptions opts;
    opts.window_sizes = g.value("window_sizes", opts.window_sizes);
    opts.filter_counts = g.value("filter_counts", opts.filter_counts);
    opts.runs = g.value("runs", opts.runs);
    opts.threads = g.value("threads", opts.threads);
    opts.seed = spec.cnn_config.seed;
    const auto cells = amaq::run_grid(spec, opts, train->records, valid->records, embeddings->table);
    std::ostringstream s;
    amaq::write_grid_csv(s, cells);
    *grid_csv = dup_string(s.str());
  });
}

amaq_status amaq_learning_curve(const char* config_json, const amaq_dataset* train,
                                const amaq_dataset* valid, const amaq_embeddings* embeddings,
                                char** curve_csv) {
  return guard([&] {
    require(train, "train");
    require(valid, "valid");
    require(curve_csv, "curve_csv");
    const json config = parse_config(config_json);
    const std::size_t dim = embeddings ? embeddings->table->dimension() : 1;
    const amaq::SystemSpec spec = amaq::system_spec_from_json(config, dim);
    if (spec.system != amaq::System::LogReg) require(embeddings, "embeddings");
    const json c = config.value("curve", json::object());
    amaq::CurveOptions opts;
    opts.sizes = c.value("sizes", opts.sizes);
    opts.runs = c.value("runs", opts.runs);
    opts.seed = spec.cnn_config.seed;
    const auto points = amaq::learning_curve(spec, opts, train->records, valid->records,
                                             embeddings ? embeddings->table : nullptr);
    std::ostringstream s;
    amaq::write_curve_csv(s, points);
    *curve_csv = dup_string(s.str());
  });
}

}  // extern "C"

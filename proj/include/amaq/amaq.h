/*
 * C interface to the amaq question-answerability library.
 *
 * Every object is an opaque handle created by an amaq_*_load / _build /
 * _train call and released with the matching amaq_*_free. Functions that
 * can fail return an amaq_status; on failure amaq_last_error() describes the
 * problem (the message is per thread and valid until the next failing call
 * on that thread). Strings returned through char** out-parameters are owned
 * by the caller and released with amaq_string_free.
 */
#ifndef AMAQ_AMAQ_H
#define AMAQ_AMAQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(AMAQ_BUILDING_LIBRARY)
#define AMAQ_API __attribute__((visibility("default")))
#else
#define AMAQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum amaq_status {
  AMAQ_OK = 0,
  AMAQ_ERR_INVALID_ARGUMENT = 1,
  AMAQ_ERR_IO = 2,
  AMAQ_ERR_PARSE = 3,
  AMAQ_ERR_SHAPE = 4,
  AMAQ_ERR_TRAINING = 5,
  AMAQ_ERR_STATE = 6,
  AMAQ_ERR_INTERNAL = 7
} amaq_status;

AMAQ_API const char* amaq_version(void);
AMAQ_API const char* amaq_last_error(void);
AMAQ_API const char* amaq_status_name(amaq_status status);
AMAQ_API void amaq_string_free(char* s);

/* Per-run seed derived from a base seed. */
AMAQ_API uint64_t amaq_run_seed(uint64_t base, size_t run);

/* ---- text -------------------------------------------------------------- */

/* JSON array of token strings. */
AMAQ_API amaq_status amaq_tokenize(const char* text, char** tokens_json);
/* 1 when text is a single sentence ending with '?', else 0. */
AMAQ_API int amaq_is_single_question(const char* text);

/* ---- embeddings ---------------------------------------------------------- */

typedef struct amaq_embeddings amaq_embeddings;

AMAQ_API amaq_status amaq_embeddings_load(const char* path, amaq_embeddings** out);
AMAQ_API void amaq_embeddings_free(amaq_embeddings* table);
AMAQ_API size_t amaq_embeddings_dimension(const amaq_embeddings* table);
AMAQ_API size_t amaq_embeddings_size(const amaq_embeddings* table);
/* Writes the vector for word (zeros when out of vocabulary); out_len must equal the dimension. */
AMAQ_API amaq_status amaq_embeddings_lookup(const amaq_embeddings* table, const char* word,
                                            double* out, size_t out_len);

/* ---- question datasets ----------------------------------------------------- */

typedef struct amaq_dataset amaq_dataset;

AMAQ_API amaq_status amaq_dataset_load(const char* jsonl_path, amaq_dataset** out);
AMAQ_API amaq_status amaq_dataset_save(const amaq_dataset* data, const char* jsonl_path);
AMAQ_API void amaq_dataset_free(amaq_dataset* data);
AMAQ_API size_t amaq_dataset_size(const amaq_dataset* data);
AMAQ_API amaq_status amaq_dataset_label(const amaq_dataset* data, size_t index, int* out);
/* Borrowed pointer, valid while the dataset lives. */
AMAQ_API amaq_status amaq_dataset_post_id(const amaq_dataset* data, size_t index, const char** out);
/* Temporally uniform disjoint splits; fails when the sizes exceed the data. */
AMAQ_API amaq_status amaq_dataset_split(const amaq_dataset* data, size_t train_size,
                                        size_t valid_size, size_t test_size, uint64_t seed,
                                        amaq_dataset** train_out, amaq_dataset** valid_out,
                                        amaq_dataset** test_out);

/* ---- ingest -------------------------------------------------------------- */

typedef struct amaq_ingest_options {
  size_t min_first_tier;   /* default 100 */
  int reply_scope_subtree; /* 0: host must reply directly (default); 1: anywhere below */
  unsigned workers;        /* default 1 */
} amaq_ingest_options;

AMAQ_API void amaq_ingest_options_init(amaq_ingest_options* options);

/* Reads a JSON-lines thread dump and produces the labeled questions, the
 * per-year statistics table (CSV) and a JSON summary of filter counts. */
AMAQ_API amaq_status amaq_ingest_file(const char* threads_path, const amaq_ingest_options* options,
                                      amaq_dataset** questions, char** stats_csv,
                                      char** summary_json);

/* ---- question pairs ---------------------------------------------------------- */

typedef struct amaq_pairs amaq_pairs;

AMAQ_API amaq_status amaq_pairs_build(const amaq_dataset* questions, amaq_pairs** out);
AMAQ_API amaq_status amaq_pairs_load(const char* jsonl_path, amaq_pairs** out);
AMAQ_API amaq_status amaq_pairs_save(const amaq_pairs* pairs, const char* jsonl_path);
AMAQ_API void amaq_pairs_free(amaq_pairs* pairs);
AMAQ_API size_t amaq_pairs_size(const amaq_pairs* pairs);
/* Fraction of pairs whose answered question outscores the unanswered one
 * (ties count 0.5). Scores are keyed by post id. */
AMAQ_API amaq_status amaq_pairs_agreement(const amaq_pairs* pairs, const char* const* post_ids,
                                          const double* scores, size_t n, double* out);

/* ---- n-gram statistics --------------------------------------------------------- */

typedef enum amaq_corpus_format {
  AMAQ_CORPUS_TOKENIZED = 0, /* one sentence per line, whitespace separated */
  AMAQ_CORPUS_RAW = 1,       /* one sentence per line, raw text */
  AMAQ_CORPUS_QUESTIONS = 2  /* questions.jsonl */
} amaq_corpus_format;

/* min_counts holds one threshold per order 1..5. profile_json carries the
 * unique counts and is accepted by amaq_derive_allocation. */
AMAQ_API amaq_status amaq_ngram_profile(const char* corpus_path, amaq_corpus_format format,
                                        const uint64_t min_counts[5], unsigned workers,
                                        char** profile_csv, char** profile_json);

/* profiles_json: one profile object or an array of them, each with
 * "unique_counts": [c1, ..., c5]. */
AMAQ_API amaq_status amaq_derive_allocation(const char* profiles_json, size_t x, int computed_mode,
                                            char** allocation_json);

/* ---- models -------------------------------------------------------------------- */

typedef struct amaq_model amaq_model;

/* config_json selects "system" (context-cnn, baseline-cnn, logreg) and its
 * hyperparameters; see README. embeddings may be NULL for logreg. valid
 * may be NULL. history_csv may be NULL. */
AMAQ_API amaq_status amaq_model_train(const char* config_json, const amaq_dataset* train,
                                      const amaq_dataset* valid, const amaq_embeddings* embeddings,
                                      amaq_model** out, char** history_csv);
/* The configuration with every default filled in, as training would use it. */
AMAQ_API amaq_status amaq_resolve_config(const char* config_json, size_t dim, char** resolved_json);
AMAQ_API amaq_status amaq_model_save(const amaq_model* model, const char* base_path);
AMAQ_API amaq_status amaq_model_load(const char* base_path, const amaq_embeddings* embeddings,
                                     amaq_model** out);
AMAQ_API void amaq_model_free(amaq_model* model);
/* Borrowed string: "context-cnn", "baseline-cnn" or "logreg". */
AMAQ_API const char* amaq_model_system(const amaq_model* model);
/* Probability of the answered class per record; n must equal the dataset size. */
AMAQ_API amaq_status amaq_model_predict(const amaq_model* model, const amaq_dataset* data,
                                        double* scores, size_t n);

/* ---- evaluation ---------------------------------------------------------------- */

AMAQ_API amaq_status amaq_auc(const double* scores, const int* labels, size_t n, double* out);
AMAQ_API amaq_status amaq_roc_csv(const double* scores, const int* labels, size_t n, char** csv);

/* Baseline-CNN window/filter grid; config_json as for training plus a
 * "grid" object {window_sizes, filter_counts, runs, threads}. */
AMAQ_API amaq_status amaq_run_grid(const char* config_json, const amaq_dataset* train,
                                   const amaq_dataset* valid, const amaq_embeddings* embeddings,
                                   char** grid_csv);

/* Training-size curve; config_json as for training plus a "curve" object
 * {sizes, runs}. */
AMAQ_API amaq_status amaq_learning_curve(const char* config_json, const amaq_dataset* train,
                                         const amaq_dataset* valid,
                                         const amaq_embeddings* embeddings, char** curve_csv);

#ifdef __cplusplus
}
#endif

#endif /* AMAQ_AMAQ_H */

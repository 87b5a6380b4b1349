#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "amaq/text.hpp"

namespace amaq {

/// One post as it appears in a dump, before tree reconstruction.
struct RawPost {
  std::string id;
  std::optional<std::string> parent_id;  // absent for the thread root
  std::string author;
  std::string body;
  std::int64_t created_utc = 0;
};

/// One line of the thread dump.
struct RawThread {
  std::string id;
  std::string title;
  std::string selftext;
  std::string author;
  std::vector<RawPost> posts;  // includes the root when the dump line carries created_utc
};

struct Post {
  std::string id;
  std::optional<std::string> parent_id;
  std::string author;
  std::string body;
  std::int64_t created_utc = 0;
};

/// Reconstructed thread. `posts[0]` is the root; every other post in
/// `posts` reaches the root through `parent`. Children are ordered by
/// (created_utc, id) so the structure does not depend on input order.
struct Thread {
  std::string id;
  std::string title;
  std::string intro;
  std::string host;
  std::vector<Post> posts;
  std::vector<std::ptrdiff_t> parent;              // -1 for root
  std::vector<std::vector<std::size_t>> children;  // indices into posts
  std::vector<Post> quarantine;                    // parent chain never reaches the root

  const Post& root() const { return posts.front(); }
  std::size_t first_tier_count() const { return children.empty() ? 0 : children.front().size(); }
  std::optional<std::size_t> find(const std::string& post_id) const;
};

enum class ReplyScope { DirectChildren, Subtree };

struct QuestionRecord {
  std::string thread_id;
  std::string post_id;
  std::string text;
  std::vector<std::string> tokens;
  std::int64_t created_utc = 0;
  int label = 0;

  friend bool operator==(const QuestionRecord&, const QuestionRecord&) = default;
};

struct QuestionPair {
  QuestionRecord answered;
  QuestionRecord unanswered;
};

/// Strips the "t1_"/"t3_" kind prefixes Reddit puts on fullnames.
std::string normalize_post_id(std::string_view id);

/// True for authors that can never be the host ("[deleted]", empty).
bool is_deleted_author(std::string_view author);

/// Builds the tree. Exactly one post must lack a parent id; duplicate ids
/// are rejected. Posts whose parent chain does not reach the root go to
/// `Thread::quarantine`.
Thread parse_thread(const std::vector<RawPost>& records, std::string thread_id = {},
                    std::string title = {}, std::string intro = {});
Thread parse_thread(const RawThread& raw);

bool thread_passes_filters(const Thread& thread, std::size_t min_first_tier = 100);
bool is_ama_request(std::string_view title);

/// [root created_utc, last host post created_utc]. The root counts as a host post.
std::pair<std::int64_t, std::int64_t> active_period(const Thread& thread);

bool is_host_post(const Thread& thread, const Post& post);

int label_question(const Thread& thread, std::size_t post_index,
                   ReplyScope scope = ReplyScope::DirectChildren);

/// First-tier, non-host, single-question posts inside the active period,
/// labeled and sorted by post id.
std::vector<QuestionRecord> extract_questions(const Thread& thread,
                                              ReplyScope scope = ReplyScope::DirectChildren);

/// Question text after markdown cleanup, as stored in QuestionRecord::text.
std::string question_text(std::string_view body);

// --- dump I/O ---------------------------------------------------------------

/// Reads the JSON-lines thread dump. Malformed lines throw with the line number.
std::vector<RawThread> read_thread_dump(std::istream& in, const std::string& source = "<stream>");
RawThread parse_thread_json(const std::string& line, const std::string& where);

void write_question_jsonl(std::ostream& out, const std::vector<QuestionRecord>& records);
std::vector<QuestionRecord> read_question_jsonl(std::istream& in, const std::string& source = "<stream>");

void write_pairs_jsonl(std::ostream& out, const std::vector<QuestionPair>& pairs);
std::vector<QuestionPair> read_pairs_jsonl(std::istream& in, const std::string& source = "<stream>");

// --- ingest ----------------------------------------------------------------

struct IngestOptions {
  std::size_t min_first_tier = 100;
  ReplyScope scope = ReplyScope::DirectChildren;
  unsigned workers = 1;
};

struct YearStats {
  std::size_t threads = 0;
  std::size_t posts = 0;
  std::size_t sentences = 0;
  std::size_t words = 0;
  std::size_t question_posts = 0;
  std::size_t answered = 0;
};

struct CorpusStats {
  std::map<int, YearStats> years;

  double posts_per_thread(int year) const;
  double sentences_per_post(int year) const;
  double words_per_post(int year) const;
  double percent_answered(int year) const;  // NaN when the year has no questions
};

struct IngestResult {
  std::vector<QuestionRecord> questions;  // sorted by (thread_id, post_id)
  std::vector<std::string> kept_threads;
  std::size_t threads_total = 0;
  std::size_t dropped_first_tier = 0;
  std::size_t dropped_ama_request = 0;
  std::size_t quarantined_posts = 0;
  CorpusStats stats;
};

/// Per-year corpus statistics. Thread/post/sentence/word figures cover all
/// threads; question figures cover `questions`.
CorpusStats corpus_stats(const std::vector<Thread>& threads,
                         const std::vector<QuestionRecord>& questions);

/// Metric rows by year columns with a trailing total/macro-average column.
void write_stats_csv(std::ostream& out, const CorpusStats& stats);

IngestResult ingest(const std::vector<RawThread>& dump, const IngestOptions& options = {});

// --- splits and pairs -------------------------------------------------------

/// Calendar (year, month) in UTC.
std::pair<int, int> utc_year_month(std::int64_t seconds);
int utc_year(std::int64_t seconds);

/// Orders records so that every prefix (and every contiguous segment)
/// draws from each calendar month in proportion to its size. Deterministic
/// given the seed.
std::vector<QuestionRecord> temporal_order(std::vector<QuestionRecord> records, std::uint64_t seed);

struct Splits {
  std::vector<QuestionRecord> train;
  std::vector<QuestionRecord> valid;
  std::vector<QuestionRecord> test;
};

Splits split_dataset(const std::vector<QuestionRecord>& records, std::size_t train_size,
                     std::size_t valid_size, std::size_t test_size, std::uint64_t seed);

/// Nearest-in-time greedy pairing of answered/unanswered questions from one thread.
std::vector<QuestionPair> build_pairs(std::vector<QuestionRecord> records);

/// Groups by thread and pairs each group.
std::vector<QuestionPair> build_all_pairs(const std::vector<QuestionRecord>& records);

}  // namespace amaq

#include "amaq/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "amaq/error.hpp"
#include "amaq/rng.hpp"

namespace amaq {

using nlohmann::json;

namespace {

std::int64_t json_time(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) return static_cast<std::int64_t>(std::floor(v.get<double>()));
  if (v.is_string()) {
    try {
      return static_cast<std::int64_t>(std::floor(std::stod(v.get<std::string>())));
    } catch (const std::exception&) {
    }
  }
  fail(ErrorCode::Parse, where + ": created_utc must be a number");
}

std::string json_string(const json& obj, const char* key, const std::string& where,
                        bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) fail(ErrorCode::Parse, where + ": missing field \"" + key + "\"");
    return {};
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  fail(ErrorCode::Parse, where + ": field \"" + key + "\" must be a string");
}

json record_to_json(const QuestionRecord& r) {
  return json{{"thread_id", r.thread_id},   {"post_id", r.post_id}, {"text", r.text},
              {"tokens", r.tokens},         {"created_utc", r.created_utc},
              {"label", r.label}};
}

QuestionRecord record_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::Parse, where + ": expected a JSON object");
  QuestionRecord r;
  try {
    r.thread_id = j.at("thread_id").get<std::string>();
    r.post_id = j.at("post_id").get<std::string>();
    r.text = j.at("text").get<std::string>();
    if (auto it = j.find("tokens"); it != j.end())
      r.tokens = it->get<std::vector<std::string>>();
    else
      r.tokens = tokenize(r.text).tokens;
    r.created_utc = json_time(j.at("created_utc"), where);
    r.label = j.at("label").get<int>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, where + ": " + e.what());
  }
  if (r.label != 0 && r.label != 1) fail(ErrorCode::Parse, where + ": label must be 0 or 1");
  return r;
}

bool canonical_less(const QuestionRecord& a, const QuestionRecord& b) {
  return std::tie(a.created_utc, a.thread_id, a.post_id) <
         std::tie(b.created_utc, b.thread_id, b.post_id);
}

}  // namespace

std::string normalize_post_id(std::string_view id) {
  if (id.size() > 3 && id[0] == 't' && (id[1] >= '1' && id[1] <= '6') && id[2] == '_')
    id.remove_prefix(3);
  return std::string(id);
}

bool is_deleted_author(std::string_view author) {
  return author.empty() || author == "[deleted]" || author == "[removed]";
}

std::optional<std::size_t> Thread::find(const std::string& post_id) const {
  for (std::size_t i = 0; i < posts.size(); ++i)
    if (posts[i].id == post_id) return i;
  return std::nullopt;
}

Thread parse_thread(const std::vector<RawPost>& records, std::string thread_id, std::string title,
                    std::string intro) {
  std::unordered_map<std::string, std::size_t> by_id;
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string id = normalize_post_id(records[i].id);
    if (!by_id.emplace(id, i).second) fail(ErrorCode::Parse, "duplicate post id '" + id + "'");
    if (!records[i].parent_id) roots.push_back(i);
  }
  if (roots.size() != 1)
    fail(ErrorCode::Parse, "thread " + thread_id + " has " + std::to_string(roots.size()) +
                               " root posts, expected exactly one");

  std::unordered_map<std::string, std::vector<std::size_t>> kids;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].parent_id) kids[normalize_post_id(*records[i].parent_id)].push_back(i);

  auto to_post = [&](const RawPost& r) {
    Post p{normalize_post_id(r.id), std::nullopt, r.author, r.body, r.created_utc};
    if (r.parent_id) p.parent_id = normalize_post_id(*r.parent_id);
    return p;
  };
  auto order = [&](std::vector<std::size_t>& v) {
    std::sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(records[a].created_utc, records[a].id) <
             std::tie(records[b].created_utc, records[b].id);
    });
  };

  Thread t;
  t.title = std::move(title);
  t.intro = std::move(intro);
  const RawPost& root = records[roots.front()];
  t.id = thread_id.empty() ? normalize_post_id(root.id) : normalize_post_id(thread_id);
  t.host = root.author;
  if (t.intro.empty()) t.intro = root.body;

  // Breadth-first from the root; children sorted by (created_utc, id).
  std::vector<bool> placed(records.size(), false);
  std::deque<std::pair<std::size_t, std::ptrdiff_t>> queue{{roots.front(), -1}};
  while (!queue.empty()) {
    auto [rec, parent] = queue.front();
    queue.pop_front();
    placed[rec] = true;
    const std::size_t node = t.posts.size();
    t.posts.push_back(to_post(records[rec]));
    t.parent.push_back(parent);
    t.children.emplace_back();
    if (parent >= 0) t.children[static_cast<std::size_t>(parent)].push_back(node);
    auto it = kids.find(normalize_post_id(records[rec].id));
    if (it == kids.end()) continue;
    std::vector<std::size_t> next = it->second;
    order(next);
    for (std::size_t c : next) queue.emplace_back(c, static_cast<std::ptrdiff_t>(node));
  }

  std::vector<std::size_t> orphans;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (!placed[i]) orphans.push_back(i);
  order(orphans);
  for (std::size_t i : orphans) t.quarantine.push_back(to_post(records[i]));
  return t;
}

Thread parse_thread(const RawThread& raw) {
  return parse_thread(raw.posts, raw.id, raw.title, raw.selftext);
}

bool is_ama_request(std::string_view title) {
  return ascii_lower(title).find("ama request") != std::string::npos;
}

bool thread_passes_filters(const Thread& thread, std::size_t min_first_tier) {
  return thread.first_tier_count() >= min_first_tier && !is_ama_request(thread.title);
}

bool is_host_post(const Thread& thread, const Post& post) {
  return !is_deleted_author(thread.host) && post.author == thread.host;
}

std::pair<std::int64_t, std::int64_t> active_period(const Thread& thread) {
  const std::int64_t start = thread.root().created_utc;
  std::int64_t end = start;
  for (std::size_t i = 1; i < thread.posts.size(); ++i)
    if (is_host_post(thread, thread.posts[i])) end = std::max(end, thread.posts[i].created_utc);
  return {start, end};
}

int label_question(const Thread& thread, std::size_t post_index, ReplyScope scope) {
  std::vector<std::size_t> stack(thread.children.at(post_index).begin(),
                                 thread.children.at(post_index).end());
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (is_host_post(thread, thread.posts[i])) return 1;
    if (scope == ReplyScope::Subtree)
      stack.insert(stack.end(), thread.children[i].begin(), thread.children[i].end());
  }
  return 0;
}

std::string question_text(std::string_view body) {
  return std::string(trim(strip_markdown(body)));
}

std::vector<QuestionRecord> extract_questions(const Thread& thread, ReplyScope scope) {
  std::vector<QuestionRecord> out;
  if (thread.posts.empty()) return out;
  const auto [start, end] = active_period(thread);
  for (std::size_t i : thread.children.front()) {
    const Post& p = thread.posts[i];
    if (is_host_post(thread, p)) continue;
    if (p.created_utc < start || p.created_utc > end) continue;
    if (!is_single_question(p.body)) continue;
    QuestionRecord r;
    r.thread_id = thread.id;
    r.post_id = p.id;
    r.text = question_text(p.body);
    r.tokens = tokenize(r.text).tokens;
    r.created_utc = p.created_utc;
    r.label = label_question(thread, i, scope);
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(),
            [](const QuestionRecord& a, const QuestionRecord& b) { return a.post_id < b.post_id; });
  return out;
}

// --- dump I/O ---------------------------------------------------------------

RawThread parse_thread_json(const std::string& line, const std::string& where) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, where + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::Parse, where + ": expected a JSON object per line");

  RawThread t;
  t.id = normalize_post_id(json_string(j, "id", where));
  t.title = json_string(j, "title", where, false);
  t.selftext = json_string(j, "selftext", where, false);
  t.author = json_string(j, "author", where, false);
  if (auto it = j.find("created_utc"); it != j.end() && !it->is_null())
    t.posts.push_back({t.id, std::nullopt, t.author, t.selftext, json_time(*it, where)});

  auto posts = j.find("posts");
  if (posts != j.end() && !posts->is_null()) {
    if (!posts->is_array()) fail(ErrorCode::Parse, where + ": \"posts\" must be an array");
    std::size_t k = 0;
    for (const json& p : *posts) {
      const std::string pw = where + ": posts[" + std::to_string(k++) + "]";
      if (!p.is_object()) fail(ErrorCode::Parse, pw + ": expected an object");
      RawPost rp;
      rp.id = json_string(p, "id", pw);
      if (auto pit = p.find("parent_id"); pit != p.end() && !pit->is_null())
        rp.parent_id = json_string(p, "parent_id", pw);
      rp.author = json_string(p, "author", pw, false);
      rp.body = json_string(p, "body", pw, false);
      auto cit = p.find("created_utc");
      if (cit == p.end()) fail(ErrorCode::Parse, pw + ": missing field \"created_utc\"");
      rp.created_utc = json_time(*cit, pw);
      t.posts.push_back(std::move(rp));
    }
  }
  return t;
}

std::vector<RawThread> read_thread_dump(std::istream& in, const std::string& source) {
  std::vector<RawThread> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    out.push_back(parse_thread_json(line, source + ":" + std::to_string(line_no)));
  }
  return out;
}

void write_question_jsonl(std::ostream& out, const std::vector<QuestionRecord>& records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

std::vector<QuestionRecord> read_question_jsonl(std::istream& in, const std::string& source) {
  std::vector<QuestionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::Parse, where + ": invalid JSON: " + e.what());
    }
    out.push_back(record_from_json(j, where));
  }
  return out;
}

void write_pairs_jsonl(std::ostream& out, const std::vector<QuestionPair>& pairs) {
  for (const auto& p : pairs)
    out << json{{"thread_id", p.answered.thread_id},
                {"answered", record_to_json(p.answered)},
                {"unanswered", record_to_json(p.unanswered)}}
               .dump()
        << '\n';
}

std::vector<QuestionPair> read_pairs_jsonl(std::istream& in, const std::string& source) {
  std::vector<QuestionPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::Parse, where + ": invalid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("answered") || !j.contains("unanswered"))
      fail(ErrorCode::Parse, where + ": expected {\"answered\", \"unanswered\"}");
    QuestionPair p{record_from_json(j["answered"], where), record_from_json(j["unanswered"], where)};
    if (p.answered.label != 1 || p.unanswered.label != 0)
      fail(ErrorCode::Parse, where + ": pair labels must be (1, 0)");
    out.push_back(std::move(p));
  }
  return out;
}

// --- stats and ingest ---------------------------------------------------------

std::pair<int, int> utc_year_month(std::int64_t seconds) {
  // Days-to-civil conversion for the proleptic Gregorian calendar.
  std::int64_t days = seconds / 86400;
  if (seconds % 86400 < 0) --days;
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const std::int64_t doe = days - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const std::int64_t month = mp < 10 ? mp + 3 : mp - 9;
  const std::int64_t year = yoe + era * 400 + (month <= 2 ? 1 : 0);
  return {static_cast<int>(year), static_cast<int>(month)};
}

int utc_year(std::int64_t seconds) { return utc_year_month(seconds).first; }

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? std::numeric_limits<double>::quiet_NaN()
                  : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double CorpusStats::posts_per_thread(int year) const {
  const auto& y = years.at(year);
  return ratio(y.posts, y.threads);
}
double CorpusStats::sentences_per_post(int year) const {
  const auto& y = years.at(year);
  return ratio(y.sentences, y.posts);
}
double CorpusStats::words_per_post(int year) const {
  const auto& y = years.at(year);
  return ratio(y.words, y.posts);
}
double CorpusStats::percent_answered(int year) const {
  const auto& y = years.at(year);
  return 100.0 * ratio(y.answered, y.question_posts);
}

CorpusStats corpus_stats(const std::vector<Thread>& threads,
                         const std::vector<QuestionRecord>& questions) {
  CorpusStats stats;
  std::unordered_map<std::string, int> thread_year;
  for (const Thread& t : threads) {
    if (t.posts.empty()) continue;
    const int year = utc_year(t.root().created_utc);
    thread_year[t.id] = year;
    YearStats& y = stats.years[year];
    ++y.threads;
    for (const Post& p : t.posts) {
      const std::string cleaned = strip_markdown(p.body);
      ++y.posts;
      y.sentences += split_sentences(cleaned).size();
      for (const auto& tok : tokenize(cleaned).tokens)
        if (is_word_token(tok)) ++y.words;
    }
  }
  for (const QuestionRecord& q : questions) {
    auto it = thread_year.find(q.thread_id);
    YearStats& y = stats.years[it != thread_year.end() ? it->second : utc_year(q.created_utc)];
    ++y.question_posts;
    y.answered += static_cast<std::size_t>(q.label);
  }
  return stats;
}

void write_stats_csv(std::ostream& out, const CorpusStats& stats) {
  auto fmt = [](double v) -> std::string {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  };
  auto macro = [&](const std::function<double(int)>& f) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& [year, _] : stats.years) {
      const double v = f(year);
      if (std::isnan(v)) continue;
      sum += v;
      ++n;
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
  };

  out << "metric";
  for (const auto& [year, _] : stats.years) out << ',' << year;
  out << ",total_avg\n";

  auto count_row = [&](const char* name, std::size_t YearStats::*field) {
    std::size_t total = 0;
    out << name;
    for (const auto& [_, y] : stats.years) {
      out << ',' << y.*field;
      total += y.*field;
    }
    out << ',' << total << '\n';
  };
  auto mean_row = [&](const char* name, double (CorpusStats::*f)(int) const) {
    out << name;
    for (const auto& [year, _] : stats.years) out << ',' << fmt((stats.*f)(year));
    out << ',' << fmt(macro([&](int year) { return (stats.*f)(year); })) << '\n';
  };

  count_row("threads", &YearStats::threads);
  mean_row("avg_posts_per_thread", &CorpusStats::posts_per_thread);
  mean_row("avg_sentences_per_post", &CorpusStats::sentences_per_post);
  mean_row("avg_words_per_post", &CorpusStats::words_per_post);
  count_row("question_posts", &YearStats::question_posts);
  mean_row("pct_questions_answered", &CorpusStats::percent_answered);
}

IngestResult ingest(const std::vector<RawThread>& dump, const IngestOptions& options) {
  struct PerThread {
    std::optional<Thread> thread;
    bool kept = false;
    bool too_few = false;
    bool request = false;
    std::vector<QuestionRecord> questions;
  };
  std::vector<PerThread> results(dump.size());
  std::vector<std::string> errors(dump.size());

  auto work = [&](std::size_t i) {
    try {
      Thread t = parse_thread(dump[i]);
      PerThread& r = results[i];
      r.too_few = t.first_tier_count() < options.min_first_tier;
      r.request = !r.too_few && is_ama_request(t.title);
      r.kept = !r.too_few && !r.request;
      if (r.kept) r.questions = extract_questions(t, options.scope);
      r.thread = std::move(t);
    } catch (const Error& e) {
      errors[i] = "thread " + std::to_string(i + 1) + " (" + dump[i].id + "): " + e.what();
    }
  };

  const unsigned workers = std::max(1u, options.workers);
  if (workers == 1 || dump.size() < 2) {
    for (std::size_t i = 0; i < dump.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < dump.size(); i += workers) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) fail(ErrorCode::Parse, e);

  IngestResult out;
  out.threads_total = dump.size();
  std::vector<Thread> threads;
  threads.reserve(dump.size());
  for (auto& r : results) {
    out.dropped_first_tier += r.too_few ? 1 : 0;
    out.dropped_ama_request += r.request ? 1 : 0;
    out.quarantined_posts += r.thread->quarantine.size();
    if (r.kept) {
      out.kept_threads.push_back(r.thread->id);
      for (auto& q : r.questions) out.questions.push_back(std::move(q));
    }
    threads.push_back(std::move(*r.thread));
  }
  std::sort(out.kept_threads.begin(), out.kept_threads.end());
  std::sort(out.questions.begin(), out.questions.end(),
            [](const QuestionRecord& a, const QuestionRecord& b) {
              return std::tie(a.thread_id, a.post_id) < std::tie(b.thread_id, b.post_id);
            });
  out.stats = corpus_stats(threads, out.questions);
  return out;
}

// --- splits and pairs -------------------------------------------------------

std::vector<QuestionRecord> temporal_order(std::vector<QuestionRecord> records, std::uint64_t seed) {
  std::map<int, std::vector<QuestionRecord>> buckets;
  std::sort(records.begin(), records.end(), canonical_less);
  for (auto& r : records) {
    const auto [y, m] = utc_year_month(r.created_utc);
    buckets[y * 100 + m].push_back(std::move(r));
  }

  // Each record gets the fractional position (2*rank + 1) / (2*|bucket|)
  // within its shuffled bucket; merging on that key interleaves months in
  // proportion to their sizes.
  struct Slot {
    std::size_t rank;
    std::size_t bucket_size;
    std::size_t bucket_order;
    QuestionRecord* record;
  };
  std::vector<Slot> slots;
  std::size_t bucket_order = 0;
  for (auto& [key, bucket] : buckets) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(key)}));
    rng.shuffle(bucket);
    for (std::size_t r = 0; r < bucket.size(); ++r)
      slots.push_back({r, bucket.size(), bucket_order, &bucket[r]});
    ++bucket_order;
  }
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    const unsigned __int128 lhs = static_cast<unsigned __int128>(2 * a.rank + 1) * b.bucket_size;
    const unsigned __int128 rhs = static_cast<unsigned __int128>(2 * b.rank + 1) * a.bucket_size;
    if (lhs != rhs) return lhs < rhs;
    return a.bucket_order < b.bucket_order;
  });

  std::vector<QuestionRecord> out;
  out.reserve(slots.size());
  for (const Slot& s : slots) out.push_back(std::move(*s.record));
  return out;
}

Splits split_dataset(const std::vector<QuestionRecord>& records, std::size_t train_size,
                     std::size_t valid_size, std::size_t test_size, std::uint64_t seed) {
  const std::size_t requested = train_size + valid_size + test_size;
  if (requested > records.size()) {
    std::map<int, std::size_t> per_month;
    for (const auto& r : records) {
      const auto [y, m] = utc_year_month(r.created_utc);
      ++per_month[y * 100 + m];
    }
    std::ostringstream msg;
    msg << "requested " << requested << " records but only " << records.size()
        << " are available; per month (available / proportional request):";
    for (const auto& [key, n] : per_month) {
      const double share = records.empty() ? 0.0
                                           : static_cast<double>(requested) * static_cast<double>(n) /
                                                 static_cast<double>(records.size());
      msg << ' ' << key / 100 << '-' << std::setw(2) << std::setfill('0') << key % 100
          << std::setfill(' ') << '=' << n << '/' << std::fixed << std::setprecision(1) << share;
    }
    fail(ErrorCode::InvalidArgument, msg.str());
  }

  std::vector<QuestionRecord> ordered = temporal_order(records, seed);
  Splits s;
  auto take = [&](std::size_t from, std::size_t n, std::vector<QuestionRecord>& dst) {
    dst.assign(std::make_move_iterator(ordered.begin() + static_cast<std::ptrdiff_t>(from)),
               std::make_move_iterator(ordered.begin() + static_cast<std::ptrdiff_t>(from + n)));
    std::sort(dst.begin(), dst.end(), canonical_less);
  };
  take(0, train_size, s.train);
  take(train_size, valid_size, s.valid);
  take(train_size + valid_size, test_size, s.test);
  return s;
}

std::vector<QuestionPair> build_pairs(std::vector<QuestionRecord> records) {
  std::sort(records.begin(), records.end(), canonical_less);
  std::vector<QuestionPair> pairs;
  // Remaining records stay in time order; the closest answered/unanswered
  // pair is always adjacent in that order, so each round scans neighbours.
  std::vector<std::size_t> alive(records.size());
  std::iota(alive.begin(), alive.end(), 0);
  while (true) {
    std::optional<std::size_t> best;
    std::tuple<std::int64_t, std::int64_t, std::int64_t> best_key{};
    for (std::size_t k = 0; k + 1 < alive.size(); ++k) {
      const QuestionRecord& a = records[alive[k]];
      const QuestionRecord& b = records[alive[k + 1]];
      if (a.label == b.label) continue;
      const QuestionRecord& ans = a.label == 1 ? a : b;
      const QuestionRecord& un = a.label == 1 ? b : a;
      const std::tuple key{b.created_utc - a.created_utc, un.created_utc, ans.created_utc};
      if (!best || key < best_key) {
        best = k;
        best_key = key;
      }
    }
    if (!best) break;
    const QuestionRecord& a = records[alive[*best]];
    const QuestionRecord& b = records[alive[*best + 1]];
    pairs.push_back(a.label == 1 ? QuestionPair{a, b} : QuestionPair{b, a});
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(*best),
                alive.begin() + static_cast<std::ptrdiff_t>(*best + 2));
  }
  std::sort(pairs.begin(), pairs.end(), [](const QuestionPair& x, const QuestionPair& y) {
    return std::tie(x.answered.created_utc, x.answered.post_id) <
           std::tie(y.answered.created_utc, y.answered.post_id);
  });
  return pairs;
}

std::vector<QuestionPair> build_all_pairs(const std::vector<QuestionRecord>& records) {
  std::map<std::string, std::vector<QuestionRecord>> by_thread;
  for (const auto& r : records) by_thread[r.thread_id].push_back(r);
  std::vector<QuestionPair> out;
  for (auto& [_, group] : by_thread)
    for (auto& p : build_pairs(std::move(group))) out.push_back(std::move(p));
  return out;
}

}  // namespace amaq

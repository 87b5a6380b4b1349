#include "amaq/ngram.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "amaq/error.hpp"
#include "amaq/text.hpp"

namespace amaq {

namespace {

constexpr char kJoin = '\x1f';

void check_order(std::size_t order) {
  if (order < 1 || order > kMaxNgramOrder)
    fail(ErrorCode::InvalidArgument,
         "n-gram order must be in [1, " + std::to_string(kMaxNgramOrder) + "]");
}

}  // namespace

void NgramCounter::add(const Sentence& sentence) {
  std::string key;
  for (std::size_t start = 0; start < sentence.size(); ++start) {
    key.clear();
    for (std::size_t n = 1; n <= kMaxNgramOrder && start + n <= sentence.size(); ++n) {
      if (n > 1) key += kJoin;
      key += sentence[start + n - 1];
      ++tables_[n - 1][key];
    }
  }
}

void NgramCounter::add(std::span<const Sentence> corpus) {
  for (const auto& s : corpus) add(s);
}

void NgramCounter::merge(const NgramCounter& other) {
  for (std::size_t n = 0; n < kMaxNgramOrder; ++n)
    for (const auto& [k, v] : other.tables_[n]) tables_[n][k] += v;
}

std::uint64_t NgramCounter::unique_count(std::size_t order, std::uint64_t min_count) const {
  check_order(order);
  if (min_count < 1) fail(ErrorCode::InvalidArgument, "min_count must be >= 1");
  std::uint64_t n = 0;
  for (const auto& [_, c] : tables_[order - 1]) n += c >= min_count ? 1 : 0;
  return n;
}

const std::unordered_map<std::string, std::uint64_t>& NgramCounter::table(std::size_t order) const {
  check_order(order);
  return tables_[order - 1];
}

std::uint64_t count_unique_ngrams(std::span<const Sentence> corpus, std::size_t order,
                                  std::uint64_t min_count) {
  check_order(order);
  NgramCounter c;
  c.add(corpus);
  return c.unique_count(order, min_count);
}

NgramCounter count_sharded(std::span<const Sentence> corpus, std::size_t shards, unsigned workers) {
  shards = std::max<std::size_t>(1, shards);
  workers = std::max(1u, workers);
  std::vector<NgramCounter> parts(shards);
  const std::size_t per = (corpus.size() + shards - 1) / shards;
  auto count_shard = [&](std::size_t s) {
    const std::size_t lo = std::min(corpus.size(), s * per);
    const std::size_t hi = std::min(corpus.size(), lo + per);
    parts[s].add(corpus.subspan(lo, hi - lo));
  };
  if (workers == 1) {
    for (std::size_t s = 0; s < shards; ++s) count_shard(s);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < shards; s += workers) count_shard(s);
      });
    for (auto& t : pool) t.join();
  }
  NgramCounter merged;
  for (const auto& p : parts) merged.merge(p);
  return merged;
}

std::optional<double> NgramProfile::unigram_growth() const {
  if (unique_counts[0] == 0) return std::nullopt;
  return static_cast<double>(unique_counts[1]) / static_cast<double>(unique_counts[0]);
}

std::optional<double> NgramProfile::bigram_growth(std::size_t order) const {
  if (order < 3 || order > kMaxNgramOrder)
    fail(ErrorCode::InvalidArgument, "bigram growth is defined for orders 3..5");
  if (unique_counts[1] == 0) return std::nullopt;
  return static_cast<double>(unique_counts[order - 1]) / static_cast<double>(unique_counts[1]);
}

NgramProfile NgramProfile::from_counts(const std::array<std::uint64_t, kMaxNgramOrder>& counts) {
  NgramProfile p;
  p.unique_counts = counts;
  p.min_counts.fill(1);
  return p;
}

NgramProfile growth_profile(const NgramCounter& counter,
                            const std::array<std::uint64_t, kMaxNgramOrder>& min_counts) {
  NgramProfile p;
  p.min_counts = min_counts;
  for (std::size_t n = 1; n <= kMaxNgramOrder; ++n)
    p.unique_counts[n - 1] = counter.unique_count(n, min_counts[n - 1]);
  return p;
}

NgramProfile growth_profile(std::span<const Sentence> corpus,
                            const std::array<std::uint64_t, kMaxNgramOrder>& min_counts) {
  if (corpus.empty()) fail(ErrorCode::InvalidArgument, "n-gram corpus is empty");
  NgramCounter c;
  c.add(corpus);
  return growth_profile(c, min_counts);
}

NgramProfile growth_profile(std::span<const Sentence> corpus, std::uint64_t min_count) {
  std::array<std::uint64_t, kMaxNgramOrder> mins;
  mins.fill(min_count);
  return growth_profile(corpus, mins);
}

std::size_t FilterAllocation::total() const {
  std::size_t t = 0;
  for (const auto& [_, c] : counts) t += c;
  return t;
}

std::size_t round_multiplier(double value) {
  const auto r = static_cast<std::size_t>(std::llround(value / 10.0) * 10);
  return std::max<std::size_t>(1, r);
}

FilterAllocation derive_allocation(std::span<const NgramProfile> profiles, std::size_t x,
                                   AllocationMode mode) {
  if (x < 1) fail(ErrorCode::InvalidArgument, "filter unit x must be >= 1");
  std::size_t tier2 = 20;
  std::size_t tier3 = 60;
  if (mode == AllocationMode::Computed) {
    if (profiles.empty()) fail(ErrorCode::InvalidArgument, "computed allocation needs a profile");
    double sum_ub = 0;
    double sum_bn = 0;
    std::size_t n_bn = 0;
    for (const auto& p : profiles) {
      const auto ub = p.unigram_growth();
      if (!ub) fail(ErrorCode::InvalidArgument, "unigram growth undefined (no unigrams)");
      sum_ub += *ub;
      for (std::size_t n = 3; n <= kMaxNgramOrder; ++n) {
        const auto bn = p.bigram_growth(n);
        if (!bn) fail(ErrorCode::InvalidArgument, "bigram growth undefined (no bigrams)");
        sum_bn += *bn;
        ++n_bn;
      }
    }
    const double mean_ub = sum_ub / static_cast<double>(profiles.size());
    const double mean_bn = sum_bn / static_cast<double>(n_bn);
    tier2 = round_multiplier(mean_ub);
    tier3 = round_multiplier(mean_ub * mean_bn);
  }
  FilterAllocation a;
  a.x = x;
  a.counts = {{1, x}, {2, tier2 * x}, {3, tier3 * x}, {4, tier3 * x}, {5, tier3 * x}};
  return a;
}

void write_profile_csv(std::ostream& out, const NgramProfile& profile) {
  out << "order,unique_count,min_count,ratio\n";
  for (std::size_t n = 1; n <= kMaxNgramOrder; ++n) {
    out << n << ',' << profile.unique_counts[n - 1] << ',' << profile.min_counts[n - 1] << ',';
    std::optional<double> r;
    if (n == 2) r = profile.unigram_growth();
    if (n >= 3) r = profile.bigram_growth(n);
    if (r) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.4f", *r);
      out << buf;
    }
    out << '\n';
  }
}

std::string allocation_to_json(const FilterAllocation& allocation, AllocationMode mode) {
  nlohmann::ordered_json j;
  j["mode"] = mode == AllocationMode::Paper ? "paper" : "computed";
  j["x"] = allocation.x;
  nlohmann::ordered_json filters = nlohmann::ordered_json::object();
  for (const auto& [n, c] : allocation.counts) filters[std::to_string(n)] = c;
  j["filters"] = filters;
  j["total"] = allocation.total();
  return j.dump(2) + "\n";
}

std::vector<Sentence> read_tokenized_corpus(std::istream& in) {
  std::vector<Sentence> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    Sentence s;
    for (std::string tok; ss >> tok;) s.push_back(std::move(tok));
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sentence> read_raw_corpus(std::istream& in) {
  std::vector<Sentence> out;
  std::string line;
  while (std::getline(in, line)) {
    auto seq = tokenize(line);
    if (!seq.empty()) out.push_back(std::move(seq.tokens));
  }
  return out;
}

}  // namespace amaq

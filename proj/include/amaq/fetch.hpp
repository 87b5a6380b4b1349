#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "amaq/corpus.hpp"

namespace amaq {

/// One request against a remote thread listing: threads created in
/// [window_begin, window_end), continuing from `cursor` when set.
struct ListingQuery {
  std::int64_t window_begin = 0;
  std::int64_t window_end = 0;
  std::optional<std::string> cursor;
  std::size_t limit = 0;
};

struct ListingPage {
  std::vector<RawThread> threads;
  std::optional<std::string> next_cursor;  // empty when the window is exhausted
};

/// Fetches posts of one thread that a listing left out, by id.
struct PostQuery {
  std::string thread_id;
  std::vector<std::string> post_ids;
};

using ListingFetcher = std::function<ListingPage(const ListingQuery&)>;
using PostFetcher = std::function<std::vector<RawPost>(const PostQuery&)>;

struct CrawlOptions {
  std::int64_t window_seconds = 30 * 60;
  std::size_t max_posts_per_request = 1500;
  std::size_t max_threads_per_request = 1000;
};

/// Walks [begin, end) in fixed query windows and pages through each window
/// until the fetcher reports no further cursor. Threads are returned in
/// fetch order; a thread id seen twice keeps its first copy.
std::vector<RawThread> crawl_listing(const ListingFetcher& fetch, std::int64_t begin,
                                     std::int64_t end, const CrawlOptions& options = {});

/// Requests posts referenced as parents but absent from the thread, in
/// batches of at most `max_posts_per_request` ids, until no parent is
/// missing or the fetcher returns nothing new. Returns the number of posts
/// added.
std::size_t fill_missing_posts(RawThread& thread, const PostFetcher& fetch,
                               const CrawlOptions& options = {});

}  // namespace amaq

#include "amaq/fetch.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "amaq/error.hpp"

namespace amaq {

std::vector<RawThread> crawl_listing(const ListingFetcher& fetch, std::int64_t begin,
                                     std::int64_t end, const CrawlOptions& options) {
  if (options.window_seconds <= 0) fail(ErrorCode::InvalidArgument, "query window must be positive");
  std::vector<RawThread> out;
  std::unordered_set<std::string> seen;
  for (std::int64_t lo = begin; lo < end; lo += options.window_seconds) {
    ListingQuery q{lo, std::min(end, lo + options.window_seconds), std::nullopt,
                   options.max_threads_per_request};
    std::unordered_set<std::string> cursors;
    while (true) {
      ListingPage page = fetch(q);
      for (auto& t : page.threads)
        if (seen.insert(t.id).second) out.push_back(std::move(t));
      if (!page.next_cursor || !cursors.insert(*page.next_cursor).second) break;
      q.cursor = page.next_cursor;
    }
  }
  return out;
}

std::size_t fill_missing_posts(RawThread& thread, const PostFetcher& fetch,
                               const CrawlOptions& options) {
  if (options.max_posts_per_request == 0)
    fail(ErrorCode::InvalidArgument, "max_posts_per_request must be positive");
  std::size_t added = 0;
  std::set<std::string> requested;
  while (true) {
    std::unordered_set<std::string> have;
    for (const auto& p : thread.posts) have.insert(normalize_post_id(p.id));
    std::set<std::string> missing;
    for (const auto& p : thread.posts)
      if (p.parent_id) {
        const std::string pid = normalize_post_id(*p.parent_id);
        if (!have.contains(pid) && !requested.contains(pid)) missing.insert(pid);
      }
    if (missing.empty()) break;

    std::size_t got = 0;
    std::vector<std::string> ids(missing.begin(), missing.end());
    for (std::size_t i = 0; i < ids.size(); i += options.max_posts_per_request) {
      const std::size_t n = std::min(options.max_posts_per_request, ids.size() - i);
      PostQuery q{thread.id, {ids.begin() + static_cast<std::ptrdiff_t>(i),
                              ids.begin() + static_cast<std::ptrdiff_t>(i + n)}};
      requested.insert(q.post_ids.begin(), q.post_ids.end());
      for (auto& p : fetch(q)) {
        if (have.insert(normalize_post_id(p.id)).second) {
          thread.posts.push_back(std::move(p));
          ++got;
        }
      }
    }
    added += got;
    if (got == 0) break;
  }
  return added;
}

}  // namespace amaq

#include "adsurveil/dedup.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace adsurveil {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool earlier(const AdRecord& a, const AdRecord& b) {
  if (a.posted_at != b.posted_at) return a.posted_at < b.posted_at;
  return a.id < b.id;
}

// Union-find over record indices.
struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::string normalize_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool gap = true;
  for (unsigned char c : s) {
    if (c >= 0x80) {  // UTF-8 continuation/lead bytes pass through
      out.push_back(static_cast<char>(c));
      gap = false;
    } else if (std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
      gap = false;
    } else {
      if (!gap && !out.empty()) out.push_back(' ');
      gap = true;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

DedupKeyPair dedup_keys(const AdRecord& ad) {
  DedupKeyPair keys;
  keys.title_key = normalize_text(ad.title);
  keys.title_key += '|';
  if (ad.price) keys.title_key += std::to_string(*ad.price);
  keys.title_key += '|';
  keys.title_key += ad.state;
  keys.title_key += '|';
  keys.title_key += normalize_text(ad.city);
  keys.title_key += '|';
  if (ad.bedrooms) keys.title_key += std::to_string(*ad.bedrooms);

  const std::string body = normalize_text(ad.body);
  if (!body.empty()) {
    keys.content_key = fnv1a(body);
    keys.has_content_key = true;
  }
  return keys;
}

bool is_duplicate(const AdRecord& a, const AdRecord& b) {
  const DedupKeyPair ka = dedup_keys(a);
  const DedupKeyPair kb = dedup_keys(b);
  if (ka.title_key == kb.title_key) return true;
  return ka.has_content_key && kb.has_content_key &&
         ka.content_key == kb.content_key;
}

DedupResult dedup(const std::vector<AdRecord>& corpus) {
  const std::size_t n = corpus.size();
  DedupResult result;
  result.report.input_count = n;

  DisjointSet ds(n);
  std::unordered_map<std::string, std::size_t> by_title;
  std::unordered_map<std::uint64_t, std::size_t> by_content;
  std::vector<DedupKeyPair> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = dedup_keys(corpus[i]);
    if (auto [it, inserted] = by_title.emplace(keys[i].title_key, i); !inserted)
      ds.unite(i, it->second);
    if (keys[i].has_content_key) {
      if (auto [it, inserted] = by_content.emplace(keys[i].content_key, i);
          !inserted)
        ds.unite(i, it->second);
    }
  }

  // Winner per cluster: earliest by (posted_at, id).
  std::unordered_map<std::size_t, std::size_t> winner;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t root = ds.find(i);
    auto [it, inserted] = winner.emplace(root, i);
    if (!inserted && earlier(corpus[i], corpus[it->second])) it->second = i;
  }

  std::unordered_map<std::size_t, std::vector<std::string>> removed_by_root;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t root = ds.find(i);
    if (winner.at(root) == i) {
      result.kept.push_back(corpus[i]);
    } else {
      result.report.duplicates_removed += 1;
      removed_by_root[root].push_back(corpus[i].id);
    }
  }
  result.report.kept_count = result.kept.size();

  for (auto& [root, removed] : removed_by_root) {
    std::sort(removed.begin(), removed.end());
    result.report.duplicate_clusters.emplace_back(corpus[winner.at(root)].id,
                                                  std::move(removed));
  }
  std::sort(result.report.duplicate_clusters.begin(),
            result.report.duplicate_clusters.end());
  return result;
}

DedupResult filter_outliers(const std::vector<AdRecord>& corpus,
                            PriceBounds bounds) {
  if (!(bounds.min < bounds.max))
    throw std::invalid_argument("price bounds: min must be < max");

  DedupResult result;
  result.report.input_count = corpus.size();
  for (const AdRecord& ad : corpus) {
    if (ad.price && (*ad.price < bounds.min || *ad.price > bounds.max)) {
      result.report.outliers_removed += 1;
    } else {
      result.kept.push_back(ad);
    }
  }
  result.report.kept_count = result.kept.size();
  return result;
}

}  // namespace adsurveil

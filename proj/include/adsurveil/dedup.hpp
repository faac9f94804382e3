#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adsurveil/ad_model.hpp"

namespace adsurveil {

// Case-folds, collapses punctuation runs and whitespace runs to single
// spaces, strips leading/trailing space. UTF-8 bytes outside ASCII pass
// through unchanged.
std::string normalize_text(std::string_view s);

struct DedupKeyPair {
  std::string title_key;     // normalized (title, price, state, city, bedrooms)
  std::uint64_t content_key = 0;  // FNV-1a of normalized body, 0 if body empty
  bool has_content_key = false;
};

DedupKeyPair dedup_keys(const AdRecord& ad);

// Title keys equal, or both bodies non-empty with equal content keys.
bool is_duplicate(const AdRecord& a, const AdRecord& b);

struct FilterReport {
  std::size_t input_count = 0;
  std::size_t kept_count = 0;
  std::size_t duplicates_removed = 0;
  std::size_t outliers_removed = 0;
  // (kept id, removed ids) per duplicate cluster with at least one removal.
  std::vector<std::pair<std::string, std::vector<std::string>>>
      duplicate_clusters;
};

struct DedupResult {
  std::vector<AdRecord> kept;
  FilterReport report;
};

// Keeps the earliest record (posted_at, then id) of every duplicate
// cluster; output preserves input order restricted to kept records.
// Clusters are the transitive closure of is_duplicate.
DedupResult dedup(const std::vector<AdRecord>& corpus);

struct PriceBounds {
  double min = 10.0;
  double max = 100000.0;
};

// Removes records whose present price falls outside [min, max];
// absent-price records always pass. Throws std::invalid_argument when
// bounds.min >= bounds.max.
DedupResult filter_outliers(const std::vector<AdRecord>& corpus,
                            PriceBounds bounds);

}  // namespace adsurveil

#include "adsurveil/dedup.hpp"

#include <numeric>
#include <stdexcept>
#include <random>

#include "doctest.h"

using namespace adsurveil;

namespace {

AdRecord make_ad(const std::string& id, const std::string& title,
                 std::optional<double> price = 650,
                 const std::string& body = "", Timestamp posted = 1000) {
  AdRecord ad;
  ad.id = id;
  ad.title = title;
  ad.body = body;
  ad.price = price;
  ad.state = "CO";
  ad.city = "Denver";
  ad.subcategory = Subcategory::rooms_shares;
  ad.posted_at = posted;
  return ad;
}

// O(n^2) reference: connected components of is_duplicate, keep the
// earliest by (posted_at, id).
std::vector<AdRecord> brute_force_dedup(const std::vector<AdRecord>& corpus) {
  const std::size_t n = corpus.size();
  std::vector<std::size_t> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (comp[i] != comp[j] && is_duplicate(corpus[i], corpus[j])) {
          std::size_t lo = std::min(comp[i], comp[j]);
          std::size_t hi = std::max(comp[i], comp[j]);
          for (std::size_t k = 0; k < n; ++k)
            if (comp[k] == hi) comp[k] = lo;
          changed = true;
        }
      }
    }
  }
  std::vector<bool> keep(n, false);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (comp[i] != c) continue;
      if (best == n ||
          std::tie(corpus[i].posted_at, corpus[i].id) <
              std::tie(corpus[best].posted_at, corpus[best].id))
        best = i;
    }
    if (best != n) keep[best] = true;
  }
  std::vector<AdRecord> kept;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) kept.push_back(corpus[i]);
  return kept;
}

}  // namespace

TEST_CASE("normalize_text") {
  CHECK(normalize_text("  Cozy   ROOM!!") == "cozy room");
  CHECK(normalize_text("") == "");
  CHECK(normalize_text("420-Friendly\tapt") == "420 friendly apt");
  CHECK(normalize_text("a--b??c") == "a b c");
}

TEST_CASE("is_duplicate: reflexive and symmetric") {
  AdRecord a = make_ad("a", "Room for rent");
  AdRecord b = make_ad("b", "Different title", 700, "same body text");
  AdRecord c = make_ad("c", "Another one", 900, "same body text");
  CHECK(is_duplicate(a, a));
  CHECK(is_duplicate(b, c));
  CHECK(is_duplicate(c, b));
  CHECK_FALSE(is_duplicate(a, b));
}

TEST_CASE("same body, different titles -> duplicate") {
  AdRecord a = make_ad("a", "Cozy room", 650, "spacious and bright, call now");
  AdRecord b = make_ad("b", "GREAT DEAL", 800, "Spacious and bright -- call now!");
  CHECK(is_duplicate(a, b));
}

TEST_CASE("same title but different price -> not duplicate") {
  AdRecord a = make_ad("a", "Cozy room", 650);
  AdRecord b = make_ad("b", "Cozy room", 700);
  CHECK_FALSE(is_duplicate(a, b));
}

TEST_CASE("empty bodies never content-match") {
  AdRecord a = make_ad("a", "Title one", 650, "");
  AdRecord b = make_ad("b", "Title two", 700, "");
  CHECK_FALSE(is_duplicate(a, b));
}

TEST_CASE("3 identical ads -> 1 kept") {
  std::vector<AdRecord> corpus = {make_ad("a", "Room"), make_ad("b", "Room"),
                                  make_ad("c", "Room")};
  DedupResult r = dedup(corpus);
  CHECK(r.kept.size() == 1);
  CHECK(r.report.duplicates_removed == 2);
  CHECK(r.kept.front().id == "a");  // earliest id at equal posted_at
  REQUIRE(r.report.duplicate_clusters.size() == 1);
  CHECK(r.report.duplicate_clusters[0].first == "a");
  CHECK(r.report.duplicate_clusters[0].second ==
        std::vector<std::string>{"b", "c"});
}

TEST_CASE("no duplicate keys -> all kept, input order preserved") {
  std::vector<AdRecord> corpus = {make_ad("z", "One"), make_ad("a", "Two"),
                                  make_ad("m", "Three")};
  DedupResult r = dedup(corpus);
  REQUIRE(r.kept.size() == 3);
  CHECK(r.kept[0].id == "z");
  CHECK(r.kept[1].id == "a");
  CHECK(r.kept[2].id == "m");
  CHECK(r.report.duplicates_removed == 0);
}

TEST_CASE("keep-first by posted_at then id") {
  std::vector<AdRecord> corpus = {make_ad("b", "Room", 650, "", 2000),
                                  make_ad("a", "Room", 650, "", 1000)};
  DedupResult r = dedup(corpus);
  REQUIRE(r.kept.size() == 1);
  CHECK(r.kept.front().id == "a");
}

TEST_CASE("dedup is idempotent") {
  std::mt19937 rng(7);
  std::vector<AdRecord> corpus;
  for (int i = 0; i < 300; ++i) {
    int title_pool = static_cast<int>(rng() % 120);
    corpus.push_back(make_ad("id" + std::to_string(i),
                             "Title " + std::to_string(title_pool),
                             600 + title_pool % 5,
                             "body " + std::to_string(rng() % 100),
                             static_cast<Timestamp>(rng() % 100000)));
  }
  DedupResult once = dedup(corpus);
  DedupResult twice = dedup(once.kept);
  CHECK(twice.report.duplicates_removed == 0);
  REQUIRE(twice.kept.size() == once.kept.size());
  for (std::size_t i = 0; i < once.kept.size(); ++i)
    CHECK(twice.kept[i].id == once.kept[i].id);
}

TEST_CASE("dedup equals O(n^2) brute force on random corpora") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<AdRecord> corpus;
    for (int i = 0; i < 200; ++i) {
      corpus.push_back(make_ad(
          "id" + std::to_string(i), "Title " + std::to_string(rng() % 60),
          600 + static_cast<double>(rng() % 4),
          rng() % 3 ? "body " + std::to_string(rng() % 40) : "",
          static_cast<Timestamp>(rng() % 10000)));
    }
    DedupResult fast = dedup(corpus);
    std::vector<AdRecord> slow = brute_force_dedup(corpus);
    REQUIRE(fast.kept.size() == slow.size());
    for (std::size_t i = 0; i < slow.size(); ++i)
      CHECK(fast.kept[i].id == slow[i].id);
  }
}

TEST_CASE("conservation: input = kept + removed") {
  std::mt19937 rng(9);
  std::vector<AdRecord> corpus;
  for (int i = 0; i < 500; ++i)
    corpus.push_back(make_ad("id" + std::to_string(i),
                             "T" + std::to_string(rng() % 200)));
  DedupResult r = dedup(corpus);
  CHECK(r.report.input_count ==
        r.report.kept_count + r.report.duplicates_removed +
            r.report.outliers_removed);
}

TEST_CASE("filter_outliers") {
  std::vector<AdRecord> corpus = {
      make_ad("a", "Realistic", 650), make_ad("b", "Too cheap", 1),
      make_ad("c", "Too dear", 250000), make_ad("d", "No price", std::nullopt)};
  DedupResult r = filter_outliers(corpus, PriceBounds{10, 100000});
  REQUIRE(r.kept.size() == 2);
  CHECK(r.kept[0].id == "a");
  CHECK(r.kept[1].id == "d");  // absent price always kept
  CHECK(r.report.outliers_removed == 2);
  CHECK(r.report.input_count ==
        r.report.kept_count + r.report.duplicates_removed +
            r.report.outliers_removed);
}

TEST_CASE("invalid bounds are a fatal configuration error") {
  CHECK_THROWS_AS(filter_outliers({}, PriceBounds{100, 10}),
                  std::invalid_argument);
}

#include "adsurveil/extract.hpp"

#include <filesystem>
#include <fstream>

#include "doctest.h"

using namespace adsurveil;

namespace {

AdRecord ad_with_body(const std::string& body, const std::string& title = "x") {
  AdRecord ad;
  ad.id = "t1";
  ad.title = title;
  ad.body = body;
  ad.state = "CO";
  ad.city = "Denver";
  ad.subcategory = Subcategory::rooms_shares;
  ad.posted_at = 0;
  return ad;
}

std::vector<TermHit> hits_for(const std::string& body) {
  return extract_terms(ad_with_body(body), default_lexicon());
}

}  // namespace

TEST_CASE("tokenize basic") {
  auto toks = tokenize("420 friendly!");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].text == "420");
  CHECK(toks[0].begin == 0);
  CHECK(toks[0].end == 3);
  CHECK(toks[1].text == "friendly");
  CHECK(toks[1].begin == 4);
  CHECK(toks[1].end == 12);
}

TEST_CASE("tokenize records adjacent markers") {
  auto toks = tokenize("#420");
  REQUIRE(toks.size() == 1);
  CHECK(toks[0].text == "420");
  CHECK(toks[0].prev_marker == '#');

  toks = tokenize("555-420-1234");
  REQUIRE(toks.size() == 3);
  CHECK(toks[1].prev_marker == '-');
  CHECK(toks[1].next_marker == '-');

  toks = tokenize("$420/mo");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].prev_marker == '$');
  CHECK(toks[0].next_marker == '/');
}

TEST_CASE("tokenize empty string") { CHECK(tokenize("").empty()); }

TEST_CASE("we are 420 friendly -> one T1 hit, friendly") {
  auto hits = hits_for("we are 420 friendly");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].group == TermGroup::T1_420_friendly);
  CHECK(hits[0].polarity == Polarity::friendly);
  CHECK(hits[0].surface == "420 friendly");
  CHECK(hits[0].field == AdField::body);
}

TEST_CASE("paper false positives yield no hits") {
  CHECK(hits_for("APT 420 available now").empty());
  CHECK(hits_for("my number is 555-420-1234").empty());
  CHECK(hits_for("420 bucks per month").empty());
  CHECK(hits_for("check out #420").empty());
}

TEST_CASE("extension false positives yield no hits") {
  CHECK(hits_for("located at 420 Main St").empty());
  CHECK(hits_for("open house at 4:20 today").empty());
  CHECK(hits_for("unit 420 has a view").empty());
  CHECK(hits_for("rent is $420").empty());
  CHECK(hits_for("only 420 dollars").empty());
  CHECK(hits_for("420/month utilities included").empty());
}

TEST_CASE("bare 420 without context is discarded") {
  CHECK(hits_for("about 420 things to love").empty());
  CHECK(hits_for("420").empty());
}

TEST_CASE("420 variants with qualifiers land in T1") {
  for (const char* phrase : {"420 is ok", "420 is allowed", "420 fine",
                             "is 420 okay here", "420 welcome"}) {
    auto hits = hits_for(phrase);
    CAPTURE(phrase);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].group == TermGroup::T1_420_friendly);
    CHECK(hits[0].polarity == Polarity::friendly);
  }
}

TEST_CASE("hyphen and slash joined variants match") {
  auto hits = hits_for("this place is 420-Friendly");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].group == TermGroup::T1_420_friendly);
  CHECK(hits[0].surface == "420-Friendly");

  hits = hits_for("420/friendly building");
  REQUIRE(hits.size() == 1);
}

TEST_CASE("other groups match bare") {
  auto check_group = [](const std::string& body, TermGroup g) {
    auto hits = hits_for(body);
    CAPTURE(body);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].group == g);
  };
  check_group("marijuana dispensary nearby", TermGroup::T2_marijuana);
  check_group("mmj ok, no smoking inside", TermGroup::T3_mmj);
  check_group("cannabis permitted", TermGroup::T4_cannabis);
  check_group("pot allowed on balcony", TermGroup::T5_pot);
}

TEST_CASE("polarity classification") {
  auto hits = hits_for("no 420");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].polarity == Polarity::prohibited);

  hits = hits_for("not 420 friendly");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].polarity == Polarity::prohibited);

  hits = hits_for("marijuana dispensary nearby");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].polarity == Polarity::neutral_mention);

  hits = hits_for("mmj ok, no smoking inside");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].polarity == Polarity::friendly);

  hits = hits_for("marijuana not ok");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].polarity == Polarity::prohibited);
}

TEST_CASE("pot ambiguity guards") {
  CHECK(hits_for("new coffee pot included").empty());
  CHECK(hits_for("crock pot in kitchen").empty());
  CHECK(hits_for("flower pot on porch").empty());
  CHECK(hits_for("pot rack above the stove").empty());
  auto hits = hits_for("pot friendly home");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].group == TermGroup::T5_pot);
}

TEST_CASE("title scanned before body, span integrity") {
  AdRecord ad = ad_with_body("we are 420 friendly", "Marijuana OK here");
  auto hits = extract_terms(ad, default_lexicon());
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].field == AdField::title);
  CHECK(hits[0].group == TermGroup::T2_marijuana);
  for (const TermHit& h : hits) {
    const std::string& src = h.field == AdField::title ? ad.title : ad.body;
    CHECK(src.substr(h.span_begin, h.span_end - h.span_begin) == h.surface);
  }
}

TEST_CASE("matches are non-overlapping, longest-leftmost") {
  auto hits = hits_for("420 friendly and marijuana ok");
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].surface == "420 friendly");
  CHECK(hits[1].group == TermGroup::T2_marijuana);
}

TEST_CASE("determinism: same input, same hits") {
  const Lexicon lex = default_lexicon();
  AdRecord ad = ad_with_body("420 ok and cannabis welcome, no pot inside");
  auto h1 = extract_terms(ad, lex);
  auto h2 = extract_terms(ad, lex);
  REQUIRE(h1.size() == h2.size());
  for (std::size_t i = 0; i < h1.size(); ++i) {
    CHECK(h1[i].surface == h2[i].surface);
    CHECK(h1[i].span_begin == h2[i].span_begin);
    CHECK(h1[i].polarity == h2[i].polarity);
  }
}

TEST_CASE("count_by_group") {
  auto hits = hits_for("420 ok here and also 420 friendly, plus 420 welcome");
  GroupCounts counts = count_by_group(hits);
  CHECK(counts[0] == 3);

  hits = hits_for("cannabis and more cannabis");
  counts = count_by_group(hits);
  CHECK(counts[static_cast<int>(TermGroup::T4_cannabis)] == 2);
  CHECK(counts[0] == 0);

  CHECK(count_by_group({}) == GroupCounts{});
}

TEST_CASE("rules can be disabled via lexicon config") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "lexicon_norules.json";
  {
    std::ofstream out(p);
    out << R"({"rules": {"street_suffix": false}})";
  }
  Lexicon lex = load_lexicon(p);
  AdRecord ad = ad_with_body("420 ok at 420 Main St");
  auto hits = extract_terms(ad, lex);
  // with street_suffix off, "420 Main" is not suppressed, but bare 420
  // before "main" still lacks a qualifier -> only the first hit remains
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].span_begin == 0);
  fs::remove(p);
}

TEST_CASE("lexicon config replaces groups and validates") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "lexicon_custom.json";
  {
    std::ofstream out(p);
    out << R"({"groups": {
      "t1_420_friendly": ["420 friendly", "420"],
      "t2_marijuana": ["marijuana", "mary jane"],
      "t3_mmj": ["mmj"],
      "t4_cannabis": ["cannabis"],
      "t5_pot": ["pot"]
    }})";
  }
  Lexicon lex = load_lexicon(p);
  auto hits = extract_terms(ad_with_body("mary jane welcome"), lex);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].group == TermGroup::T2_marijuana);
  fs::remove(p);

  {
    std::ofstream out(p);
    out << R"({"groups": {"t1_420_friendly": ["420 friendly"]}})";
  }
  CHECK_THROWS_AS(load_lexicon(p), std::runtime_error);
  fs::remove(p);
}

#include "adsurveil/ingest.hpp"

#include <filesystem>
#include <fstream>

#include "doctest.h"

using namespace adsurveil;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  return p;
}

std::string valid_line(const std::string& id) {
  return R"({"id":")" + id +
         R"(","title":"Room","state":"CO","city":"Denver",)"
         R"("subcategory":"rooms_shares","posted_at":"2016-05-01T00:00:00Z"})";
}

}  // namespace

TEST_CASE("record file with 3 valid lines") {
  auto p = write_temp("ingest3.jsonl",
                      valid_line("a") + "\n" + valid_line("b") + "\n" +
                          valid_line("c") + "\n");
  CorpusSource src{SourceKind::record_file, p, std::nullopt};
  IngestResult r = read_record_file(src);
  CHECK(r.records.size() == 3);
  CHECK(r.stats.records_read == 3);
  CHECK(r.stats.records_valid == 3);
  CHECK(r.stats.records_skipped == 0);
  fs::remove(p);
}

TEST_CASE("malformed line skipped with reason, stream continues") {
  auto p = write_temp("ingest_bad.jsonl",
                      valid_line("a") + "\nnot json at all\n" + valid_line("b") +
                          "\n");
  CorpusSource src{SourceKind::record_file, p, std::nullopt};
  IngestResult r = read_record_file(src);
  CHECK(r.records.size() == 2);
  CHECK(r.stats.records_read == 3);
  CHECK(r.stats.records_skipped == 1);
  CHECK(r.stats.skip_reasons.at("parse_error") == 1);
  fs::remove(p);
}

TEST_CASE("empty file yields empty stream, zero stats") {
  auto p = write_temp("ingest_empty.jsonl", "");
  CorpusSource src{SourceKind::record_file, p, std::nullopt};
  IngestResult r = read_record_file(src);
  CHECK(r.records.empty());
  CHECK(r.stats.records_read == 0);
  CHECK(r.stats.records_valid == 0);
  CHECK(r.stats.records_skipped == 0);
  fs::remove(p);
}

TEST_CASE("unreadable file is fatal") {
  CorpusSource src{SourceKind::record_file, "/nonexistent/nope.jsonl",
                   std::nullopt};
  CHECK_THROWS_AS(read_record_file(src), std::runtime_error);
}

TEST_CASE("stats invariant: read = valid + skipped") {
  auto p = write_temp("ingest_mix.jsonl",
                      valid_line("a") + "\n{\"id\":\"x\"}\nbroken\n" +
                          valid_line("b") + "\n");
  CorpusSource src{SourceKind::record_file, p, std::nullopt};
  IngestResult r = read_record_file(src);
  CHECK(r.stats.records_read ==
        r.stats.records_valid + r.stats.records_skipped);
  fs::remove(p);
}

TEST_CASE("ingest is deterministic") {
  auto p = write_temp("ingest_det.jsonl",
                      valid_line("a") + "\nbroken\n" + valid_line("b") + "\n");
  CorpusSource src{SourceKind::record_file, p, std::nullopt};
  IngestResult r1 = read_record_file(src);
  IngestResult r2 = read_record_file(src);
  REQUIRE(r1.records.size() == r2.records.size());
  for (std::size_t i = 0; i < r1.records.size(); ++i)
    CHECK(record_to_json_line(r1.records[i]) ==
          record_to_json_line(r2.records[i]));
  CHECK(r1.stats.skip_reasons == r2.stats.skip_reasons);
  fs::remove(p);
}

TEST_CASE("parse_price") {
  CHECK(parse_price("$650") == 650.0);
  CHECK(parse_price("650") == 650.0);
  CHECK(parse_price("$1,200") == 1200.0);
  CHECK(parse_price(" $2,500 /mo") == 2500.0);
  CHECK_FALSE(parse_price("call me").has_value());
  CHECK_FALSE(parse_price("").has_value());
  CHECK_FALSE(parse_price("$").has_value());
}

static const char* kCapture = R"html(
<!doctype html>
<html><body data-subcategory="apts_housing_for_rent">
<ul>
<li class="result-row" data-id="r1">
  <a class="result-title">Sunny 1BR downtown</a>
  <span class="result-price">$650</span>
  <time datetime="2016-05-02T10:30:00Z">May 2</time>
  <span class="result-hood">(Capitol Hill)</span>
</li>
<li class="result-row" data-id="r2">
  <a class="result-title">420 friendly studio</a>
  <span class="result-price">$1,200</span>
  <time datetime="2016-05-03T09:00:00Z">May 3</time>
</li>
<li class="result-row" data-id="r3">
  <span class="result-price">$800</span>
  <time datetime="2016-05-04T09:00:00Z">May 4</time>
</li>
</ul>
</body></html>
)html";

TEST_CASE("html capture: titled rows become records, untitled skipped") {
  auto p = write_temp("capture.html", kCapture);
  CorpusSource src{SourceKind::html_capture, p,
                   GeoKey{"CO", std::string("Denver")}};
  IngestResult r = parse_html_capture(src);
  CHECK(r.stats.records_read == 3);
  CHECK(r.stats.records_valid == 2);
  CHECK(r.stats.skip_reasons.at("missing_title") == 1);
  REQUIRE(r.records.size() == 2);

  const AdRecord& first = r.records[0];
  CHECK(first.id == "r1");
  CHECK(first.title == "Sunny 1BR downtown");
  CHECK(first.price == 650.0);
  CHECK(first.city == "Capitol Hill");  // hood overrides default city
  CHECK(first.state == "CO");
  CHECK(first.posted_at == *parse_iso8601_utc("2016-05-02T10:30:00Z"));
  CHECK(first.subcategory == Subcategory::apts_housing_for_rent);

  const AdRecord& second = r.records[1];
  CHECK(second.price == 1200.0);
  CHECK(second.city == "Denver");  // default_geo fills missing hood
  fs::remove(p);
}

TEST_CASE("capture with zero rows is an empty stream, not an error") {
  auto p = write_temp("capture_empty.html", "<html><body></body></html>");
  CorpusSource src{SourceKind::html_capture, p, GeoKey{"CO", std::nullopt}};
  IngestResult r = parse_html_capture(src);
  CHECK(r.records.empty());
  CHECK(r.stats.records_read == 0);
  fs::remove(p);
}

TEST_CASE("capture tolerates unknown sibling nodes") {
  std::string html =
      "<div class=\"banner\">ads here</div>"
      "<div class=\"result-row\" data-id=\"z1\" data-subcategory=\"rooms & shares\">"
      "<script>junk()</script>"
      "<p class=\"result-title\">Cozy room</p>"
      "<em>unrelated</em>"
      "<time datetime=\"2016-06-01T00:00:00Z\">Jun 1</time>"
      "</div>";
  auto p = write_temp("capture_sib.html", html);
  CorpusSource src{SourceKind::html_capture, p,
                   GeoKey{"WA", std::string("Seattle")}};
  IngestResult r = parse_html_capture(src);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].title == "Cozy room");
  CHECK(r.records[0].subcategory == Subcategory::rooms_shares);
  CHECK_FALSE(r.records[0].price.has_value());
  fs::remove(p);
}

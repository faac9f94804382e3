#include "adsurveil/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace adsurveil {

namespace {

using nlohmann::json;

void tally_skip(IngestStats& stats, const std::string& reason) {
  stats.records_skipped += 1;
  stats.skip_reasons[reason] += 1;
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

RawAd raw_from_json(const json& j) {
  RawAd raw;
  raw.id = opt_string(j, "id");
  raw.url = opt_string(j, "url");
  raw.title = opt_string(j, "title");
  raw.body = opt_string(j, "body");
  if (auto it = j.find("price"); it != j.end() && it->is_number())
    raw.price = it->get<double>();
  if (auto it = j.find("bedrooms"); it != j.end() && it->is_number_integer())
    raw.bedrooms = it->get<int>();
  raw.category = opt_string(j, "category");
  raw.subcategory = opt_string(j, "subcategory");
  raw.state = opt_string(j, "state");
  raw.city = opt_string(j, "city");
  raw.posted_at = opt_string(j, "posted_at");
  return raw;
}

// ---- minimal tolerant HTML scanning for the capture schema ----

struct Tag {
  std::string name;
  std::map<std::string, std::string> attrs;
  bool closing = false;
  bool self_closing = false;
  std::size_t begin = 0;  // offset of '<'
  std::size_t end = 0;    // offset one past '>'
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Scans the next tag at or after `pos`. Returns false when none remain.
bool next_tag(std::string_view html, std::size_t pos, Tag& tag) {
  while (true) {
    std::size_t lt = html.find('<', pos);
    if (lt == std::string_view::npos) return false;
    std::size_t gt = html.find('>', lt);
    if (gt == std::string_view::npos) return false;
    std::string_view inner = html.substr(lt + 1, gt - lt - 1);
    if (inner.empty() || inner.front() == '!' || inner.front() == '?') {
      pos = gt + 1;  // comment/doctype, skip
      continue;
    }
    tag = Tag{};
    tag.begin = lt;
    tag.end = gt + 1;
    std::size_t i = 0;
    if (inner.front() == '/') {
      tag.closing = true;
      i = 1;
    }
    std::size_t name_start = i;
    while (i < inner.size() && (std::isalnum((unsigned char)inner[i]) || inner[i] == '-'))
      ++i;
    tag.name = lower(std::string(inner.substr(name_start, i - name_start)));
    if (!inner.empty() && inner.back() == '/') tag.self_closing = true;
    // attributes: name="value" pairs, whitespace separated
    while (i < inner.size()) {
      while (i < inner.size() && std::isspace((unsigned char)inner[i])) ++i;
      std::size_t an = i;
      while (i < inner.size() && inner[i] != '=' &&
             !std::isspace((unsigned char)inner[i]) && inner[i] != '/')
        ++i;
      if (i == an) { ++i; continue; }
      std::string aname = lower(std::string(inner.substr(an, i - an)));
      std::string aval;
      if (i < inner.size() && inner[i] == '=') {
        ++i;
        if (i < inner.size() && (inner[i] == '"' || inner[i] == '\'')) {
          char q = inner[i++];
          std::size_t vs = i;
          while (i < inner.size() && inner[i] != q) ++i;
          aval = std::string(inner.substr(vs, i - vs));
          if (i < inner.size()) ++i;
        } else {
          std::size_t vs = i;
          while (i < inner.size() && !std::isspace((unsigned char)inner[i]))
            ++i;
          aval = std::string(inner.substr(vs, i - vs));
        }
      }
      tag.attrs[aname] = aval;
    }
    return true;
  }
}

bool has_class(const Tag& tag, std::string_view cls) {
  auto it = tag.attrs.find("class");
  if (it == tag.attrs.end()) return false;
  std::istringstream ss(it->second);
  std::string word;
  while (ss >> word)
    if (word == cls) return true;
  return false;
}

// Finds the span of the element opened by `open` (content only), honoring
// nesting of the same tag name. Void elements get an empty span.
std::pair<std::size_t, std::size_t> element_content(std::string_view html,
                                                    const Tag& open) {
  if (open.self_closing) return {open.end, open.end};
  int depth = 1;
  std::size_t pos = open.end;
  Tag t;
  while (next_tag(html, pos, t)) {
    if (t.name == open.name) {
      depth += t.closing ? -1 : 1;
      if (depth == 0) return {open.end, t.begin};
    }
    pos = t.end;
  }
  return {open.end, html.size()};
}

std::string strip_tags(std::string_view fragment) {
  std::string out;
  bool in_tag = false;
  for (char c : fragment) {
    if (c == '<') in_tag = true;
    else if (c == '>') in_tag = false;
    else if (!in_tag) out.push_back(c);
  }
  // collapse whitespace
  std::string trimmed;
  bool gap = true;
  for (unsigned char c : out) {
    if (std::isspace(c)) {
      if (!gap && !trimmed.empty()) trimmed.push_back(' ');
      gap = true;
    } else {
      trimmed.push_back(static_cast<char>(c));
      gap = false;
    }
  }
  while (!trimmed.empty() && trimmed.back() == ' ') trimmed.pop_back();
  return trimmed;
}

struct FoundElement {
  Tag tag;
  std::string text;
};

// First descendant in [begin,end) matching predicate.
template <typename Pred>
std::optional<FoundElement> find_element(std::string_view html,
                                         std::size_t begin, std::size_t end,
                                         Pred pred) {
  std::size_t pos = begin;
  Tag t;
  while (next_tag(html, pos, t) && t.begin < end) {
    pos = t.end;
    if (t.closing) continue;
    if (pred(t)) {
      auto [cb, ce] = element_content(html, t);
      ce = std::min(ce, end);
      FoundElement fe;
      fe.tag = t;
      fe.text = strip_tags(html.substr(cb, ce - cb));
      return fe;
    }
  }
  return std::nullopt;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Strips a "(Denver)"-style wrapper from neighborhood text.
std::string strip_parens(std::string s) {
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')')
    s = s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

void IngestStats::merge(const IngestStats& other) {
  records_read += other.records_read;
  records_valid += other.records_valid;
  records_skipped += other.records_skipped;
  for (const auto& [reason, n] : other.skip_reasons) skip_reasons[reason] += n;
}

std::optional<double> parse_price(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace((unsigned char)text[i])) ++i;
  if (i < text.size() && text[i] == '$') ++i;
  std::string digits;
  bool seen = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit((unsigned char)c)) {
      digits.push_back(c);
      seen = true;
    } else if (c == ',' && seen) {
      // thousands separator, must be followed by a digit
      if (i + 1 >= text.size() || !std::isdigit((unsigned char)text[i + 1]))
        break;
    } else {
      break;
    }
  }
  if (!seen) return std::nullopt;
  return std::stod(digits);
}

IngestResult read_record_file(const CorpusSource& source) {
  std::ifstream in(source.path);
  if (!in)
    throw std::runtime_error("cannot open file: " + source.path.string());

  IngestResult result;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    result.stats.records_read += 1;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      tally_skip(result.stats, "parse_error");
      continue;
    }
    RawAd raw = raw_from_json(j);
    if (source.default_geo) {
      if (!raw.state) raw.state = source.default_geo->state;
      if (!raw.city && source.default_geo->city)
        raw.city = source.default_geo->city;
    }
    ValidationResult vr = validate_record(raw);
    if (!vr.ok()) {
      tally_skip(result.stats, "invalid:" + vr.errors.front());
      continue;
    }
    result.stats.records_valid += 1;
    result.records.push_back(std::move(*vr.record));
  }
  return result;
}

IngestResult parse_html_capture(const CorpusSource& source) {
  const std::string html = read_all(source.path);
  IngestResult result;

  // Document-level subcategory default, e.g. <body data-subcategory="...">.
  std::string doc_subcategory;
  {
    std::size_t pos = 0;
    Tag t;
    while (next_tag(html, pos, t)) {
      pos = t.end;
      if (t.closing) continue;
      auto it = t.attrs.find("data-subcategory");
      if (it != t.attrs.end()) {
        doc_subcategory = it->second;
        break;
      }
      if (has_class(t, "result-row")) break;
    }
  }

  std::size_t pos = 0;
  std::size_t row_index = 0;
  Tag t;
  while (next_tag(html, pos, t)) {
    pos = t.end;
    if (t.closing || !has_class(t, "result-row")) continue;
    auto [cb, ce] = element_content(html, t);
    result.stats.records_read += 1;
    row_index += 1;

    auto title = find_element(html, cb, ce,
                              [](const Tag& e) { return has_class(e, "result-title"); });
    if (!title || title->text.empty()) {
      tally_skip(result.stats, "missing_title");
      pos = ce;
      continue;
    }

    RawAd raw;
    raw.title = title->text;
    if (auto it = t.attrs.find("data-id"); it != t.attrs.end())
      raw.id = it->second;
    else
      raw.id = source.path.stem().string() + "#" + std::to_string(row_index);

    if (auto price_el = find_element(html, cb, ce, [](const Tag& e) {
          return has_class(e, "result-price");
        })) {
      raw.price = parse_price(price_el->text);
    }
    if (auto time_el = find_element(html, cb, ce, [](const Tag& e) {
          return e.name == "time" && e.attrs.count("datetime");
        })) {
      raw.posted_at = time_el->tag.attrs.at("datetime");
    }
    if (auto hood = find_element(html, cb, ce, [](const Tag& e) {
          return has_class(e, "result-hood");
        })) {
      std::string city = strip_parens(hood->text);
      if (!city.empty()) raw.city = city;
    }
    if (auto it = t.attrs.find("data-subcategory"); it != t.attrs.end())
      raw.subcategory = it->second;
    else if (!doc_subcategory.empty())
      raw.subcategory = doc_subcategory;

    if (source.default_geo) {
      if (!raw.state) raw.state = source.default_geo->state;
      if (!raw.city && source.default_geo->city)
        raw.city = source.default_geo->city;
    }

    ValidationResult vr = validate_record(raw);
    if (!vr.ok()) {
      tally_skip(result.stats, "invalid:" + vr.errors.front());
      pos = ce;
      continue;
    }
    result.stats.records_valid += 1;
    result.records.push_back(std::move(*vr.record));
    pos = ce;
  }
  return result;
}

std::string record_to_json_line(const AdRecord& record) {
  json j;
  j["id"] = record.id;
  if (record.url) j["url"] = *record.url;
  j["title"] = record.title;
  if (!record.body.empty()) j["body"] = record.body;
  if (record.price) j["price"] = *record.price;
  if (record.bedrooms) j["bedrooms"] = *record.bedrooms;
  j["category"] = "housing";
  j["subcategory"] = std::string(subcategory_id(record.subcategory));
  j["state"] = record.state;
  j["city"] = record.city;
  j["posted_at"] = format_iso8601_utc(record.posted_at);
  return j.dump();
}

void write_record_file(const std::filesystem::path& path,
                       const std::vector<AdRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write: " + path.string());
  for (const AdRecord& r : records) out << record_to_json_line(r) << '\n';
}

IngestResult ingest(const CorpusSource& source) {
  switch (source.kind) {
    case SourceKind::record_file: return read_record_file(source);
    case SourceKind::html_capture: return parse_html_capture(source);
  }
  throw std::logic_error("unknown source kind");
}

}  // namespace adsurveil

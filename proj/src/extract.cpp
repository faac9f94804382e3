#include "adsurveil/extract.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace adsurveil {

namespace {

bool is_marker(char c) {
  return c == '#' || c == '$' || c == ':' || c == '-' || c == '/';
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c);
  });
}

bool word_in(const std::string& w, std::initializer_list<const char*> set) {
  for (const char* s : set)
    if (w == s) return true;
  return false;
}

bool contains(const std::vector<std::string>& words, const std::string& w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

// A candidate match: pattern tokens aligned at token positions [first, last].
struct MatchSite {
  const MatchPattern* pattern = nullptr;
  std::size_t first = 0;
  std::size_t last = 0;
};

// ---- false-positive rules, each a pure predicate over the site ----

bool rule_hash_marker(const std::vector<Token>& toks, const MatchSite& m) {
  return toks[m.first].prev_marker == '#';
}

bool rule_unit_number(const std::vector<Token>& toks, const MatchSite& m) {
  if (!all_digits(toks[m.first].text)) return false;
  if (m.first == 0) return false;
  return word_in(toks[m.first - 1].text,
                 {"apt", "apartment", "unit", "suite", "ste", "rm", "bldg"});
}

bool rule_monetary(const std::vector<Token>& toks, const MatchSite& m) {
  if (!all_digits(toks[m.first].text)) return false;
  if (toks[m.first].prev_marker == '$') return true;
  if (m.last + 1 < toks.size()) {
    const std::string& next = toks[m.last + 1].text;
    if (word_in(next, {"bucks", "buck", "dollars", "dollar", "usd"}))
      return true;
    // "/month", "/mo" attach via the slash marker
    if (toks[m.last].next_marker == '/' && word_in(next, {"month", "mo"}))
      return true;
    // "420 per month", "420 a month"
    if (word_in(next, {"per", "a"}) && m.last + 2 < toks.size() &&
        word_in(toks[m.last + 2].text, {"month", "mo"}))
      return true;
  }
  return false;
}

bool rule_phone_shape(const std::vector<Token>& toks, const MatchSite& m) {
  if (!all_digits(toks[m.first].text)) return false;
  const Token& t = toks[m.first];
  if (t.prev_marker == '-' && m.first > 0 &&
      all_digits(toks[m.first - 1].text) &&
      toks[m.first - 1].next_marker == '-')
    return true;
  if (t.next_marker == '-' && m.last + 1 < toks.size() &&
      all_digits(toks[m.last + 1].text) &&
      toks[m.last + 1].prev_marker == '-')
    return true;
  return false;
}

bool rule_street_suffix(const std::vector<Token>& toks, const MatchSite& m) {
  if (!all_digits(toks[m.first].text)) return false;
  if (m.last + 1 >= toks.size()) return false;
  return word_in(toks[m.last + 1].text,
                 {"st", "street", "ave", "avenue", "blvd", "rd", "road", "dr",
                  "drive", "way", "ct", "court", "ln", "lane"});
}

bool rule_time_form(const std::vector<Token>& toks, const MatchSite& m) {
  if (!all_digits(toks[m.first].text)) return false;
  const Token& t = toks[m.first];
  if (t.prev_marker == ':' && m.first > 0 && all_digits(toks[m.first - 1].text))
    return true;
  if (t.next_marker == ':' && m.last + 1 < toks.size() &&
      all_digits(toks[m.last + 1].text))
    return true;
  return false;
}

bool rule_pot_compound(const std::vector<Token>& toks, const MatchSite& m) {
  if (m.pattern->group != TermGroup::T5_pot) return false;
  if (m.first > 0 &&
      word_in(toks[m.first - 1].text, {"coffee", "crock", "flower", "plant"}))
    return true;
  if (m.last + 1 < toks.size() &&
      word_in(toks[m.last + 1].text, {"rack", "holder", "roast"}))
    return true;
  return false;
}

using RuleFn = bool (*)(const std::vector<Token>&, const MatchSite&);

struct NamedRule {
  const char* name;
  RuleFn fn;
};

const NamedRule kRules[] = {
    {"hash_marker", rule_hash_marker},
    {"unit_number", rule_unit_number},
    {"monetary", rule_monetary},
    {"phone_shape", rule_phone_shape},
    {"street_suffix", rule_street_suffix},
    {"time_form", rule_time_form},
    {"pot_compound", rule_pot_compound},
};

bool suppressed(const Lexicon& lex, const std::vector<Token>& toks,
                const MatchSite& m) {
  for (const NamedRule& rule : kRules)
    if (lex.rule_on(rule.name) && rule.fn(toks, m)) return true;
  return false;
}

// Pattern tokens must be consecutive and separated only by whitespace or a
// single hyphen/slash ("420-friendly" matches "420 friendly").
bool gap_ok(std::string_view text, const Token& a, const Token& b) {
  for (std::size_t i = a.end; i < b.begin; ++i) {
    char c = text[i];
    if (!std::isspace((unsigned char)c) && c != '-' && c != '/') return false;
  }
  return true;
}

bool pattern_matches(std::string_view text, const std::vector<Token>& toks,
                     std::size_t at, const MatchPattern& p) {
  if (at + p.tokens.size() > toks.size()) return false;
  for (std::size_t k = 0; k < p.tokens.size(); ++k) {
    if (toks[at + k].text != p.tokens[k]) return false;
    if (k > 0 && !gap_ok(text, toks[at + k - 1], toks[at + k])) return false;
  }
  return true;
}

bool pattern_has_qualifier(const Lexicon& lex, const MatchPattern& p) {
  for (const std::string& t : p.tokens)
    if (contains(lex.qualifier_words, t)) return true;
  return false;
}

// Nearby context for a bare numeral: qualifier within 2 tokens after or
// negation within 2 tokens before.
bool bare_context_ok(const Lexicon& lex, const std::vector<Token>& toks,
                     const MatchSite& m) {
  for (std::size_t k = m.last + 1; k < toks.size() && k <= m.last + 2; ++k)
    if (contains(lex.qualifier_words, toks[k].text)) return true;
  for (std::size_t k = (m.first >= 2 ? m.first - 2 : 0); k < m.first; ++k)
    if (contains(lex.negation_words, toks[k].text)) return true;
  return false;
}

Polarity classify_polarity(const Lexicon& lex, const std::vector<Token>& toks,
                           const MatchSite& m) {
  // Qualifier: inside the pattern, or within 2 tokens after the match.
  bool has_qualifier = pattern_has_qualifier(lex, *m.pattern);
  std::size_t qualifier_pos = m.last;  // in-pattern counts as at the match
  if (!has_qualifier) {
    for (std::size_t k = m.last + 1; k < toks.size() && k <= m.last + 2; ++k) {
      if (contains(lex.qualifier_words, toks[k].text)) {
        has_qualifier = true;
        qualifier_pos = k;
        break;
      }
    }
  }
  // Negation before the match...
  for (std::size_t k = (m.first >= 2 ? m.first - 2 : 0); k < m.first; ++k)
    if (contains(lex.negation_words, toks[k].text)) return Polarity::prohibited;
  // ...or between the match and its qualifier.
  for (std::size_t k = m.last + 1; k < qualifier_pos; ++k)
    if (contains(lex.negation_words, toks[k].text)) return Polarity::prohibited;

  if (has_qualifier) return Polarity::friendly;
  return Polarity::neutral_mention;
}

void scan_field(const AdRecord& ad, AdField field, std::string_view text,
                const Lexicon& lex, std::vector<TermHit>& out) {
  const std::vector<Token> toks = tokenize(text);

  // Longest-leftmost: at each position try patterns by length descending.
  std::vector<const MatchPattern*> by_length;
  for (const MatchPattern& p : lex.patterns) by_length.push_back(&p);
  std::stable_sort(by_length.begin(), by_length.end(),
                   [](const MatchPattern* a, const MatchPattern* b) {
                     return a->tokens.size() > b->tokens.size();
                   });

  std::size_t i = 0;
  while (i < toks.size()) {
    bool advanced = false;
    for (const MatchPattern* p : by_length) {
      if (!pattern_matches(text, toks, i, *p)) continue;
      MatchSite site{p, i, i + p->tokens.size() - 1};
      if (suppressed(lex, toks, site)) continue;
      if (p->needs_context && !bare_context_ok(lex, toks, site)) continue;
      TermHit hit;
      hit.ad_id = ad.id;
      hit.group = p->group;
      hit.span_begin = toks[site.first].begin;
      hit.span_end = toks[site.last].end;
      hit.surface = std::string(
          text.substr(hit.span_begin, hit.span_end - hit.span_begin));
      hit.field = field;
      hit.polarity = classify_polarity(lex, toks, site);
      out.push_back(std::move(hit));
      i = site.last + 1;
      advanced = true;
      break;
    }
    if (!advanced) ++i;
  }
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isalnum((unsigned char)text[i])) {
      ++i;
      continue;
    }
    Token tok;
    tok.begin = i;
    while (i < text.size() && std::isalnum((unsigned char)text[i])) {
      tok.text.push_back(
          static_cast<char>(std::tolower((unsigned char)text[i])));
      ++i;
    }
    tok.end = i;
    if (tok.begin > 0 && is_marker(text[tok.begin - 1]))
      tok.prev_marker = text[tok.begin - 1];
    if (tok.end < text.size() && is_marker(text[tok.end]))
      tok.next_marker = text[tok.end];
    toks.push_back(std::move(tok));
  }
  return toks;
}

std::string_view polarity_label(Polarity p) {
  switch (p) {
    case Polarity::friendly: return "friendly";
    case Polarity::prohibited: return "prohibited";
    case Polarity::neutral_mention: return "neutral_mention";
  }
  return "";
}

Lexicon default_lexicon() {
  Lexicon lex;
  auto add = [&](TermGroup g, std::initializer_list<const char*> toks,
                 bool needs_context = false) {
    MatchPattern p;
    p.group = g;
    for (const char* t : toks) p.tokens.emplace_back(t);
    p.needs_context = needs_context;
    lex.patterns.push_back(std::move(p));
  };

  // Explicit "420 <qualifier>" variants; a bare "420" counts only when
  // qualified or negated nearby.
  add(TermGroup::T1_420_friendly, {"420", "friendly"});
  add(TermGroup::T1_420_friendly, {"420"}, /*needs_context=*/true);
  add(TermGroup::T2_marijuana, {"marijuana"});
  add(TermGroup::T3_mmj, {"mmj"});
  add(TermGroup::T4_cannabis, {"cannabis"});
  add(TermGroup::T5_pot, {"pot"});

  lex.qualifier_words = {"friendly", "ok", "okay", "allowed",
                         "fine",     "welcome", "permitted"};
  lex.negation_words = {"no", "not", "non", "never"};
  for (const std::string& name : false_positive_rule_names())
    lex.rule_enabled[name] = true;
  return lex;
}

const std::vector<std::string>& false_positive_rule_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const NamedRule& r : kRules) v.emplace_back(r.name);
    return v;
  }();
  return names;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open lexicon: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);

  Lexicon lex = default_lexicon();

  if (j.contains("groups")) {
    lex.patterns.clear();
    static const std::map<std::string, TermGroup> group_names = {
        {"t1_420_friendly", TermGroup::T1_420_friendly},
        {"t2_marijuana", TermGroup::T2_marijuana},
        {"t3_mmj", TermGroup::T3_mmj},
        {"t4_cannabis", TermGroup::T4_cannabis},
        {"t5_pot", TermGroup::T5_pot},
    };
    for (const auto& [name, patterns] : j.at("groups").items()) {
      auto it = group_names.find(name);
      if (it == group_names.end())
        throw std::runtime_error("unknown term group: " + name);
      for (const auto& entry : patterns) {
        MatchPattern p;
        p.group = it->second;
        if (entry.is_string()) {
          // split a phrase into lower-case tokens
          for (const Token& t : tokenize(entry.get<std::string>()))
            p.tokens.push_back(t.text);
        } else {
          p.tokens = entry.at("tokens").get<std::vector<std::string>>();
          p.needs_context = entry.value("needs_context", false);
        }
        if (p.tokens.empty())
          throw std::runtime_error("empty pattern in group " + name);
        if (p.tokens.size() == 1 && all_digits(p.tokens.front()) &&
            entry.is_string())
          p.needs_context = true;
        lex.patterns.push_back(std::move(p));
      }
    }
    for (const auto& [name, group] : group_names) {
      bool found = std::any_of(
          lex.patterns.begin(), lex.patterns.end(),
          [&](const MatchPattern& p) { return p.group == group; });
      if (!found)
        throw std::runtime_error("group has no patterns: " + name);
    }
  }
  if (j.contains("qualifier_words"))
    lex.qualifier_words = j.at("qualifier_words").get<std::vector<std::string>>();
  if (j.contains("negation_words"))
    lex.negation_words = j.at("negation_words").get<std::vector<std::string>>();
  if (j.contains("rules")) {
    for (const auto& [name, on] : j.at("rules").items()) {
      if (!std::count(false_positive_rule_names().begin(),
                      false_positive_rule_names().end(), name))
        throw std::runtime_error("unknown false-positive rule: " + name);
      lex.rule_enabled[name] = on.get<bool>();
    }
  }
  return lex;
}

std::vector<TermHit> extract_terms(const AdRecord& ad, const Lexicon& lexicon) {
  std::vector<TermHit> hits;
  scan_field(ad, AdField::title, ad.title, lexicon, hits);
  scan_field(ad, AdField::body, ad.body, lexicon, hits);
  return hits;
}

GroupCounts count_by_group(const std::vector<TermHit>& hits) {
  GroupCounts counts{};
  for (const TermHit& h : hits) counts[static_cast<int>(h.group)] += 1;
  return counts;
}

}  // namespace adsurveil

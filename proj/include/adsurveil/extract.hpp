#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "adsurveil/ad_model.hpp"

namespace adsurveil {

// A token is a maximal alphanumeric run. Marker characters (#, $, :, -, /)
// directly adjacent to the run are recorded so context rules can see them.
struct Token {
  std::string text;        // lower-cased
  std::size_t begin = 0;   // char offsets into the original string
  std::size_t end = 0;
  char prev_marker = 0;    // marker char immediately before, 0 if none
  char next_marker = 0;    // marker char immediately after, 0 if none
};

std::vector<Token> tokenize(std::string_view text);

struct MatchPattern {
  TermGroup group;
  std::vector<std::string> tokens;  // lower-case token sequence
  // A bare numeral pattern only counts with a qualifier/negation nearby.
  bool needs_context = false;
};

struct Lexicon {
  std::vector<MatchPattern> patterns;
  std::vector<std::string> qualifier_words;
  std::vector<std::string> negation_words;
  std::map<std::string, bool> rule_enabled;  // false-positive rule toggles

  bool rule_on(const std::string& name) const {
    auto it = rule_enabled.find(name);
    return it == rule_enabled.end() || it->second;
  }
};

// Ships the five term groups, "420 friendly" variants, qualifier/negation
// word lists, and all false-positive rules enabled.
Lexicon default_lexicon();

// Loads a lexicon config (JSON) and overlays it on the default: any of
// "groups", "qualifier_words", "negation_words", "rules" may be given.
Lexicon load_lexicon(const std::filesystem::path& path);

// Names of all false-positive rules, for config validation and reports.
const std::vector<std::string>& false_positive_rule_names();

enum class AdField { title, body };

enum class Polarity { friendly, prohibited, neutral_mention };

std::string_view polarity_label(Polarity p);

struct TermHit {
  std::string ad_id;
  TermGroup group = TermGroup::T1_420_friendly;
  std::string surface;     // exact text at span in the source field
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
  AdField field = AdField::title;
  Polarity polarity = Polarity::neutral_mention;
};

// Scans title then body. Lexicon matches surviving all enabled
// false-positive rules become hits; longest-leftmost, non-overlapping.
std::vector<TermHit> extract_terms(const AdRecord& ad, const Lexicon& lexicon);

using GroupCounts = std::array<std::size_t, kTermGroupCount>;

// Per-group totals across all hits, zero for absent groups.
GroupCounts count_by_group(const std::vector<TermHit>& hits);

}  // namespace adsurveil

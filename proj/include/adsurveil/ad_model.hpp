#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adsurveil {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

// Parses "YYYY-MM-DDTHH:MM:SSZ". Returns nullopt on any malformation.
std::optional<Timestamp> parse_iso8601_utc(std::string_view s);

// Formats a Timestamp back to "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601_utc(Timestamp t);

enum class Category {
  housing,
};

enum class Subcategory {
  rooms_shares,
  room_share_wanted,
  apts_housing_for_rent,
  sublets_temporary,
  office_commercial,
};

inline constexpr int kSubcategoryCount = 5;

// Canonical surface form, as it appears in report tables.
std::string_view subcategory_label(Subcategory s);

// Machine-friendly identifier (snake_case) used in config and CSV.
std::string_view subcategory_id(Subcategory s);

enum class TermGroup {
  T1_420_friendly,
  T2_marijuana,
  T3_mmj,
  T4_cannabis,
  T5_pot,
};

inline constexpr int kTermGroupCount = 5;

std::string_view term_group_label(TermGroup g);
std::string_view term_group_column(TermGroup g);

struct GeoKey {
  std::string state;                 // USPS code, always present
  std::optional<std::string> city;   // refines the state-level key

  bool operator==(const GeoKey&) const = default;
};

struct AdRecord {
  std::string id;
  std::optional<std::string> url;
  std::string title;
  std::string body;
  std::optional<double> price;     // US dollars per month
  std::optional<int> bedrooms;
  Category category = Category::housing;
  Subcategory subcategory = Subcategory::rooms_shares;
  std::string state;               // two-letter USPS code (50 states + DC)
  std::string city;
  Timestamp posted_at = 0;
};

// True for the 50 state codes plus "DC". Case-sensitive, expects upper case.
bool is_valid_state_code(std::string_view code);

// All 51 accepted codes in ascending order.
const std::vector<std::string>& all_state_codes();

// Unvalidated fields as read from an input source. Everything optional so
// the validator can report the complete violation list.
struct RawAd {
  std::optional<std::string> id;
  std::optional<std::string> url;
  std::optional<std::string> title;
  std::optional<std::string> body;
  std::optional<double> price;
  std::optional<int> bedrooms;
  std::optional<std::string> category;
  std::optional<std::string> subcategory;
  std::optional<std::string> state;
  std::optional<std::string> city;
  std::optional<std::string> posted_at;
};

struct ValidationResult {
  std::optional<AdRecord> record;       // set iff errors is empty
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

// Checks every constraint and reports all violations, not just the first.
ValidationResult validate_record(const RawAd& raw);

// Case-insensitive, punctuation-tolerant mapping of the five canonical
// housing subcategory labels. Returns nullopt for anything else.
std::optional<Subcategory> taxonomy_lookup(std::string_view label);

}  // namespace adsurveil

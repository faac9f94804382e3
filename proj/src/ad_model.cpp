#include "adsurveil/ad_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace adsurveil {

namespace {

const std::array<std::string_view, 51> kStateCodes = {
    "AK", "AL", "AR", "AZ", "CA", "CO", "CT", "DC", "DE", "FL", "GA",
    "HI", "IA", "ID", "IL", "IN", "KS", "KY", "LA", "MA", "MD", "ME",
    "MI", "MN", "MO", "MS", "MT", "NC", "ND", "NE", "NH", "NJ", "NM",
    "NV", "NY", "OH", "OK", "OR", "PA", "RI", "SC", "SD", "TN", "TX",
    "UT", "VA", "VT", "WA", "WI", "WV", "WY"};

// Days-from-civil, Howard Hinnant's algorithm.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const int yoe = static_cast<int>(y - era * 400);
  const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const int doe = static_cast<int>(z - era * 146097);
  const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe + era * 400);
  const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const int mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

// Collapses a free-form label to lowercase words separated by single spaces.
std::string fold_label(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  bool in_gap = true;
  for (unsigned char c : label) {
    if (std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
      in_gap = false;
    } else {
      if (!in_gap && !out.empty()) out.push_back(' ');
      in_gap = true;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace

std::optional<Timestamp> parse_iso8601_utc(std::string_view s) {
  // Fixed layout: 2016-05-01T00:00:00Z
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' ||
      s[13] != ':' || s[16] != ':' || s[19] != 'Z') {
    return std::nullopt;
  }
  int y, mo, d, h, mi, sec;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) ||
      !parse_int(s.substr(8, 2), d) || !parse_int(s.substr(11, 2), h) ||
      !parse_int(s.substr(14, 2), mi) || !parse_int(s.substr(17, 2), sec)) {
    return std::nullopt;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60) {
    return std::nullopt;
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec;
}

std::string format_iso8601_utc(Timestamp t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y, mo, d;
  civil_from_days(days, y, mo, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, mo, d,
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

std::string_view subcategory_label(Subcategory s) {
  switch (s) {
    case Subcategory::rooms_shares: return "rooms & shares";
    case Subcategory::room_share_wanted: return "room/share wanted";
    case Subcategory::apts_housing_for_rent: return "apts/housing for rent";
    case Subcategory::sublets_temporary: return "sublets & temporary";
    case Subcategory::office_commercial: return "office & commercial";
  }
  return "";
}

std::string_view subcategory_id(Subcategory s) {
  switch (s) {
    case Subcategory::rooms_shares: return "rooms_shares";
    case Subcategory::room_share_wanted: return "room_share_wanted";
    case Subcategory::apts_housing_for_rent: return "apts_housing_for_rent";
    case Subcategory::sublets_temporary: return "sublets_temporary";
    case Subcategory::office_commercial: return "office_commercial";
  }
  return "";
}

std::string_view term_group_label(TermGroup g) {
  switch (g) {
    case TermGroup::T1_420_friendly: return "420 friendly";
    case TermGroup::T2_marijuana: return "marijuana";
    case TermGroup::T3_mmj: return "mmj";
    case TermGroup::T4_cannabis: return "cannabis";
    case TermGroup::T5_pot: return "pot";
  }
  return "";
}

std::string_view term_group_column(TermGroup g) {
  switch (g) {
    case TermGroup::T1_420_friendly: return "t1_420_friendly";
    case TermGroup::T2_marijuana: return "t2_marijuana";
    case TermGroup::T3_mmj: return "t3_mmj";
    case TermGroup::T4_cannabis: return "t4_cannabis";
    case TermGroup::T5_pot: return "t5_pot";
  }
  return "";
}

bool is_valid_state_code(std::string_view code) {
  return std::binary_search(kStateCodes.begin(), kStateCodes.end(), code);
}

const std::vector<std::string>& all_state_codes() {
  static const std::vector<std::string> codes(kStateCodes.begin(),
                                              kStateCodes.end());
  return codes;
}

ValidationResult validate_record(const RawAd& raw) {
  ValidationResult result;
  auto& errors = result.errors;

  if (!raw.id || raw.id->empty()) errors.push_back("missing id");
  if (!raw.title || raw.title->empty()) errors.push_back("missing title");

  std::string state;
  if (!raw.state || raw.state->empty()) {
    errors.push_back("missing state");
  } else {
    state = *raw.state;
    std::transform(state.begin(), state.end(), state.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (!is_valid_state_code(state)) {
      errors.push_back("unknown state code: " + *raw.state);
    }
  }

  if (!raw.city || raw.city->empty()) errors.push_back("missing city");

  if (raw.price && *raw.price < 0) errors.push_back("negative price");
  if (raw.bedrooms && *raw.bedrooms < 0) errors.push_back("negative bedrooms");

  std::optional<Subcategory> sub;
  if (!raw.subcategory || raw.subcategory->empty()) {
    errors.push_back("missing subcategory");
  } else {
    sub = taxonomy_lookup(*raw.subcategory);
    if (!sub) errors.push_back("unknown subcategory: " + *raw.subcategory);
  }

  std::optional<Timestamp> ts;
  if (!raw.posted_at || raw.posted_at->empty()) {
    errors.push_back("missing posted_at");
  } else {
    ts = parse_iso8601_utc(*raw.posted_at);
    if (!ts) errors.push_back("malformed posted_at: " + *raw.posted_at);
  }

  if (!errors.empty()) return result;

  AdRecord rec;
  rec.id = *raw.id;
  rec.url = raw.url;
  rec.title = *raw.title;
  rec.body = raw.body.value_or("");
  rec.price = raw.price;
  rec.bedrooms = raw.bedrooms;
  rec.category = Category::housing;
  rec.subcategory = *sub;
  rec.state = state;
  rec.city = *raw.city;
  rec.posted_at = *ts;
  result.record = std::move(rec);
  return result;
}

std::optional<Subcategory> taxonomy_lookup(std::string_view label) {
  const std::string folded = fold_label(label);
  if (folded == "rooms shares") return Subcategory::rooms_shares;
  if (folded == "room share wanted") return Subcategory::room_share_wanted;
  if (folded == "apts housing for rent")
    return Subcategory::apts_housing_for_rent;
  if (folded == "sublets temporary") return Subcategory::sublets_temporary;
  if (folded == "office commercial") return Subcategory::office_commercial;
  return std::nullopt;
}

}  // namespace adsurveil

#include "adsurveil/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace adsurveil {

namespace {

using nlohmann::json;

std::string format_fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return buf;
}

// Prices are written without trailing zeros ("650", "1200.5").
std::string format_price(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  std::string s = format_fixed(v, 2);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::string csv_escape(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string render_rows_csv(const std::vector<ExtractionRow>& rows) {
  std::string out = "# schema: adsurveil.rows.v1\n";
  out +=
      "title,posted_at,state,city,price,subcategory,"
      "count_t1,count_t2,count_t3,count_t4,count_t5\n";
  for (const ExtractionRow& row : rows) {
    out += csv_escape(row.title);
    out += ',';
    out += format_iso8601_utc(row.posted_at);
    out += ',';
    out += row.state;
    out += ',';
    out += csv_escape(row.city);
    out += ',';
    out += row.price ? format_price(*row.price) : "NA";
    out += ',';
    out += subcategory_id(row.subcategory);
    for (std::size_t c : row.counts) {
      out += ',';
      out += std::to_string(c);
    }
    out += '\n';
  }
  return out;
}

std::string render_count_table_csv(const CountTable& table) {
  std::string out =
      "subcategory,t1_420_friendly,t2_marijuana,t3_mmj,t4_cannabis,t5_pot\n";
  for (int s = 0; s < kSubcategoryCount; ++s) {
    out += subcategory_id(static_cast<Subcategory>(s));
    for (std::size_t c : table.rows[s]) {
      out += ',';
      out += std::to_string(c);
    }
    out += '\n';
  }
  out += "TOTAL";
  for (std::size_t c : table.totals) {
    out += ',';
    out += std::to_string(c);
  }
  out += '\n';
  return out;
}

std::string render_count_table_text(const CountTable& table) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "subcategory";
  for (int g = 0; g < kTermGroupCount; ++g)
    out << std::right << std::setw(12)
        << term_group_label(static_cast<TermGroup>(g));
  out << '\n';
  for (int s = 0; s < kSubcategoryCount; ++s) {
    out << std::left << std::setw(24)
        << subcategory_label(static_cast<Subcategory>(s));
    for (std::size_t c : table.rows[s]) out << std::right << std::setw(12) << c;
    out << '\n';
  }
  out << std::left << std::setw(24) << "TOTAL";
  for (std::size_t c : table.totals) out << std::right << std::setw(12) << c;
  out << '\n';
  return out.str();
}

std::string render_state_rates_csv(const std::vector<StateRate>& rates) {
  std::string out = "state,ad_count,population,rate\n";
  for (const StateRate& sr : rates) {
    out += sr.state;
    out += ',';
    out += std::to_string(sr.ad_count);
    out += ',';
    out += std::to_string(sr.population);
    out += ',';
    out += format_fixed(sr.rate, 6);
    out += '\n';
  }
  return out;
}

std::string render_choropleth_csv(const std::vector<StateRate>& rates) {
  std::map<std::string, double> by_state;
  for (const StateRate& sr : rates) by_state[sr.state] = sr.rate;
  std::string out = "state,value\n";
  for (const std::string& state : all_state_codes()) {
    auto it = by_state.find(state);
    out += state;
    out += ',';
    out += format_fixed(it == by_state.end() ? 0.0 : it->second, 6);
    out += '\n';
  }
  return out;
}

std::string render_ranking_csv(const std::vector<StateRate>& ranking,
                               RankMetric by) {
  std::string out = "rank,state,metric_value\n";
  std::size_t rank = 1;
  for (const StateRate& sr : ranking) {
    out += std::to_string(rank++);
    out += ',';
    out += sr.state;
    out += ',';
    out += by == RankMetric::rate ? format_fixed(sr.rate, 6)
                                  : std::to_string(sr.ad_count);
    out += '\n';
  }
  return out;
}

std::string render_correlations_csv(const CorrelationTable& table) {
  std::string out = "window,cohort,r,note\n";
  for (const CorrelationEntry& e : table.entries) {
    out += std::string(signal_window_label(e.window));
    out += ',';
    out += std::string(cohort_label(e.cohort));
    out += ',';
    if (e.r) out += format_fixed(*e.r, 12);
    out += ',';
    out += csv_escape(e.note);
    out += '\n';
  }
  return out;
}

std::string render_hits_jsonl(const std::vector<TermHit>& hits) {
  std::string out;
  for (const TermHit& h : hits) {
    json j;
    j["ad_id"] = h.ad_id;
    j["group"] = term_group_column(h.group);
    j["surface"] = h.surface;
    j["span"] = {h.span_begin, h.span_end};
    j["field"] = h.field == AdField::title ? "title" : "body";
    j["polarity"] = polarity_label(h.polarity);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string render_filter_report_json(const FilterReport& dedup_report,
                                      const FilterReport& outlier_report) {
  json j;
  j["scope"] = "global";  // dedup runs globally within a run
  auto fill = [](const FilterReport& r) {
    json o;
    o["input_count"] = r.input_count;
    o["kept_count"] = r.kept_count;
    o["duplicates_removed"] = r.duplicates_removed;
    o["outliers_removed"] = r.outliers_removed;
    json clusters = json::array();
    for (const auto& [kept, removed] : r.duplicate_clusters)
      clusters.push_back({{"kept", kept}, {"removed", removed}});
    o["duplicate_clusters"] = clusters;
    return o;
  };
  j["dedup"] = fill(dedup_report);
  j["outliers"] = fill(outlier_report);
  return j.dump(2) + "\n";
}

}  // namespace adsurveil

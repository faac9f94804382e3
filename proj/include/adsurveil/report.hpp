#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adsurveil/analytics.hpp"
#include "adsurveil/dedup.hpp"
#include "adsurveil/extract.hpp"
#include "adsurveil/ingest.hpp"

namespace adsurveil {

// CSV field quoting per RFC 4180 (quote when the value contains a comma,
// quote, or newline).
std::string csv_escape(const std::string& value);

// Writes content to `<path>.tmp` in the target directory, then renames it
// into place. Either the full file appears or nothing does.
void atomic_write(const std::filesystem::path& path,
                  const std::string& content);

// rows.csv: schema-versioned header, then one row per ad. Absent prices
// render as "NA".
std::string render_rows_csv(const std::vector<ExtractionRow>& rows);

// count_table.csv: subcategory,t1..t5 rows plus a TOTAL row.
std::string render_count_table_csv(const CountTable& table);

// Fixed-width text rendering of a count table for terminal output.
std::string render_count_table_text(const CountTable& table);

// state_rates.csv: state,ad_count,population,rate
std::string render_state_rates_csv(const std::vector<StateRate>& rates);

// choropleth.csv: state,value for all 50 states + DC, 6 decimal places,
// zeros for states absent from the corpus.
std::string render_choropleth_csv(const std::vector<StateRate>& rates);

// ranking.csv: rank,state,metric_value in ranking order.
std::string render_ranking_csv(const std::vector<StateRate>& ranking,
                               RankMetric by);

// correlations.csv: window,cohort,r,note ("" r when undefined).
std::string render_correlations_csv(const CorrelationTable& table);

// hits.jsonl: one TermHit object per line.
std::string render_hits_jsonl(const std::vector<TermHit>& hits);

// filter_report.json
std::string render_filter_report_json(const FilterReport& dedup_report,
                                      const FilterReport& outlier_report);

}  // namespace adsurveil

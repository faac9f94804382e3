#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adsurveil/ad_model.hpp"
#include "adsurveil/extract.hpp"

namespace adsurveil {

// One row of the dataset table; counts come from count_by_group.
struct ExtractionRow {
  std::string id;
  std::string title;
  Timestamp posted_at = 0;
  std::string state;
  std::string city;
  std::optional<double> price;  // rendered "NA" when absent
  Subcategory subcategory = Subcategory::rooms_shares;
  GroupCounts counts{};

  std::size_t total_hits() const {
    std::size_t t = 0;
    for (std::size_t c : counts) t += c;
    return t;
  }
};

// One row per ad (including all-zero-count ads), ordered by
// (state, city, posted_at, id).
std::vector<ExtractionRow> build_rows(
    const std::vector<AdRecord>& ads,
    const std::map<std::string, GroupCounts>& counts_by_ad);

struct CountTable {
  // subcategory index x group index, plus a totals row of column sums.
  std::array<GroupCounts, kSubcategoryCount> rows{};
  GroupCounts totals{};
};

// Occurrence counts per subcategory per group. An empty filter set means
// all subcategories.
CountTable count_table(const std::vector<ExtractionRow>& rows,
                       const std::set<Subcategory>& filter = {});

// Parallel variant: partial tables over chunks merged with +. Must equal
// the single-pass result.
CountTable count_table_parallel(const std::vector<ExtractionRow>& rows,
                                const std::set<Subcategory>& filter = {},
                                unsigned workers = 0);

using PopulationTable = std::map<std::string, long long>;  // state -> residents

struct StateRate {
  std::string state;
  std::size_t ad_count = 0;  // ads with >= 1 hit
  long long population = 0;
  double rate = 0.0;         // ads per 100,000 residents
};

enum class NormalizeBy { population, listings };

// Throws std::runtime_error naming the state when a population entry is
// missing. With NormalizeBy::listings the denominator is the state's total
// listing count instead of residents.
std::vector<StateRate> state_rates(const std::vector<ExtractionRow>& rows,
                                   const PopulationTable& population,
                                   NormalizeBy mode = NormalizeBy::population);

enum class RankMetric { rate, ad_count };

// Descending by metric, ties broken by state code ascending.
std::vector<StateRate> top_n(std::vector<StateRate> rates, std::size_t n,
                             RankMetric by = RankMetric::rate);

// Sample Pearson correlation coefficient. Throws std::invalid_argument on
// length mismatch, length < 2, or zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Spearman rank correlation (Pearson over fractional ranks), offered as a
// robustness check.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

enum class SignalWindow { google_1y, google_3y, google_5y };

std::string_view signal_window_label(SignalWindow w);

struct SignalSeries {
  SignalWindow window = SignalWindow::google_1y;
  std::map<std::string, double> values;  // state -> interest score
};

enum class Cohort { all_states, top_10 };

std::string_view cohort_label(Cohort c);

struct CorrelationEntry {
  SignalWindow window = SignalWindow::google_1y;
  Cohort cohort = Cohort::all_states;
  std::optional<double> r;  // absent when the correlation is undefined
  std::string note;         // reason when r is absent
};

struct CorrelationTable {
  std::vector<CorrelationEntry> entries;
};

enum class CorrelationKind { pearson, spearman };

// One entry per (window, cohort); per-entry undefined correlations are
// recorded, not thrown. The top_10 cohort is selected by rate.
CorrelationTable correlation_table(const std::vector<StateRate>& rates,
                                   const std::vector<SignalSeries>& signals,
                                   CorrelationKind kind = CorrelationKind::pearson);

}  // namespace adsurveil

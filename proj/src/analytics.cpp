#include "adsurveil/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace adsurveil {

namespace {

void add_into(GroupCounts& dst, const GroupCounts& src) {
  for (int g = 0; g < kTermGroupCount; ++g) dst[g] += src[g];
}

void accumulate_row(CountTable& table, const ExtractionRow& row,
                    const std::set<Subcategory>& filter) {
  if (!filter.empty() && !filter.count(row.subcategory)) return;
  add_into(table.rows[static_cast<int>(row.subcategory)], row.counts);
  add_into(table.totals, row.counts);
}

CountTable merge_tables(const CountTable& a, const CountTable& b) {
  CountTable out = a;
  for (int s = 0; s < kSubcategoryCount; ++s) add_into(out.rows[s], b.rows[s]);
  add_into(out.totals, b.totals);
  return out;
}

std::vector<double> fractional_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double mean_rank = (static_cast<double>(i) + j) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<ExtractionRow> build_rows(
    const std::vector<AdRecord>& ads,
    const std::map<std::string, GroupCounts>& counts_by_ad) {
  std::vector<ExtractionRow> rows;
  rows.reserve(ads.size());
  for (const AdRecord& ad : ads) {
    ExtractionRow row;
    row.id = ad.id;
    row.title = ad.title;
    row.posted_at = ad.posted_at;
    row.state = ad.state;
    row.city = ad.city;
    row.price = ad.price;
    row.subcategory = ad.subcategory;
    if (auto it = counts_by_ad.find(ad.id); it != counts_by_ad.end())
      row.counts = it->second;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(),
            [](const ExtractionRow& a, const ExtractionRow& b) {
              return std::tie(a.state, a.city, a.posted_at, a.id) <
                     std::tie(b.state, b.city, b.posted_at, b.id);
            });
  return rows;
}

CountTable count_table(const std::vector<ExtractionRow>& rows,
                       const std::set<Subcategory>& filter) {
  CountTable table;
  for (const ExtractionRow& row : rows) accumulate_row(table, row, filter);
  return table;
}

CountTable count_table_parallel(const std::vector<ExtractionRow>& rows,
                                const std::set<Subcategory>& filter,
                                unsigned workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1 || rows.size() < 2 * workers)
    return count_table(rows, filter);

  const std::size_t chunk = (rows.size() + workers - 1) / workers;
  std::vector<std::future<CountTable>> parts;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    if (begin >= rows.size()) break;
    const std::size_t end = std::min(rows.size(), begin + chunk);
    parts.push_back(std::async(std::launch::async, [&rows, &filter, begin,
                                                    end] {
      CountTable part;
      for (std::size_t i = begin; i < end; ++i)
        accumulate_row(part, rows[i], filter);
      return part;
    }));
  }
  CountTable table;
  for (auto& f : parts) table = merge_tables(table, f.get());
  return table;
}

std::vector<StateRate> state_rates(const std::vector<ExtractionRow>& rows,
                                   const PopulationTable& population,
                                   NormalizeBy mode) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_state;
  // pair: (ads with >=1 hit, total listings)
  for (const ExtractionRow& row : rows) {
    auto& entry = per_state[row.state];
    if (row.total_hits() > 0) entry.first += 1;
    entry.second += 1;
  }

  std::vector<StateRate> rates;
  for (const auto& [state, counts] : per_state) {
    StateRate sr;
    sr.state = state;
    sr.ad_count = counts.first;
    if (mode == NormalizeBy::population) {
      auto it = population.find(state);
      if (it == population.end())
        throw std::runtime_error("no population entry for state: " + state);
      sr.population = it->second;
      sr.rate = static_cast<double>(sr.ad_count) /
                static_cast<double>(sr.population) * 100000.0;
    } else {
      sr.population = static_cast<long long>(counts.second);
      sr.rate = counts.second == 0
                    ? 0.0
                    : static_cast<double>(sr.ad_count) /
                          static_cast<double>(counts.second) * 100000.0;
    }
    rates.push_back(std::move(sr));
  }
  return rates;  // map iteration gives ascending state order
}

std::vector<StateRate> top_n(std::vector<StateRate> rates, std::size_t n,
                             RankMetric by) {
  std::sort(rates.begin(), rates.end(),
            [by](const StateRate& a, const StateRate& b) {
              if (by == RankMetric::rate) {
                if (a.rate != b.rate) return a.rate > b.rate;
              } else {
                if (a.ad_count != b.ad_count) return a.ad_count > b.ad_count;
              }
              return a.state < b.state;
            });
  if (rates.size() > n) rates.resize(n);
  return rates;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("pearson: need at least 2 points");

  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("spearman: length mismatch");
  return pearson(fractional_ranks(x), fractional_ranks(y));
}

std::string_view signal_window_label(SignalWindow w) {
  switch (w) {
    case SignalWindow::google_1y: return "google_1y";
    case SignalWindow::google_3y: return "google_3y";
    case SignalWindow::google_5y: return "google_5y";
  }
  return "";
}

std::string_view cohort_label(Cohort c) {
  switch (c) {
    case Cohort::all_states: return "all_states";
    case Cohort::top_10: return "top_10";
  }
  return "";
}

CorrelationTable correlation_table(const std::vector<StateRate>& rates,
                                   const std::vector<SignalSeries>& signals,
                                   CorrelationKind kind) {
  CorrelationTable table;

  std::vector<StateRate> all = rates;
  std::sort(all.begin(), all.end(),
            [](const StateRate& a, const StateRate& b) {
              return a.state < b.state;
            });
  std::vector<StateRate> top = top_n(rates, 10, RankMetric::rate);
  std::sort(top.begin(), top.end(),
            [](const StateRate& a, const StateRate& b) {
              return a.state < b.state;
            });

  for (const SignalSeries& signal : signals) {
    for (Cohort cohort : {Cohort::all_states, Cohort::top_10}) {
      const std::vector<StateRate>& cohort_rates =
          cohort == Cohort::all_states ? all : top;
      CorrelationEntry entry;
      entry.window = signal.window;
      entry.cohort = cohort;
      std::vector<double> xs, ys;
      bool missing = false;
      for (const StateRate& sr : cohort_rates) {
        auto it = signal.values.find(sr.state);
        if (it == signal.values.end()) {
          entry.note = "signal missing state: " + sr.state;
          missing = true;
          break;
        }
        xs.push_back(sr.rate);
        ys.push_back(it->second);
      }
      if (!missing) {
        try {
          entry.r = kind == CorrelationKind::pearson ? pearson(xs, ys)
                                                     : spearman(xs, ys);
        } catch (const std::invalid_argument& e) {
          entry.note = e.what();
        }
      }
      table.entries.push_back(std::move(entry));
    }
  }
  return table;
}

}  // namespace adsurveil

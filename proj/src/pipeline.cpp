#include "adsurveil/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "adsurveil/report.hpp"
#include "json.hpp"

namespace adsurveil {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute()) return path;
  return base / path;
}

Timestamp parse_config_time(const std::string& key, const std::string& value) {
  auto t = parse_iso8601_utc(value);
  if (!t) throw std::runtime_error("config: malformed timestamp in '" + key +
                                   "': " + value);
  return *t;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

struct StageClock {
  std::vector<StageTiming>& timings;
  std::string stage;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  ~StageClock() {
    timings.push_back(
        {stage, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count()});
  }
};

}  // namespace

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ADSURVEIL_LOG");
    if (!env) return LogLevel::warn;
    std::string s(env);
    if (s == "error") return LogLevel::error;
    if (s == "warn") return LogLevel::warn;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

void log(LogLevel level, const std::string& message) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= log_level())
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << message
              << "\n";
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error: " + std::string(e.what()));
  }
  const std::filesystem::path base = path.parent_path();

  PipelineConfig cfg;
  if (j.contains("sources")) {
    for (const auto& s : j.at("sources")) {
      CorpusSource src;
      const std::string kind = s.value("kind", "record_file");
      if (kind == "record_file") src.kind = SourceKind::record_file;
      else if (kind == "html_capture") src.kind = SourceKind::html_capture;
      else throw std::runtime_error("config: unknown source kind: " + kind);
      src.path = resolve(base, s.at("path").get<std::string>());
      if (s.contains("default_state")) {
        GeoKey geo;
        geo.state = s.at("default_state").get<std::string>();
        if (s.contains("default_city"))
          geo.city = s.at("default_city").get<std::string>();
        src.default_geo = geo;
      }
      cfg.sources.push_back(std::move(src));
    }
  }
  if (j.contains("lexicon"))
    cfg.lexicon_path = resolve(base, j.at("lexicon").get<std::string>());
  if (j.contains("min_price")) cfg.price_bounds.min = j.at("min_price").get<double>();
  if (j.contains("max_price")) cfg.price_bounds.max = j.at("max_price").get<double>();
  if (j.contains("population"))
    cfg.population_path = resolve(base, j.at("population").get<std::string>());
  if (j.contains("signals"))
    cfg.signals_path = resolve(base, j.at("signals").get<std::string>());
  if (j.contains("top_n")) cfg.top_n = j.at("top_n").get<std::size_t>();
  if (j.contains("out")) cfg.out_dir = resolve(base, j.at("out").get<std::string>());
  if (j.contains("normalize_by")) {
    const std::string mode = j.at("normalize_by").get<std::string>();
    if (mode == "population") cfg.normalize_by = NormalizeBy::population;
    else if (mode == "listings") cfg.normalize_by = NormalizeBy::listings;
    else throw std::runtime_error("config: unknown normalize_by: " + mode);
  }
  if (j.contains("correlation")) {
    const std::string kind = j.at("correlation").get<std::string>();
    if (kind == "pearson") cfg.correlation = CorrelationKind::pearson;
    else if (kind == "spearman") cfg.correlation = CorrelationKind::spearman;
    else throw std::runtime_error("config: unknown correlation: " + kind);
  }
  if (j.contains("since"))
    cfg.since = parse_config_time("since", j.at("since").get<std::string>());
  if (j.contains("until"))
    cfg.until = parse_config_time("until", j.at("until").get<std::string>());
  if (j.contains("workers")) cfg.workers = j.at("workers").get<unsigned>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

PopulationTable load_population(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open population table: " + path.string());
  PopulationTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() < 2) continue;
    if (fields[0] == "state") continue;  // header
    long long pop = 0;
    try {
      pop = std::stoll(fields[1]);
    } catch (...) {
      throw std::runtime_error("population table: bad count for " + fields[0]);
    }
    if (pop <= 0)
      throw std::runtime_error("population table: non-positive population for " +
                               fields[0]);
    table[fields[0]] = pop;
  }
  return table;
}

std::vector<SignalSeries> load_signals(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open signals file: " + path.string());
  SignalSeries s1, s3, s5;
  s1.window = SignalWindow::google_1y;
  s3.window = SignalWindow::google_3y;
  s5.window = SignalWindow::google_5y;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (first) {
      first = false;
      if (fields.size() < 4 || fields[0] != "state")
        throw std::runtime_error(
            "signals file: expected header state,google_1y,google_3y,google_5y");
      continue;
    }
    if (fields.size() < 4)
      throw std::runtime_error("signals file: short row: " + line);
    try {
      s1.values[fields[0]] = std::stod(fields[1]);
      s3.values[fields[0]] = std::stod(fields[2]);
      s5.values[fields[0]] = std::stod(fields[3]);
    } catch (...) {
      throw std::runtime_error("signals file: bad value in row: " + line);
    }
  }
  return {s1, s3, s5};
}

RunManifest run_pipeline(const PipelineConfig& config) {
  if (config.sources.empty()) throw std::runtime_error("no sources");

  RunManifest manifest;
  std::vector<std::filesystem::path> written;
  auto cleanup_partials = [&] {
    for (const auto& p : written) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  };

  try {
    // ingest
    std::vector<AdRecord> records;
    {
      StageClock clock{manifest.timings, "ingest"};
      for (const CorpusSource& source : config.sources) {
        IngestResult r = ingest(source);
        manifest.ingest_stats.merge(r.stats);
        records.insert(records.end(),
                       std::make_move_iterator(r.records.begin()),
                       std::make_move_iterator(r.records.end()));
      }
      log(LogLevel::info, "ingested " + std::to_string(records.size()) +
                              " records from " +
                              std::to_string(config.sources.size()) +
                              " source(s)");
    }

    // optional posting-time window
    if (config.since || config.until) {
      const std::size_t before = records.size();
      records.erase(std::remove_if(records.begin(), records.end(),
                                   [&](const AdRecord& ad) {
                                     if (config.since && ad.posted_at < *config.since)
                                       return true;
                                     if (config.until && ad.posted_at > *config.until)
                                       return true;
                                     return false;
                                   }),
                    records.end());
      log(LogLevel::info, "time window removed " +
                              std::to_string(before - records.size()) +
                              " records");
    }

    // dedup
    std::vector<AdRecord> kept;
    {
      StageClock clock{manifest.timings, "dedup"};
      DedupResult r = dedup(records);
      manifest.dedup_report = std::move(r.report);
      kept = std::move(r.kept);
    }

    // outlier filter
    {
      StageClock clock{manifest.timings, "outlier_filter"};
      DedupResult r = filter_outliers(kept, config.price_bounds);
      manifest.outlier_report = std::move(r.report);
      kept = std::move(r.kept);
    }

    // extract
    const Lexicon lexicon = config.lexicon_path
                                ? load_lexicon(*config.lexicon_path)
                                : default_lexicon();
    std::vector<TermHit> all_hits;
    std::map<std::string, GroupCounts> counts_by_ad;
    {
      StageClock clock{manifest.timings, "extract"};
      for (const AdRecord& ad : kept) {
        std::vector<TermHit> hits = extract_terms(ad, lexicon);
        if (!hits.empty()) {
          counts_by_ad[ad.id] = count_by_group(hits);
          all_hits.insert(all_hits.end(),
                          std::make_move_iterator(hits.begin()),
                          std::make_move_iterator(hits.end()));
        }
      }
      std::sort(all_hits.begin(), all_hits.end(),
                [](const TermHit& a, const TermHit& b) {
                  return std::tie(a.ad_id, a.field, a.span_begin) <
                         std::tie(b.ad_id, b.field, b.span_begin);
                });
      manifest.extraction_totals = count_by_group(all_hits);
      manifest.hit_ad_count = counts_by_ad.size();
    }

    // analytics
    std::vector<ExtractionRow> rows;
    CountTable full_table, office_table;
    std::vector<StateRate> rates;
    std::vector<StateRate> ranking;
    std::optional<CorrelationTable> correlations;
    {
      StageClock clock{manifest.timings, "analytics"};
      rows = build_rows(kept, counts_by_ad);
      manifest.rows_emitted = rows.size();
      full_table = count_table_parallel(rows, {}, config.workers);
      office_table =
          count_table(rows, {Subcategory::office_commercial});

      PopulationTable population;
      if (config.population_path)
        population = load_population(*config.population_path);
      else if (config.normalize_by == NormalizeBy::population)
        throw std::runtime_error(
            "population table required for population normalization");
      rates = state_rates(rows, population, config.normalize_by);
      ranking = top_n(rates, config.top_n, RankMetric::rate);

      if (config.signals_path) {
        correlations = correlation_table(
            rates, load_signals(*config.signals_path), config.correlation);
      } else {
        manifest.correlation_skipped = true;
      }
    }

    // reports
    {
      StageClock clock{manifest.timings, "report"};
      std::filesystem::create_directories(config.out_dir);
      auto emit = [&](const char* name, const std::string& content) {
        const std::filesystem::path path = config.out_dir / name;
        atomic_write(path, content);
        written.push_back(path);
      };
      emit("rows.csv", render_rows_csv(rows));
      emit("count_table.csv", render_count_table_csv(full_table));
      emit("office_commercial_table.csv", render_count_table_csv(office_table));
      emit("state_rates.csv", render_state_rates_csv(rates));
      emit("choropleth.csv", render_choropleth_csv(rates));
      emit("ranking.csv", render_ranking_csv(ranking, RankMetric::rate));
      if (correlations)
        emit("correlations.csv", render_correlations_csv(*correlations));
      emit("hits.jsonl", render_hits_jsonl(all_hits));
      emit("filter_report.json",
           render_filter_report_json(manifest.dedup_report,
                                     manifest.outlier_report));
      atomic_write(config.out_dir / "manifest.json",
                   render_manifest_json(config, manifest));
    }
  } catch (const std::exception&) {
    cleanup_partials();
    throw;
  }
  return manifest;
}

std::string render_manifest_json(const PipelineConfig& config,
                                 const RunManifest& manifest) {
  json j;
  j["schema_version"] = manifest.schema_version;

  json cfg;
  json sources = json::array();
  for (const CorpusSource& s : config.sources) {
    json src;
    src["kind"] = s.kind == SourceKind::record_file ? "record_file"
                                                    : "html_capture";
    src["path"] = s.path.string();
    if (s.default_geo) {
      src["default_state"] = s.default_geo->state;
      if (s.default_geo->city) src["default_city"] = *s.default_geo->city;
    }
    sources.push_back(std::move(src));
  }
  cfg["sources"] = sources;
  if (config.lexicon_path) cfg["lexicon"] = config.lexicon_path->string();
  cfg["min_price"] = config.price_bounds.min;
  cfg["max_price"] = config.price_bounds.max;
  if (config.population_path)
    cfg["population"] = config.population_path->string();
  if (config.signals_path) cfg["signals"] = config.signals_path->string();
  cfg["top_n"] = config.top_n;
  cfg["out"] = config.out_dir.string();
  cfg["normalize_by"] =
      config.normalize_by == NormalizeBy::population ? "population" : "listings";
  cfg["correlation"] =
      config.correlation == CorrelationKind::pearson ? "pearson" : "spearman";
  if (config.since) cfg["since"] = format_iso8601_utc(*config.since);
  if (config.until) cfg["until"] = format_iso8601_utc(*config.until);
  cfg["seed"] = config.seed;
  j["config"] = cfg;

  json ingest;
  ingest["records_read"] = manifest.ingest_stats.records_read;
  ingest["records_valid"] = manifest.ingest_stats.records_valid;
  ingest["records_skipped"] = manifest.ingest_stats.records_skipped;
  ingest["skip_reasons"] = manifest.ingest_stats.skip_reasons;
  j["ingest"] = ingest;

  auto filter_json = [](const FilterReport& r) {
    json o;
    o["input_count"] = r.input_count;
    o["kept_count"] = r.kept_count;
    o["duplicates_removed"] = r.duplicates_removed;
    o["outliers_removed"] = r.outliers_removed;
    return o;
  };
  j["dedup"] = filter_json(manifest.dedup_report);
  j["outliers"] = filter_json(manifest.outlier_report);

  json totals;
  for (int g = 0; g < kTermGroupCount; ++g)
    totals[std::string(term_group_column(static_cast<TermGroup>(g)))] =
        manifest.extraction_totals[g];
  j["extraction_totals"] = totals;
  j["hit_ad_count"] = manifest.hit_ad_count;
  j["rows_emitted"] = manifest.rows_emitted;
  j["correlation"] =
      manifest.correlation_skipped ? "skipped" : "computed";

  json timings = json::array();
  for (const StageTiming& t : manifest.timings)
    timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  j["timings"] = timings;
  return j.dump(2) + "\n";
}

}  // namespace adsurveil

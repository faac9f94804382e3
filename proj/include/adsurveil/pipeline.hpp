#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adsurveil/analytics.hpp"
#include "adsurveil/dedup.hpp"
#include "adsurveil/extract.hpp"
#include "adsurveil/ingest.hpp"

namespace adsurveil {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

// Reads ADSURVEIL_LOG (error|warn|info|debug); defaults to warn.
LogLevel log_level();
void log(LogLevel level, const std::string& message);

struct PipelineConfig {
  std::vector<CorpusSource> sources;
  std::optional<std::filesystem::path> lexicon_path;  // default embedded
  PriceBounds price_bounds;
  std::optional<std::filesystem::path> population_path;
  std::optional<std::filesystem::path> signals_path;
  std::size_t top_n = 10;
  std::filesystem::path out_dir = "out";
  NormalizeBy normalize_by = NormalizeBy::population;
  CorrelationKind correlation = CorrelationKind::pearson;
  std::optional<Timestamp> since;
  std::optional<Timestamp> until;
  unsigned workers = 0;       // 0 = hardware concurrency
  std::uint64_t seed = 0;     // reserved, the pipeline is deterministic
};

// Parses a JSON config file; relative paths resolve against the config
// file's directory. Throws std::runtime_error with the offending key.
PipelineConfig load_config(const std::filesystem::path& path);

// `state,population` two-column file, header optional.
PopulationTable load_population(const std::filesystem::path& path);

// `state,google_1y,google_3y,google_5y` with header.
std::vector<SignalSeries> load_signals(const std::filesystem::path& path);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  std::string schema_version = "adsurveil.manifest.v1";
  IngestStats ingest_stats;
  FilterReport dedup_report;
  FilterReport outlier_report;
  GroupCounts extraction_totals{};
  std::size_t rows_emitted = 0;
  std::size_t hit_ad_count = 0;
  bool correlation_skipped = false;
  std::vector<StageTiming> timings;
};

// Runs ingest -> dedup -> outlier filter -> extract -> analytics ->
// reports. All data files are written atomically; a fatal stage error
// aborts with the stage named and partial outputs removed.
RunManifest run_pipeline(const PipelineConfig& config);

std::string render_manifest_json(const PipelineConfig& config,
                                 const RunManifest& manifest);

}  // namespace adsurveil

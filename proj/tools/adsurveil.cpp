#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "adsurveil/pipeline.hpp"
#include "adsurveil/report.hpp"

namespace fs = std::filesystem;
using namespace adsurveil;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<double> min_price, max_price;
  std::optional<std::string> population, signals, out, normalize_by, lexicon;
  std::optional<std::size_t> top_n;
  std::optional<std::string> since, until;
  std::vector<std::string> inputs;
  std::vector<std::string> captures;
  std::optional<std::string> default_state, default_city;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "pipeline config file (JSON)");
  cmd->add_option("--input", flags.inputs,
                  "record file (JSONL), repeatable");
  cmd->add_option("--capture", flags.captures,
                  "saved HTML listing page, repeatable");
  cmd->add_option("--default-state", flags.default_state,
                  "state applied to records lacking geography");
  cmd->add_option("--default-city", flags.default_city,
                  "city applied to records lacking geography");
  cmd->add_option("--lexicon", flags.lexicon, "lexicon config (JSON)");
  cmd->add_option("--min-price", flags.min_price, "outlier lower bound");
  cmd->add_option("--max-price", flags.max_price, "outlier upper bound");
  cmd->add_option("--population", flags.population,
                  "state,population CSV");
  cmd->add_option("--signals", flags.signals,
                  "state,google_1y,google_3y,google_5y CSV");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--normalize-by", flags.normalize_by,
                  "population|listings");
  cmd->add_option("--top-n", flags.top_n, "ranking size");
  cmd->add_option("--since", flags.since, "posted_at lower bound (ISO-8601 UTC)");
  cmd->add_option("--until", flags.until, "posted_at upper bound (ISO-8601 UTC)");
}

// Config file first, then flags on top: flags win.
PipelineConfig build_config(const CommonFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config_path.empty()) cfg = load_config(flags.config_path);

  std::optional<GeoKey> geo;
  if (flags.default_state) {
    geo = GeoKey{*flags.default_state, flags.default_city};
  }
  for (const std::string& p : flags.inputs) {
    CorpusSource src;
    src.kind = SourceKind::record_file;
    src.path = p;
    src.default_geo = geo;
    cfg.sources.push_back(std::move(src));
  }
  for (const std::string& p : flags.captures) {
    CorpusSource src;
    src.kind = SourceKind::html_capture;
    src.path = p;
    src.default_geo = geo;
    cfg.sources.push_back(std::move(src));
  }
  if (flags.lexicon) cfg.lexicon_path = *flags.lexicon;
  if (flags.min_price) cfg.price_bounds.min = *flags.min_price;
  if (flags.max_price) cfg.price_bounds.max = *flags.max_price;
  if (flags.population) cfg.population_path = *flags.population;
  if (flags.signals) cfg.signals_path = *flags.signals;
  if (flags.out) cfg.out_dir = *flags.out;
  if (flags.top_n) cfg.top_n = *flags.top_n;
  if (flags.normalize_by) {
    if (*flags.normalize_by == "population")
      cfg.normalize_by = NormalizeBy::population;
    else if (*flags.normalize_by == "listings")
      cfg.normalize_by = NormalizeBy::listings;
    else
      throw std::runtime_error("--normalize-by must be population or listings");
  }
  auto parse_time = [](const std::string& flag, const std::string& v) {
    auto t = parse_iso8601_utc(v);
    if (!t) throw std::runtime_error(flag + ": malformed timestamp: " + v);
    return *t;
  };
  if (flags.since) cfg.since = parse_time("--since", *flags.since);
  if (flags.until) cfg.until = parse_time("--until", *flags.until);
  return cfg;
}

std::vector<AdRecord> ingest_all(const PipelineConfig& cfg,
                                 IngestStats& stats) {
  if (cfg.sources.empty()) throw std::runtime_error("no sources");
  std::vector<AdRecord> records;
  for (const CorpusSource& src : cfg.sources) {
    IngestResult r = ingest(src);
    stats.merge(r.stats);
    records.insert(records.end(), std::make_move_iterator(r.records.begin()),
                   std::make_move_iterator(r.records.end()));
  }
  return records;
}

void ensure_out(const fs::path& dir) { fs::create_directories(dir); }

std::vector<AdRecord> read_kept(const fs::path& path) {
  CorpusSource src;
  src.kind = SourceKind::record_file;
  src.path = path;
  return read_record_file(src).records;
}

int cmd_ingest(const CommonFlags& flags) {
  PipelineConfig cfg = build_config(flags);
  IngestStats stats;
  std::vector<AdRecord> records = ingest_all(cfg, stats);
  ensure_out(cfg.out_dir);
  write_record_file(cfg.out_dir / "records.jsonl", records);
  std::cout << "read=" << stats.records_read << " valid=" << stats.records_valid
            << " skipped=" << stats.records_skipped << "\n";
  for (const auto& [reason, n] : stats.skip_reasons)
    std::cout << "  skip " << reason << ": " << n << "\n";
  return 0;
}

int cmd_dedup(const CommonFlags& flags) {
  PipelineConfig cfg = build_config(flags);
  std::vector<AdRecord> records;
  if (!cfg.sources.empty()) {
    IngestStats stats;
    records = ingest_all(cfg, stats);
  } else {
    records = read_kept(cfg.out_dir / "records.jsonl");
  }
  DedupResult d = dedup(records);
  DedupResult o = filter_outliers(d.kept, cfg.price_bounds);
  ensure_out(cfg.out_dir);
  write_record_file(cfg.out_dir / "kept.jsonl", o.kept);
  atomic_write(cfg.out_dir / "filter_report.json",
               render_filter_report_json(d.report, o.report));
  std::cout << "input=" << d.report.input_count
            << " kept=" << o.report.kept_count
            << " duplicates_removed=" << d.report.duplicates_removed
            << " outliers_removed=" << o.report.outliers_removed << "\n";
  return 0;
}

int cmd_extract(const CommonFlags& flags) {
  PipelineConfig cfg = build_config(flags);
  std::vector<AdRecord> records;
  if (!cfg.sources.empty()) {
    IngestStats stats;
    records = ingest_all(cfg, stats);
  } else {
    records = read_kept(cfg.out_dir / "kept.jsonl");
  }
  const Lexicon lexicon =
      cfg.lexicon_path ? load_lexicon(*cfg.lexicon_path) : default_lexicon();
  std::vector<TermHit> all_hits;
  for (const AdRecord& ad : records) {
    std::vector<TermHit> hits = extract_terms(ad, lexicon);
    all_hits.insert(all_hits.end(), std::make_move_iterator(hits.begin()),
                    std::make_move_iterator(hits.end()));
  }
  std::sort(all_hits.begin(), all_hits.end(),
            [](const TermHit& a, const TermHit& b) {
              return std::tie(a.ad_id, a.field, a.span_begin) <
                     std::tie(b.ad_id, b.field, b.span_begin);
            });
  ensure_out(cfg.out_dir);
  atomic_write(cfg.out_dir / "hits.jsonl", render_hits_jsonl(all_hits));
  GroupCounts totals = count_by_group(all_hits);
  for (int g = 0; g < kTermGroupCount; ++g)
    std::cout << term_group_column(static_cast<TermGroup>(g)) << "="
              << totals[g] << (g + 1 < kTermGroupCount ? " " : "\n");
  return 0;
}

int cmd_run(const CommonFlags& flags) {
  PipelineConfig cfg = build_config(flags);
  RunManifest manifest = run_pipeline(cfg);
  std::cout << "kept=" << manifest.outlier_report.kept_count
            << " hit_ads=" << manifest.hit_ad_count << " outputs in "
            << cfg.out_dir.string() << "\n";
  return 0;
}

// aggregate / correlate / report re-run the deterministic pipeline up to
// the requested stage; aggregate and correlate additionally require their
// input files.
int cmd_aggregate(const CommonFlags& flags) { return cmd_run(flags); }

int cmd_correlate(const CommonFlags& flags) {
  PipelineConfig cfg = build_config(flags);
  if (!cfg.signals_path)
    throw std::runtime_error("correlate requires --signals");
  return cmd_run(flags);
}

int cmd_report(const CommonFlags& flags) {
  PipelineConfig cfg = build_config(flags);
  std::ifstream in(cfg.out_dir / "count_table.csv");
  if (!in) {
    // no prior run output, produce it
    run_pipeline(cfg);
    in.open(cfg.out_dir / "count_table.csv");
    if (!in) throw std::runtime_error("pipeline produced no count table");
  }
  // parse the CSV back and print the formatted table
  CountTable table;
  std::string line;
  std::getline(in, line);  // header
  int row = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    GroupCounts counts{};
    for (int g = 0; g < kTermGroupCount; ++g) {
      std::getline(ss, field, ',');
      counts[g] = std::stoull(field);
    }
    if (row < kSubcategoryCount) table.rows[row] = counts;
    else table.totals = counts;
    ++row;
  }
  std::cout << render_count_table_text(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classified-ad marijuana-term surveillance pipeline"};
  app.require_subcommand(1);

  CommonFlags flags;
  const char* names[] = {"ingest", "dedup",  "extract", "aggregate",
                         "correlate", "report", "run"};
  const char* descs[] = {
      "parse sources into validated records",
      "remove duplicates and price outliers",
      "extract term hits from a corpus",
      "build count tables, rates, rankings and choropleth data",
      "correlate state rates against search-interest signals",
      "print formatted report tables",
      "full pipeline: ingest through reports"};
  std::map<std::string, CLI::App*> cmds;
  for (int i = 0; i < 7; ++i) {
    CLI::App* cmd = app.add_subcommand(names[i], descs[i]);
    add_common(cmd, flags);
    cmds[names[i]] = cmd;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmds["ingest"]->parsed()) return cmd_ingest(flags);
    if (cmds["dedup"]->parsed()) return cmd_dedup(flags);
    if (cmds["extract"]->parsed()) return cmd_extract(flags);
    if (cmds["aggregate"]->parsed()) return cmd_aggregate(flags);
    if (cmds["correlate"]->parsed()) return cmd_correlate(flags);
    if (cmds["report"]->parsed()) return cmd_report(flags);
    if (cmds["run"]->parsed()) return cmd_run(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adsurveil/ad_model.hpp"

namespace adsurveil {

enum class SourceKind {
  record_file,   // one JSON object per line
  html_capture,  // saved listing page, simplified capture schema
};

struct CorpusSource {
  SourceKind kind = SourceKind::record_file;
  std::filesystem::path path;
  std::optional<GeoKey> default_geo;  // fills missing state/city
};

struct IngestStats {
  std::size_t records_read = 0;
  std::size_t records_valid = 0;
  std::size_t records_skipped = 0;
  std::map<std::string, std::size_t> skip_reasons;

  void merge(const IngestStats& other);
};

struct IngestResult {
  std::vector<AdRecord> records;
  IngestStats stats;
};

// Extracts the leading monetary amount from "$650", "650", "$1,200".
// Absent for non-monetary text.
std::optional<double> parse_price(std::string_view text);

// Reads a line-delimited record file. Malformed lines are skipped and
// tallied, never abort the stream. Throws std::runtime_error if the file
// cannot be opened.
IngestResult read_record_file(const CorpusSource& source);

// Parses a saved listing page. One AdRecord per `result-row` element;
// rows without a title are skipped. Throws std::runtime_error if the file
// cannot be opened.
IngestResult parse_html_capture(const CorpusSource& source);

// Dispatches on source.kind.
IngestResult ingest(const CorpusSource& source);

// One JSON object, no trailing newline. Inverse of the record-file line
// format: read_record_file(serialize(ads)) yields the same records.
std::string record_to_json_line(const AdRecord& record);

// Writes one record per line to `path` (not atomic; callers that need
// atomicity go through report::atomic_write).
void write_record_file(const std::filesystem::path& path,
                       const std::vector<AdRecord>& records);

}  // namespace adsurveil

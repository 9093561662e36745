#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmflab/montecarlo.hpp"

namespace rmflab {

/*!
 * One exported number.
 *
 * `experiment` names the run (moments, signprob, ...), `quantity` the value
 * inside it (e.g. "E|M|^q", "rho_1_2", "exact"). Exact quantities carry
 * ci_lo == ci_hi == point and n_samples == 0. NaN means "undefined".
 */
struct ResultRecord {
  std::string experiment;
  std::string quantity;
  std::string model;
  double x = 0.0;
  int N = 0;
  double q = 0.0;
  double point = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  RegimeFlags regime;

  bool operator==(const ResultRecord&) const = default;
};

ResultRecord make_record(std::string experiment, std::string quantity, std::string model, double x,
                         int N, double q, const EstimateWithCI& estimate);
ResultRecord exact_record(std::string experiment, std::string quantity, std::string model, double x,
                          int N, double q, double value);

enum class RecordFormat { csv, jsonl };

/// "csv" or "jsonl" (also "json-lines"); ParameterError otherwise.
RecordFormat parse_format(const std::string& name);

/// Fixed CSV header line (no trailing newline).
const std::string& csv_header();

/// %.17g, or empty for NaN.
std::string format_number(double v);

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records);
/// One JSON object per line; each carries the manifest file name and run id.
void write_jsonl(std::ostream& out, const std::vector<ResultRecord>& records,
                 const std::string& manifest_ref, const std::string& run_id);

/// Parse what write_csv / write_jsonl produced. ParameterError on malformed input.
std::vector<ResultRecord> read_csv(std::istream& in);
std::vector<ResultRecord> read_jsonl(std::istream& in);

/// Everything needed to rerun a command bit-exactly, plus the wall time.
struct RunManifest {
  std::string command;
  /// Flat key/value echo of the effective configuration, in sorted key order.
  std::vector<std::pair<std::string, std::string>> plan;
  std::string seed_source;
  std::uint64_t master_seed = 0;
  /// Per-experiment seeds (all derive from the master seed).
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::vector<std::string> notes;
  double wall_time_seconds = 0.0;

  /// Hex digest of everything except the wall time.
  std::string run_id() const;
  std::string to_json() const;
};

/// Path of the manifest written next to `out`.
std::filesystem::path manifest_path_for(const std::filesystem::path& out);

/*!
 * Writes the records to `out` in `format` and the manifest next to it.
 * Throws ResourceError if either file cannot be written; a partially
 * written file is removed.
 */
void export_records(const std::filesystem::path& out, RecordFormat format,
                    const std::vector<ResultRecord>& records, const RunManifest& manifest);

}  // namespace rmflab

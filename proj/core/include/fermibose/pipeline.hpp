#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fermibose/config.hpp"
#include "fermibose/observables.hpp"
#include "fermibose/shard.hpp"

namespace fermibose {

/// Environment variable that relative output directories resolve against.
inline constexpr const char* kOutputRootEnv = "FERMIBOSE_OUTPUT_ROOT";

/// A row the run computes; `keep` rows retain full vectors for tables,
/// the others only contribute their norm to the atom-number sweep.
struct WorkItem {
  RowRequest row;
  bool keep = false;
};

struct ResolvedSlice {
  SliceSpec spec;
  std::size_t reference = 0;  ///< linear index of spec.reference
};

/// Everything derived from a configuration before any row is propagated.
struct PreparedRun {
  RunConfig config;
  std::string config_text;
  std::filesystem::path config_base;
  std::uint64_t config_hash = 0;

  GridSpec grid = GridSpec::from_spacing(1, 0, 1.0);
  std::size_t coefficients_total = 0;  ///< nonzero coefficients before truncation
  std::size_t coefficients_kept = 0;
  double molecule_number = 0.0;        ///< N0 = sum |g_k|^2 before truncation
  std::shared_ptr<const SystemOperator> op;
  KrylovConfig krylov;                 ///< config values with the norm estimate filled in

  std::vector<IndexPair> mode_pairs;   ///< (k, -k) for every mode when modes are requested
  std::vector<IndexPair> pairs;
  std::vector<ResolvedSlice> slices;
  RowPlan retained;                    ///< rows the tables read, and how to rebuild them
  bool axis_mirrors = false;           ///< coupling is even in every axis separately
  SweepPlan sweep;                     ///< atom-number sweep, when requested
  std::vector<WorkItem> work;          ///< sorted; shards index into this list
};

PreparedRun prepare_run(RunConfig config, std::string config_text,
                        const std::filesystem::path& config_base);
PreparedRun prepare_run(const std::filesystem::path& config_path);

/// Propagates work items [range.start, range.end).
std::vector<RowRecord> compute_records(const PreparedRun& run, ShardRange range, int threads,
                                       std::size_t chunk = 64);

struct RunResult {
  std::vector<double> times;
  std::vector<MomentTable> modes;               ///< per time, when requested
  std::vector<MomentTable> pairs;               ///< per time, when requested
  std::vector<std::vector<SliceTable>> slices;  ///< [slice][time]
  std::vector<double> atoms_per_spin;           ///< per time, when requested
  ExpvStats stats;
};

/// Builds the observables from records covering the whole work list.
/// Throws ConfigError listing missing or duplicated work rows.
RunResult assemble(const PreparedRun& run, std::vector<RowRecord> records);

/// Writes CSV tables and manifest.json into `dir`.
void write_outputs(const PreparedRun& run, const RunResult& result, const std::filesystem::path& dir);

/// Output directory of a run: absolute paths as given, relative ones under
/// $FERMIBOSE_OUTPUT_ROOT (or the working directory).
std::filesystem::path resolve_output_dir(const RunConfig& config);

struct RunOverrides {
  std::optional<int> threads;
  std::optional<std::size_t> row_start;
  std::optional<std::size_t> row_end;
};

struct SimulateSummary {
  std::filesystem::path output_dir;
  bool sharded = false;
  std::size_t work_rows = 0;
  double wall_seconds = 0.0;
};

/// Runs a configuration end to end. A sharded run writes one shard file;
/// otherwise tables and the manifest are written directly.
SimulateSummary simulate(const std::filesystem::path& config_path, const RunOverrides& overrides = {});

/// Merges every shard file in `dir` and writes the tables there.
SimulateSummary merge(const std::filesystem::path& dir);

enum class OracleKind { uniform, golden_rule, cl_asymptote };
OracleKind parse_oracle(const std::string& name);
const char* to_string(OracleKind kind) noexcept;

struct OracleLine {
  double time = 0.0;  ///< t / t0; negative when the line is not tied to one time
  std::string quantity;
  double max_residual = 0.0;
  double rms_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct OracleReport {
  OracleKind kind = OracleKind::uniform;
  std::vector<OracleLine> lines;
  std::vector<std::string> notes;
  bool pass() const;
};

/// Runs the configuration in memory and compares it with a closed-form
/// reference. Throws ConfigError if the oracle does not apply.
OracleReport compare_oracle(const std::filesystem::path& config_path, OracleKind kind,
                            const RunOverrides& overrides = {});
OracleReport compare_oracle(const PreparedRun& run, OracleKind kind, int threads);

void write_report(std::ostream& out, const OracleReport& report);

}  // namespace fermibose

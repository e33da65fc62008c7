#ifndef ONEBIT_HARNESS_HPP
#define ONEBIT_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "onebit/config.hpp"
#include "onebit/core_model.hpp"
#include "onebit/probes.hpp"
#include "onebit/recon.hpp"

namespace onebit {

inline constexpr std::string_view kLibraryVersion = "1.0.0";
inline constexpr std::string_view kCsvHeader =
    "algorithm,m,N,s,trial_index,final_l2_error,iterations_used,sign_agreement,stop_reason,"
    "wall_time_ms";

enum class Algorithm { nbiht, biht, one_shot, iht };
enum class InitKind { random_sparse, matched_filter };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);
std::string to_string(InitKind init);
InitKind parse_init_kind(std::string_view name);

struct SweepConfig {
  Index n = 512;
  Index s = 4;
  std::vector<Index> m_grid{256, 512, 1024, 2048, 4096, 8192};
  std::vector<Algorithm> algorithms{Algorithm::nbiht, Algorithm::one_shot};
  Index trials_per_cell = 50;
  std::uint64_t master_seed = 0;
  double step_size = kUnbiasedStep;
  int max_iters = 300;
  double stop_tol = 1e-10;
  InitKind init = InitKind::random_sparse;
  DegeneratePolicy degenerate_policy = DegeneratePolicy::keep_previous;
  double noise_std = 0.0;
  SupportRule support_rule = SupportRule::uniform_random;
  ValueRule value_rule = ValueRule::gaussian;
  // 0 selects the number of logical processors. Not part of the result.
  int workers = 0;
  TheoryConstants constants;

  void validate() const;
};

/// Seeds of one (m, trial) cell. The cell seed is split_seed(master, cell
/// index) with cell index = m_position * trials + trial; the four
/// substreams are split_seed(cell_seed, 0..3).
struct CellSeeds {
  Index m = 0;
  Index trial = 0;
  std::uint64_t cell = 0;
  std::uint64_t signal = 0;
  std::uint64_t matrix = 0;
  std::uint64_t init = 0;
  std::uint64_t noise = 0;
};

CellSeeds cell_seeds(std::uint64_t master_seed, std::size_t m_position, Index m,
                     Index trials_per_cell, Index trial);

struct SweepRecord {
  std::string algorithm;
  Index m = 0;
  Index n = 0;
  Index s = 0;
  Index trial_index = 0;
  double final_l2_error = 0.0;
  int iterations_used = 0;
  double sign_agreement = 0.0;
  std::string stop_reason;
  double wall_time_ms = 0.0;
};

/// Field-wise equality ignoring wall_time_ms; doubles compared bitwise.
bool same_outcome(const SweepRecord& a, const SweepRecord& b);

struct RunManifest {
  SweepConfig config;
  std::string rng_algorithm;
  std::string library_version;
  std::string timestamp;
  std::vector<CellSeeds> cells;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // sorted by (algorithm, m, trial_index)
  RunManifest manifest;
};

/// Runs every (algorithm, m, trial). Within a cell all algorithms see the
/// same signal, ensemble and bits. Algorithm failures are written into
/// stop_reason as "error:<message>" and never abort the sweep.
SweepResult run_sweep(const SweepConfig& cfg);

/// The single-instance body of a sweep cell, exposed for `recover`.
SweepRecord run_instance(Algorithm algorithm, const SweepConfig& cfg, const CellSeeds& seeds);

enum class ErrorStat { median, mean };
std::string to_string(ErrorStat stat);
ErrorStat parse_error_stat(std::string_view name);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<Index> m_values;
  std::vector<double> stat_values;
};

/// Per-m error statistic of one algorithm (non-finite errors skipped).
std::map<Index, double> error_by_m(const std::vector<SweepRecord>& records,
                                   std::string_view algorithm, ErrorStat stat);

/// OLS of log(error statistic) on log(m). Needs >= 3 distinct m values.
SlopeFit fit_slope(const std::vector<SweepRecord>& records, std::string_view algorithm,
                   ErrorStat stat = ErrorStat::median);

std::string records_to_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> records_from_csv(std::string_view text);

/// Sweep settings under [sweep] using the CLI key names; metadata under
/// [manifest]; per-cell seeds under [seeds].
IniDocument manifest_to_ini(const RunManifest& manifest);
std::string manifest_to_text(const RunManifest& manifest);

/// Applies recognised [sweep] keys (CLI flag names) onto cfg.
void apply_sweep_keys(const std::map<std::string, std::string>& keys, SweepConfig& cfg);
std::map<std::string, std::string> sweep_keys(const SweepConfig& cfg);

struct ReportOptions {
  bool overlay_theory = true;
  ErrorStat stat = ErrorStat::median;
};

struct ReportPaths {
  std::filesystem::path csv;
  std::filesystem::path manifest;
  std::filesystem::path plot;  // empty when there were no records
};

/// Log-log SVG of the error statistic against m, one polyline per algorithm.
std::string render_svg(const std::vector<SweepRecord>& records, const RunManifest& manifest,
                       const ReportOptions& options = {});

/// Writes records.csv, manifest.ini and error_vs_m.svg into out_dir.
ReportPaths emit_report(const std::vector<SweepRecord>& records, const RunManifest& manifest,
                        const std::filesystem::path& out_dir, const ReportOptions& options = {});

}  // namespace onebit

#endif  // ONEBIT_HARNESS_HPP

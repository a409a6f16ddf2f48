#pragma once

// Replica orchestration for the verification experiments: seed derivation,
// parallel execution, order-independent aggregation and run manifests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gms/model.hpp"
#include "gms/params.hpp"
#include "gms/stats.hpp"

namespace gms {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kGeneratorName =
    "philox4x32-10 keyed by splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15))";

enum class ExperimentKind {
  kClt,
  kFitnessDist,
  kMu,
  kDrift,
  kStable,
  kLil,
  kSandwich,
  kRecurrence,
  kCorrection,
};

const char* to_string(ExperimentKind kind);
/// Throws UsageError for unknown names.
ExperimentKind experiment_kind_from_string(const std::string& name);
const char* to_string(SimMode mode);
SimMode sim_mode_from_string(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind;
  ModelParams params;
  // Horizon in chain steps, or the excursion count m for mu / drift / stable.
  std::int64_t n = 0;
  std::int64_t replicas = 1;
  std::uint64_t master_seed = 0;
  SimMode mode = SimMode::kReduced;
  // Multiplies every sampling-noise tolerance; 1 for full-size runs.
  double tolerance_scale = 1.0;

  /// Throws UsageError for kind-specific violations (e.g. clt needs f = f_c).
  void validate() const;
};

nlohmann::json to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j);

struct RunOptions {
  int threads = 0;  // 0: GMS_THREADS or hardware concurrency
  std::optional<std::filesystem::path> output_dir;
  // Recorded verbatim in the manifest.
  nlohmann::json flags = nlohmann::json::object();
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<double> samples;
  std::vector<TestReport> reports;
  std::vector<std::uint64_t> replica_seeds;
  // Plot-ready CSV payloads keyed by file name.
  std::map<std::string, std::string> plot_files;
  nlohmann::json manifest;

  bool all_passed() const;
};

/// Runs the replicas (in parallel when threads > 1), aggregates, evaluates
/// the kind's tests and, when options.output_dir is set, writes
/// samples.txt, reports.json, the plot CSVs and manifest.json. Throws
/// UsageError for invalid specs and std::ios_base::failure for I/O errors.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

struct SweepRow {
  ExperimentSpec spec;
  std::optional<ExperimentResult> result;
  std::string error;  // non-empty when the spec failed to run
};

/// Runs each spec in order. With continue_on_error a failing spec yields a
/// row carrying the error; otherwise the exception propagates.
std::vector<SweepRow> sweep(std::span<const ExperimentSpec> specs, const RunOptions& options,
                            bool continue_on_error = false);

/// CSV with header `experiment,p,f,n,replicas,statistic,p_value,verdict`, one row
/// per test report (the experiment column holds the report name).
std::string sweep_summary_csv(std::span<const SweepRow> rows);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& file);

/// Recomputes the digests listed in `dir`/manifest.json.
bool verify_manifest(const std::filesystem::path& dir);

/// Writes text with exception-enabled streams (std::ios_base::failure).
void write_text_file(const std::filesystem::path& file, const std::string& text);

/// One value per line with 17 significant digits.
std::string format_samples(std::span<const double> values);

}  // namespace gms

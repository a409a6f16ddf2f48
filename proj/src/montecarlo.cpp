#include "gms/montecarlo.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace gms {

namespace detail {
ExperimentResult run_kind(const ExperimentSpec& spec, int threads);
}

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::kClt, "clt"},
    {ExperimentKind::kFitnessDist, "fitness-dist"},
    {ExperimentKind::kMu, "mu"},
    {ExperimentKind::kDrift, "drift"},
    {ExperimentKind::kStable, "stable"},
    {ExperimentKind::kLil, "lil"},
    {ExperimentKind::kSandwich, "sandwich"},
    {ExperimentKind::kRecurrence, "recurrence"},
    {ExperimentKind::kCorrection, "correction"},
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (const auto& entry : kKindNames) {
    if (name == entry.name) return entry.kind;
  }
  throw UsageError("unknown experiment kind '" + name + "'");
}

const char* to_string(SimMode mode) { return mode == SimMode::kFull ? "full" : "reduced"; }

SimMode sim_mode_from_string(const std::string& name) {
  if (name == "full") return SimMode::kFull;
  if (name == "reduced") return SimMode::kReduced;
  throw UsageError("mode must be 'full' or 'reduced' (got '" + name + "')");
}

void ExperimentSpec::validate() const {
  if (replicas < 1) {
    throw UsageError("replicas must be >= 1");
  }
  if (n < 0) {
    throw UsageError("n must be >= 0");
  }
  if (!(tolerance_scale > 0.0)) {
    throw UsageError("tolerance scale must be positive");
  }
  switch (kind) {
    case ExperimentKind::kClt:
    case ExperimentKind::kLil:
    case ExperimentKind::kSandwich:
    case ExperimentKind::kCorrection:
    case ExperimentKind::kDrift:
    case ExperimentKind::kFitnessDist:
      if (!params.is_critical()) {
        throw UsageError(std::string(to_string(kind)) +
                         " experiment requires f = f_c (use --f critical)");
      }
      break;
    default:
      break;
  }
  if (kind == ExperimentKind::kFitnessDist && mode != SimMode::kFull) {
    throw UsageError("fitness-dist runs a full-mode trajectory (--mode full)");
  }
  if (mode == SimMode::kFull && kind != ExperimentKind::kFitnessDist) {
    throw UsageError(std::string(to_string(kind)) + " runs in reduced mode only");
  }
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  return {{"kind", to_string(spec.kind)},
          {"p", spec.params.p()},
          {"f", spec.params.f()},
          {"f_is_critical", spec.params.is_critical()},
          {"n", spec.n},
          {"replicas", spec.replicas},
          {"master_seed", spec.master_seed},
          {"mode", to_string(spec.mode)},
          {"tolerance_scale", spec.tolerance_scale}};
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  try {
    const double p = j.at("p").get<double>();
    const bool critical = j.value("f_is_critical", false);
    const ModelParams params = critical ? ModelParams::critical(p)
                                        : ModelParams(p, j.at("f").get<double>());
    ExperimentSpec spec{experiment_kind_from_string(j.at("kind").get<std::string>()), params};
    spec.n = j.at("n").get<std::int64_t>();
    spec.replicas = j.at("replicas").get<std::int64_t>();
    spec.master_seed = j.at("master_seed").get<std::uint64_t>();
    spec.mode = sim_mode_from_string(j.at("mode").get<std::string>());
    spec.tolerance_scale = j.value("tolerance_scale", 1.0);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed experiment spec: ") + e.what());
  }
}

bool ExperimentResult::all_passed() const {
  if (reports.empty()) return false;
  for (const auto& r : reports) {
    if (!r.passed()) return false;
  }
  return true;
}

std::string format_samples(std::span<const double> values) {
  std::ostringstream out;
  out.precision(17);
  for (const double v : values) {
    out << v << '\n';
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out;
  out.exceptions(std::ios::failbit | std::ios::badbit);
  out.open(file, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string file_sha256(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw std::ios_base::failure("cannot open " + file.string());
  }
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  ExperimentResult result = detail::run_kind(spec, options.threads);

  nlohmann::json manifest;
  manifest["spec"] = to_json(spec);
  manifest["version"] = kArtifactVersion;
  manifest["generator"] = kGeneratorName;
  manifest["timestamp"] = utc_timestamp();
  manifest["replica_seeds"] = result.replica_seeds;
  manifest["flags"] = options.flags;
  manifest["outputs"] = nlohmann::json::object();

  if (options.output_dir) {
    const auto& dir = *options.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw std::ios_base::failure("cannot create " + dir.string() + ": " + ec.message());
    }
    std::map<std::string, std::string> files = result.plot_files;
    files["samples.txt"] = format_samples(result.samples);
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : result.reports) {
      reports.push_back(to_json(r));
    }
    files["reports.json"] = reports.dump(2) + "\n";
    for (const auto& [name, text] : files) {
      write_text_file(dir / name, text);
      manifest["outputs"][name] = file_sha256(dir / name);
    }
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  }
  result.manifest = std::move(manifest);
  return result;
}

bool verify_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) {
    throw std::ios_base::failure("cannot open " + (dir / "manifest.json").string());
  }
  const nlohmann::json manifest = nlohmann::json::parse(in);
  for (const auto& [name, digest] : manifest.at("outputs").items()) {
    if (!std::filesystem::exists(dir / name) || file_sha256(dir / name) != digest.get<std::string>()) {
      return false;
    }
  }
  return true;
}

std::vector<SweepRow> sweep(std::span<const ExperimentSpec> specs, const RunOptions& options,
                            bool continue_on_error) {
  if (specs.empty()) {
    throw UsageError("sweep needs at least one experiment");
  }
  std::vector<SweepRow> rows;
  rows.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    RunOptions per_spec = options;
    if (options.output_dir) {
      per_spec.output_dir = *options.output_dir / (std::to_string(i) + "-" + to_string(specs[i].kind));
    }
    try {
      rows.push_back({specs[i], run_experiment(specs[i], per_spec), {}});
    } catch (const std::exception& e) {
      if (!continue_on_error) throw;
      rows.push_back({specs[i], std::nullopt, e.what()});
    }
  }
  return rows;
}

std::string sweep_summary_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out.precision(10);
  out << "experiment,p,f,n,replicas,statistic,p_value,verdict\n";
  for (const auto& row : rows) {
    const auto prefix = [&](const std::string& name) {
      out << name << ',' << row.spec.params.p() << ',' << row.spec.params.f() << ','
          << row.spec.n << ',' << row.spec.replicas << ',';
    };
    if (!row.result || row.result->reports.empty()) {
      prefix(to_string(row.spec.kind));
      out << ",,error\n";
      continue;
    }
    for (const TestReport& r : row.result->reports) {
      prefix(r.name);
      out << r.statistic << ',';
      if (r.p_value) out << *r.p_value;
      out << ',' << to_string(r.verdict) << '\n';
    }
  }
  return out.str();
}

}  // namespace gms

#include "gms/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gms/analytic.hpp"
#include "gms/model.hpp"
#include "gms/montecarlo.hpp"
#include "gms/params.hpp"
#include "gms/suite.hpp"

namespace gms {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Flags {
  double p = 0.6;
  std::string f = "critical";
  std::int64_t n = 0;
  std::int64_t replicas = 1;
  std::uint64_t seed = 0;
  std::string mode = "reduced";
  std::string out;
  std::string format = "json";
  int threads = 0;

  CLI::Option* p_opt = nullptr;
  CLI::Option* f_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* replicas_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* mode_opt = nullptr;

  bool given(const CLI::Option* opt) const { return opt != nullptr && opt->count() > 0; }
};

double parse_number(const std::string& text, const char* what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw UsageError(std::string(what) + " must be a number (got '" + text + "')");
  }
  return value;
}

ModelParams resolve_params(double p, const std::string& f) {
  if (f == "critical") {
    return ModelParams::critical(p);
  }
  return ModelParams(p, parse_number(f, "--f"));
}

void add_model_flags(CLI::App* app, Flags& flags) {
  flags.p_opt = app->add_option("--p", flags.p, "birth probability, 1/2 < p < 1 (default 0.6)");
  flags.f_opt = app->add_option("--f", flags.f,
                                "fitness threshold in (0, 1), or 'critical' for f_c = (1 - p)/p "
                                "(default critical)");
}

void add_run_flags(CLI::App* app, Flags& flags, bool simulate) {
  add_model_flags(app, flags);
  flags.n_opt = app->add_option("--n", flags.n,
                                simulate ? "number of chain steps (default 1000)"
                                         : "horizon in steps, or excursion count for mu, drift "
                                           "and stable (default: acceptance size)");
  flags.seed_opt = app->add_option("--seed", flags.seed, "master seed");
  flags.mode_opt = app->add_option("--mode", flags.mode, "simulation mode")
                       ->check(CLI::IsMember({"full", "reduced"}));
  app->add_option("--out", flags.out, "directory for output files and manifest.json");
  app->add_option("--format", flags.format, "report format on stdout")
      ->check(CLI::IsMember({"csv", "json"}));
  if (!simulate) {
    flags.replicas_opt = app->add_option("--replicas", flags.replicas, "independent replicas");
    app->add_option("--threads", flags.threads,
                    "worker threads (0: GMS_THREADS or hardware concurrency)")
        ->check(CLI::NonNegativeNumber);
  }
}

json flags_json(const std::string& command, const ExperimentSpec& spec, const Flags& flags) {
  return {{"command", command},
          {"p", spec.params.p()},
          {"f", flags.f},
          {"n", spec.n},
          {"replicas", spec.replicas},
          {"seed", spec.master_seed},
          {"mode", to_string(spec.mode)},
          {"out", flags.out},
          {"format", flags.format},
          {"threads", flags.threads}};
}

// --- simulate --------------------------------------------------------------

struct SimulationConfig {
  ModelParams params;
  std::int64_t n;
  std::uint64_t seed;
  SimMode mode;
  std::vector<std::int64_t> checkpoints;
};

json to_json(const SimulationConfig& c) {
  return {{"p", c.params.p()},
          {"f", c.params.f()},
          {"f_is_critical", c.params.is_critical()},
          {"n", c.n},
          {"seed", c.seed},
          {"mode", to_string(c.mode)},
          {"checkpoints", c.checkpoints}};
}

SimulationConfig simulation_from_json(const json& j) {
  const double p = j.at("p").get<double>();
  const ModelParams params = j.value("f_is_critical", false)
                                 ? ModelParams::critical(p)
                                 : ModelParams(p, j.at("f").get<double>());
  return {params, j.at("n").get<std::int64_t>(), j.at("seed").get<std::uint64_t>(),
          sim_mode_from_string(j.at("mode").get<std::string>()),
          j.at("checkpoints").get<std::vector<std::int64_t>>()};
}

std::map<std::string, std::string> simulation_files(const SimulationConfig& c,
                                                    TrajectorySeries& series) {
  series = run_trajectory(c.params, c.n, c.seed, c.mode, c.checkpoints);
  std::map<std::string, std::string> files;
  std::ostringstream csv;
  write_trajectory_csv(csv, series);
  files["trajectory.csv"] = csv.str();
  if (c.mode == SimMode::kFull) {
    std::ostringstream values;
    write_fitness_values(values, surviving_fitness_above(series, c.params.f_c()));
    files["fitness_above_fc.txt"] = values.str();
  }
  return files;
}

json write_outputs(const fs::path& dir, const std::map<std::string, std::string>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::ios_base::failure("cannot create " + dir.string() + ": " + ec.message());
  }
  json digests = json::object();
  for (const auto& [name, text] : files) {
    write_text_file(dir / name, text);
    digests[name] = file_sha256(dir / name);
  }
  return digests;
}

json series_json(const TrajectorySeries& series) {
  json rows = json::array();
  for (const auto& snap : series.snapshots) {
    const Counters& c = snap.counters;
    rows.push_back({{"step", snap.step}, {"X", c.X}, {"L", c.L}, {"R", c.R()}, {"B", c.B},
                    {"Delta", c.Delta}, {"eta", c.eta}, {"C", c.C}});
  }
  return rows;
}

int run_simulate(const Flags& flags, std::int64_t every, std::vector<std::int64_t> checkpoints,
                 std::ostream& out) {
  const std::int64_t n = flags.given(flags.n_opt) ? flags.n : 1000;
  if (n < 0) {
    throw UsageError("--n must be non-negative");
  }
  if (every < 0) {
    throw UsageError("--every must be non-negative");
  }
  if (checkpoints.empty()) {
    const std::int64_t stride = every > 0 ? every : std::max<std::int64_t>(1, n / 100);
    for (std::int64_t k = stride; k < n; k += stride) {
      checkpoints.push_back(k);
    }
  }
  SimulationConfig config{resolve_params(flags.p, flags.f), n, flags.seed,
                          sim_mode_from_string(flags.mode), std::move(checkpoints)};
  TrajectorySeries series;
  const auto files = simulation_files(config, series);

  if (!flags.out.empty()) {
    json manifest;
    manifest["simulate"] = to_json(config);
    manifest["version"] = kArtifactVersion;
    manifest["generator"] = kGeneratorName;
    manifest["flags"] = {{"command", "simulate"}, {"p", flags.p},       {"f", flags.f},
                         {"n", n},                {"seed", flags.seed}, {"mode", flags.mode},
                         {"out", flags.out},      {"format", flags.format}};
    manifest["outputs"] = write_outputs(flags.out, files);
    write_text_file(fs::path(flags.out) / "manifest.json", manifest.dump(2) + "\n");
  }

  if (flags.format == "csv") {
    out << files.at("trajectory.csv");
  } else {
    json doc = {{"simulation", to_json(config)}, {"snapshots", series_json(series)}};
    if (series.terminal_fitness) {
      doc["fitness_above_fc"] = surviving_fitness_above(series, config.params.f_c());
    }
    out << doc.dump(2) << '\n';
  }
  return kExitPass;
}

// --- experiments -----------------------------------------------------------

ExperimentSpec build_spec(ExperimentKind kind, const Flags& flags) {
  ExperimentSpec spec = default_spec(kind);
  if (flags.given(flags.p_opt) || flags.given(flags.f_opt)) {
    spec.params = resolve_params(flags.given(flags.p_opt) ? flags.p : spec.params.p(), flags.f);
  }
  if (flags.given(flags.n_opt)) spec.n = flags.n;
  if (flags.given(flags.replicas_opt)) spec.replicas = flags.replicas;
  if (flags.given(flags.seed_opt)) spec.master_seed = flags.seed;
  if (flags.given(flags.mode_opt)) spec.mode = sim_mode_from_string(flags.mode);
  return spec;
}

json result_json(const ExperimentResult& result) {
  json reports = json::array();
  for (const auto& r : result.reports) {
    reports.push_back(to_json(r));
  }
  return {{"experiment", to_string(result.spec.kind)},
          {"spec", to_json(result.spec)},
          {"passed", result.all_passed()},
          {"reports", reports},
          {"outputs", result.manifest.value("outputs", json::object())}};
}

int run_single(ExperimentKind kind, const Flags& flags, std::ostream& out) {
  const ExperimentSpec spec = build_spec(kind, flags);
  RunOptions options;
  options.threads = flags.threads;
  if (!flags.out.empty()) options.output_dir = flags.out;
  options.flags = flags_json(to_string(kind), spec, flags);
  ExperimentResult result = run_experiment(spec, options);

  if (flags.format == "csv") {
    const SweepRow row{spec, std::move(result), {}};
    out << sweep_summary_csv(std::span(&row, 1));
    return row.result->all_passed() ? kExitPass : kExitVerdictFailed;
  }
  out << result_json(result).dump(2) << '\n';
  return result.all_passed() ? kExitPass : kExitVerdictFailed;
}

int run_suite(const Flags& flags, bool quick, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = flags.given(flags.seed_opt) ? flags.seed : kSuiteSeed;
  const auto entries = acceptance_suite(quick, seed);
  std::vector<SweepRow> rows;
  json experiments = json::array();
  bool all_passed = true;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const SuiteEntry& entry = entries[i];
    RunOptions options;
    options.threads = flags.threads;
    if (!flags.out.empty()) {
      options.output_dir = fs::path(flags.out) /
                           (std::to_string(i) + "-" + entry.criterion + "-" + to_string(entry.spec.kind));
    }
    options.flags = {{"command", "suite"}, {"quick", quick},   {"seed", seed},
                     {"out", flags.out},   {"format", flags.format}, {"threads", flags.threads}};
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result = run_experiment(entry.spec, options);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << entry.criterion << ' ' << std::left << std::setw(13) << to_string(entry.spec.kind)
        << (result.all_passed() ? "pass" : "FAIL") << "  " << std::fixed << std::setprecision(1)
        << seconds << " s  " << entry.title << '\n';
    err.unsetf(std::ios::floatfield);

    json item = result_json(result);
    item["criterion"] = entry.criterion;
    item["title"] = entry.title;
    item["seconds"] = seconds;
    experiments.push_back(std::move(item));
    all_passed = all_passed && result.all_passed();
    rows.push_back({entry.spec, std::move(result), {}});
  }

  const json doc = {{"suite", quick ? "quick" : "full"},
                    {"master_seed", seed},
                    {"passed", all_passed},
                    {"experiments", experiments}};
  const std::string summary = sweep_summary_csv(rows);
  if (!flags.out.empty()) {
    write_text_file(fs::path(flags.out) / "summary.csv", summary);
    write_text_file(fs::path(flags.out) / "suite.json", doc.dump(2) + "\n");
  }
  if (flags.format == "csv") {
    out << summary;
  } else {
    out << doc.dump(2) << '\n';
  }
  return all_passed ? kExitPass : kExitVerdictFailed;
}

// --- replay ----------------------------------------------------------------

int run_replay(const std::string& target, const std::string& out_dir, int threads,
               std::ostream& out) {
  fs::path manifest_path = target;
  if (fs::is_directory(manifest_path)) manifest_path /= "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) {
    throw std::ios_base::failure("cannot open " + manifest_path.string());
  }
  const json manifest = json::parse(in);
  const json& recorded = manifest.at("outputs");
  if (recorded.empty()) {
    throw UsageError("manifest lists no output files (the run had no --out)");
  }
  const fs::path dir = out_dir.empty() ? manifest_path.parent_path() / "replay" : fs::path(out_dir);

  json digests;
  if (manifest.contains("simulate")) {
    TrajectorySeries series;
    digests = write_outputs(dir, simulation_files(simulation_from_json(manifest.at("simulate")), series));
  } else {
    RunOptions options;
    options.threads = threads;
    options.output_dir = dir;
    options.flags = manifest.value("flags", json::object());
    digests = run_experiment(spec_from_json(manifest.at("spec")), options).manifest.at("outputs");
  }

  json mismatches = json::array();
  for (const auto& [name, digest] : recorded.items()) {
    if (!digests.contains(name) || digests.at(name) != digest) {
      mismatches.push_back(name);
    }
  }
  out << json{{"manifest", manifest_path.string()},
              {"replay_dir", dir.string()},
              {"reproduced", mismatches.empty()},
              {"mismatches", mismatches}}
             .dump(2)
      << '\n';
  return mismatches.empty() ? kExitPass : kExitVerdictFailed;
}

// --- analytic eval ---------------------------------------------------------

struct AnalyticFunction {
  std::string signature;
  std::size_t arity;
  std::function<double(const std::vector<double>&)> eval;
};

std::int64_t as_integer(double v, const char* what) {
  if (v != std::floor(v)) {
    throw UsageError(std::string(what) + " must be an integer");
  }
  return static_cast<std::int64_t>(v);
}

const std::map<std::string, AnalyticFunction>& analytic_functions() {
  using A = const std::vector<double>&;
  static const std::map<std::string, AnalyticFunction> table = {
      {"critical_fitness", {"p", 1, [](A a) { return critical_fitness(a[0]); }}},
      {"expected_mu", {"p f", 2, [](A a) { return expected_mu(a[0], a[1]); }}},
      {"correction_mean", {"p", 1, [](A a) { return correction_moments(a[0]).exact_mean; }}},
      {"correction_bound", {"p", 1, [](A a) { return correction_moments(a[0]).bound; }}},
      {"stable_pdf", {"u c", 2, [](A a) { return stable_pdf(a[0], a[1]); }}},
      {"stable_cdf", {"t c", 2, [](A a) { return stable_cdf(a[0], a[1]); }}},
      {"stable_laplace", {"theta c", 2, [](A a) { return stable_laplace(a[0], a[1]); }}},
      {"half_normal_pdf", {"x sigma", 2, [](A a) { return HalfNormalLaw(a[1]).pdf(a[0]); }}},
      {"half_normal_cdf", {"x sigma", 2, [](A a) { return half_normal_cdf(a[0], a[1]); }}},
      {"half_normal_mean", {"sigma", 1, [](A a) { return half_normal_mean(a[0]); }}},
      {"geometric_pmf",
       {"k a", 2, [](A a) { return GeometricLaw(a[1]).pmf(as_integer(a[0], "k")); }}},
      {"geometric_cdf",
       {"k a", 2, [](A a) { return GeometricLaw(a[1]).cdf(as_integer(a[0], "k")); }}},
      {"geometric_quantile",
       {"u a", 2,
        [](A a) { return static_cast<double>(GeometricLaw(a[1]).quantile(a[0])); }}},
      {"lil_envelope", {"n q", 2, [](A a) { return lil_envelope(a[0], a[1]); }}},
      {"lil_phi", {"x", 1, [](A a) { return lil_phi(a[0]); }}},
      {"stationary_pmf",
       {"n p f", 3,
        [](A a) { return stationary_law_L(a[1], a[2]).pmf(as_integer(a[0], "n")); }}},
  };
  return table;
}

std::string analytic_help() {
  std::ostringstream text;
  text << "functions:\n";
  for (const auto& [name, fn] : analytic_functions()) {
    text << "  " << name << ' ' << fn.signature << '\n';
  }
  return text.str();
}

int run_analytic_eval(const std::string& name, const std::vector<std::string>& raw,
                      std::ostream& out) {
  const auto& table = analytic_functions();
  const auto it = table.find(name);
  if (it == table.end()) {
    throw UsageError("unknown analytic function '" + name + "'\n" + analytic_help());
  }
  if (raw.size() != it->second.arity) {
    throw UsageError(name + " takes arguments: " + it->second.signature);
  }
  std::vector<double> args;
  for (const auto& text : raw) {
    args.push_back(parse_number(text, "argument"));
  }
  const double value = it->second.eval(args);
  const auto old_precision = out.precision(17);
  out << value << '\n';
  out.precision(old_precision);
  return kExitPass;
}

constexpr const char* kFooter =
    "exit codes: 0 all verdicts pass, 1 a statistical verdict failed, 2 usage or\n"
    "configuration error, 3 I/O error.\n"
    "environment: GMS_THREADS sets the default worker thread count.";

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and verification lab for the minimum-fitness birth-death model"};
  app.name("gms_lab");
  app.footer(kFooter);
  app.require_subcommand(0, 1);

  Flags top;
  add_model_flags(&app, top);

  Flags sim;
  std::int64_t every = 0;
  std::vector<std::int64_t> checkpoints;
  CLI::App* simulate = app.add_subcommand("simulate", "run one trajectory and print its counters");
  add_run_flags(simulate, sim, true);
  sim.format = "csv";
  simulate->add_option("--every", every, "snapshot stride in steps (default n/100)");
  simulate->add_option("--checkpoints", checkpoints, "explicit snapshot steps, comma separated")
      ->delimiter(',');

  struct ExperimentCommand {
    ExperimentKind kind;
    const char* help;
    CLI::App* app = nullptr;
    Flags flags{};
  };
  std::vector<ExperimentCommand> experiments = {
      {ExperimentKind::kClt, "half-normal limit of Delta_n / sqrt(2qn)", nullptr, {}},
      {ExperimentKind::kFitnessDist, "uniform law of surviving fitness above f_c"},
      {ExperimentKind::kMu, "mean deaths per excursion while L = 0"},
      {ExperimentKind::kDrift, "holding-time excess and skeleton length coupling"},
      {ExperimentKind::kStable, "stable-1/2 limit of T_m / m^2"},
      {ExperimentKind::kLil, "running LIL statistic band"},
      {ExperimentKind::kSandwich, "occupation time against completed excursions"},
      {ExperimentKind::kRecurrence, "recurrence class of L (set by p and f)"},
      {ExperimentKind::kCorrection, "reflection correction term C_n"},
  };
  for (auto& e : experiments) {
    e.app = app.add_subcommand(to_string(e.kind), e.help);
    add_run_flags(e.app, e.flags, false);
  }

  Flags suite_flags;
  bool quick = false;
  CLI::App* suite = app.add_subcommand("suite", "run every acceptance experiment");
  suite->add_flag("--quick", quick, "divide n and replicas by 10, widening tolerances by sqrt(10)");
  suite_flags.seed_opt = suite->add_option("--seed", suite_flags.seed, "suite master seed");
  suite->add_option("--out", suite_flags.out, "directory for per-experiment outputs");
  suite->add_option("--format", suite_flags.format, "report format on stdout")
      ->check(CLI::IsMember({"csv", "json"}));
  suite->add_option("--threads", suite_flags.threads, "worker threads")
      ->check(CLI::NonNegativeNumber);

  std::string replay_target;
  std::string replay_out;
  int replay_threads = 0;
  CLI::App* replay = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  replay->add_option("manifest", replay_target, "manifest.json or the directory holding it")
      ->required();
  replay->add_option("--out", replay_out, "directory for regenerated outputs (default <dir>/replay)");
  replay->add_option("--threads", replay_threads, "worker threads")->check(CLI::NonNegativeNumber);

  CLI::App* analytic = app.add_subcommand("analytic", "closed-form reference functions");
  analytic->require_subcommand(1);
  std::string fn_name;
  std::vector<std::string> fn_args;
  CLI::App* eval = analytic->add_subcommand("eval", "evaluate one function (17 significant digits)");
  eval->footer(analytic_help());
  eval->add_option("function", fn_name, "function name")->required();
  eval->add_option("args", fn_args, "numeric arguments")->allow_extra_args();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (top.given(top.p_opt) || top.given(top.f_opt)) {
      resolve_params(top.p, top.f);
    }
    // Model flags given before the subcommand apply unless repeated after it.
    const auto inherit = [&](Flags& flags) {
      if (!flags.given(flags.p_opt) && top.given(top.p_opt)) {
        flags.p = top.p;
        flags.p_opt = top.p_opt;
      }
      if (!flags.given(flags.f_opt) && top.given(top.f_opt)) {
        flags.f = top.f;
        flags.f_opt = top.f_opt;
      }
    };

    if (simulate->parsed()) {
      inherit(sim);
      return run_simulate(sim, every, checkpoints, out);
    }
    for (auto& e : experiments) {
      if (e.app->parsed()) {
        inherit(e.flags);
        return run_single(e.kind, e.flags, out);
      }
    }
    if (suite->parsed()) return run_suite(suite_flags, quick, out, err);
    if (replay->parsed()) return run_replay(replay_target, replay_out, replay_threads, out);
    if (eval->parsed()) return run_analytic_eval(fn_name, fn_args, out);

    err << "a subcommand is required\n" << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const json::exception& e) {
    err << "error reading manifest: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace gms

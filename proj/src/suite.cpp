#include "gms/suite.hpp"

#include <algorithm>
#include <cmath>

#include "gms/rng.hpp"

namespace gms {

namespace {

ExperimentSpec make(ExperimentKind kind, const ModelParams& params, std::int64_t n,
                    std::int64_t replicas, SimMode mode = SimMode::kReduced) {
  ExperimentSpec spec{kind, params};
  spec.n = n;
  spec.replicas = replicas;
  spec.mode = mode;
  return spec;
}

}  // namespace

std::vector<SuiteEntry> acceptance_suite(bool quick, std::uint64_t master_seed) {
  const ModelParams crit06 = ModelParams::critical(0.6);
  std::vector<SuiteEntry> suite = {
      {"A1", "CLT: Delta_n/sqrt(2qn) -> |N(0,1)|", make(ExperimentKind::kClt, crit06, 1'000'000, 2000)},
      {"A2", "uniform limiting fitness law on (f_c, 1)",
       make(ExperimentKind::kFitnessDist, crit06, 1'000'000, 1, SimMode::kFull)},
      {"A3", "mu = 1 at p = 0.55", make(ExperimentKind::kMu, ModelParams::critical(0.55), 1'000'000, 1)},
      {"A3", "mu = 1 at p = 0.6", make(ExperimentKind::kMu, crit06, 1'000'000, 1)},
      {"A3", "mu = 1 at p = 0.75", make(ExperimentKind::kMu, ModelParams::critical(0.75), 1'000'000, 1)},
      {"A3", "mu = q/(pf) at (0.6, 0.5)", make(ExperimentKind::kMu, ModelParams(0.6, 0.5), 1'000'000, 1)},
      {"A4", "holding excess 1/(2q) and V'_m ~ T_m/(2q)", make(ExperimentKind::kDrift, crit06, 1'000'000, 1)},
      {"A5", "T_m/m^2 -> stable-1/2", make(ExperimentKind::kStable, crit06, 1000, 2000)},
      {"A6", "LIL running statistic band", make(ExperimentKind::kLil, crit06, 10'000'000, 20)},
      {"A7", "occupation sandwich and eta_n ~ N_n", make(ExperimentKind::kSandwich, crit06, 1'000'000, 10)},
      {"A8", "positive recurrence at f = f_c/2",
       make(ExperimentKind::kRecurrence, ModelParams(0.6, 0.5 * crit06.f_c()), 1'000'000, 1)},
      {"A8", "null recurrence at f = f_c", make(ExperimentKind::kRecurrence, crit06, 10'000'000, 1)},
      {"A8", "transience at f = 0.9", make(ExperimentKind::kRecurrence, ModelParams(0.6, 0.9), 1'000'000, 1)},
      {"A9", "correction term mean q/(2p-1)",
       make(ExperimentKind::kCorrection, ModelParams::critical(0.75), 1'000'000, 1000)},
  };
  for (std::size_t i = 0; i < suite.size(); ++i) {
    ExperimentSpec& spec = suite[i].spec;
    spec.master_seed = derive_seed(master_seed, i);
    if (quick) {
      spec.n = std::max<std::int64_t>(1, spec.n / 10);
      spec.replicas = std::max<std::int64_t>(1, spec.replicas / 10);
      spec.tolerance_scale = std::sqrt(10.0);
    }
  }
  return suite;
}

ExperimentSpec default_spec(ExperimentKind kind, std::uint64_t master_seed) {
  for (const SuiteEntry& entry : acceptance_suite(false, master_seed)) {
    if (entry.spec.kind == kind) {
      return entry.spec;
    }
  }
  throw UsageError("no default configuration for this experiment");
}

}  // namespace gms

// Experiment kernels: one function per ExperimentKind. Each replica owns its
// stream (derive_seed(master, r)) and writes only its own slot; every
// aggregate is computed afterwards in replica order.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gms/analytic.hpp"
#include "gms/excursion.hpp"
#include "gms/montecarlo.hpp"
#include "gms/parallel.hpp"

namespace gms {

namespace detail {
ExperimentResult run_kind(const ExperimentSpec& spec, int threads);
}

namespace {

constexpr std::int64_t kLilStart = 16;
constexpr std::size_t kMaxCdfRows = 2000;

nlohmann::json params_json(const ModelParams& params) {
  return {{"p", params.p()}, {"q", params.q()}, {"f", params.f()}, {"f_c", params.f_c()}};
}

struct ReportBuilder {
  const ExperimentSpec& spec;

  TestReport make(std::string name, std::string reference, double statistic,
                  double threshold, std::string rule, bool pass,
                  std::optional<double> p_value = std::nullopt) const {
    TestReport r;
    r.name = std::move(name);
    r.reference = std::move(reference);
    r.statistic = statistic;
    r.threshold = threshold;
    r.rule = std::move(rule);
    r.p_value = p_value;
    r.verdict = pass ? Verdict::kPass : Verdict::kFail;
    r.n = spec.n;
    r.replicas = spec.replicas;
    r.seed = spec.master_seed;
    r.params = params_json(spec.params);
    return r;
  }

  TestReport insufficient(std::string name, std::string reference) const {
    TestReport r = make(std::move(name), std::move(reference), 0.0, 0.0, "", false);
    r.verdict = Verdict::kInsufficientData;
    return r;
  }
};

// x, empirical, reference at (a thinned set of) the sample's order statistics.
std::string cdf_csv(const EmpiricalSample& sample, const Cdf& reference) {
  std::ostringstream out;
  out.precision(10);
  out << "x,empirical,reference\n";
  const auto values = sample.values();
  const std::size_t stride = std::max<std::size_t>(1, values.size() / kMaxCdfRows);
  for (std::size_t i = 0; i < values.size(); i += stride) {
    // Last index of a run of ties so the empirical column is right-continuous.
    std::size_t j = i;
    while (j + 1 < values.size() && values[j + 1] == values[i]) ++j;
    out << values[i] << ',' << static_cast<double>(j + 1) / static_cast<double>(values.size())
        << ',' << reference(values[i]) << '\n';
  }
  return out.str();
}

std::vector<std::uint64_t> seeds_for(const ExperimentSpec& spec, std::int64_t count) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
  for (std::int64_t r = 0; r < count; ++r) {
    seeds[static_cast<std::size_t>(r)] = derive_seed(spec.master_seed, static_cast<std::uint64_t>(r));
  }
  return seeds;
}

double tolerance(const ExperimentSpec& spec, double base) { return base * spec.tolerance_scale; }

ExperimentResult start(const ExperimentSpec& spec, std::int64_t streams) {
  ExperimentResult result{spec, {}, {}, {}, {}, {}};
  result.replica_seeds = seeds_for(spec, streams);
  return result;
}

// ---------------------------------------------------------------------------

ExperimentResult run_clt(const ExperimentSpec& spec, int threads) {
  ExperimentResult result = start(spec, spec.replicas);
  const ReportBuilder rb{spec};
  const std::string ks_ref = "half-normal(sigma=1)";
  const std::string mean_ref = "half-normal mean sqrt(2/pi)";
  if (spec.n < 1) {
    result.reports = {rb.insufficient("clt-ks-half-normal", ks_ref),
                      rb.insufficient("clt-mean", mean_ref)};
    return result;
  }
  const ModelParams& params = spec.params;
  const double scale = std::sqrt(2.0 * params.q() * static_cast<double>(spec.n));
  result.samples.assign(static_cast<std::size_t>(spec.replicas), 0.0);
  for_each_replica(spec.replicas, threads, [&](std::int64_t r) {
    const auto idx = static_cast<std::size_t>(r);
    const PrimitiveStream stream(result.replica_seeds[idx], params.q());
    ReducedState state;
    advance_reduced(state, params, stream, spec.n);
    result.samples[idx] = static_cast<double>(state.Delta) / scale;
  });

  const HalfNormalLaw law(1.0);
  const EmpiricalSample sample(result.samples);
  const double d = ks_statistic(sample, [&](double x) { return law.cdf(x); });
  const double ks_tol = tolerance(spec, 0.05);
  result.reports.push_back(rb.make("clt-ks-half-normal", ks_ref, d, ks_tol,
                                   "statistic <= threshold", d <= ks_tol,
                                   ks_pvalue(d, spec.replicas)));
  const double mean = sample_mean(result.samples);
  const double mean_tol = tolerance(spec, 0.03);
  TestReport mean_report =
      rb.make("clt-mean", mean_ref, mean, mean_tol, "|statistic - sqrt(2/pi)| <= threshold",
              std::abs(mean - law.mean()) <= mean_tol);
  mean_report.extra = {{"expected", law.mean()}};
  result.reports.push_back(mean_report);
  result.plot_files["clt_cdf.csv"] = cdf_csv(sample, [&](double x) { return law.cdf(x); });
  return result;
}

ExperimentResult run_fitness_dist(const ExperimentSpec& spec, int) {
  ExperimentResult result = start(spec, 1);
  const ReportBuilder rb{spec};
  const ModelParams& params = spec.params;
  const double lo = params.f_c();
  const std::string ref = "uniform(f_c, 1)";
  const TrajectorySeries series =
      run_trajectory(params, spec.n, result.replica_seeds[0], SimMode::kFull);
  result.samples = surviving_fitness_above(series, lo);
  if (result.samples.empty()) {
    result.reports = {rb.insufficient("fitness-ks-uniform", ref)};
    return result;
  }
  auto uniform_cdf = [lo](double x) { return std::clamp((x - lo) / (1.0 - lo), 0.0, 1.0); };
  const EmpiricalSample sample(result.samples);
  const double d = ks_statistic(sample, uniform_cdf);
  const double tol = tolerance(spec, 0.02);
  TestReport report = rb.make("fitness-ks-uniform", ref, d, tol, "statistic <= threshold",
                              d <= tol, ks_pvalue(d, static_cast<std::int64_t>(sample.size())));
  report.extra = {{"survivors", sample.size()},
                  {"X", series.terminal.X},
                  {"L", series.terminal.L},
                  {"Delta", series.terminal.Delta}};
  result.reports.push_back(report);

  result.plot_files["fitness_cdf.csv"] = cdf_csv(sample, uniform_cdf);
  constexpr int kBins = 20;
  std::vector<std::int64_t> counts(kBins, 0);
  for (const double v : result.samples) {
    const int bin = std::min(kBins - 1, static_cast<int>((v - lo) / (1.0 - lo) * kBins));
    ++counts[static_cast<std::size_t>(bin)];
  }
  std::ostringstream hist;
  hist.precision(10);
  hist << "bin_lo,bin_hi,count,expected,sigma\n";
  const double total = static_cast<double>(result.samples.size());
  for (int b = 0; b < kBins; ++b) {
    const double expected = total / kBins;
    hist << lo + (1.0 - lo) * b / kBins << ',' << lo + (1.0 - lo) * (b + 1) / kBins << ','
         << counts[static_cast<std::size_t>(b)] << ',' << expected << ','
         << std::sqrt(expected * (1.0 - 1.0 / kBins)) << '\n';
  }
  result.plot_files["fitness_hist.csv"] = hist.str();
  return result;
}

ExperimentResult run_mu(const ExperimentSpec& spec, int threads) {
  ExperimentResult result = start(spec, spec.replicas);
  const ReportBuilder rb{spec};
  const ModelParams& params = spec.params;
  const double expected = expected_mu(params.p(), params.f());
  const std::string ref = "first-step mean q/(pf)";
  if (spec.n < 2) {
    result.reports = {rb.insufficient("mu-mean", ref)};
    return result;
  }
  std::vector<std::vector<double>> per_replica(static_cast<std::size_t>(spec.replicas));
  for_each_replica(spec.replicas, threads, [&](std::int64_t r) {
    const auto idx = static_cast<std::size_t>(r);
    ExcursionSampler sampler(params, result.replica_seeds[idx]);
    auto& out = per_replica[idx];
    out.reserve(static_cast<std::size_t>(spec.n));
    while (static_cast<std::int64_t>(out.size()) < spec.n) {
      const ExcursionRecord rec = sampler.next();
      if (!rec.censored) {
        out.push_back(static_cast<double>(rec.mu));
      }
    }
  });
  for (const auto& part : per_replica) {
    result.samples.insert(result.samples.end(), part.begin(), part.end());
  }

  const double mean = sample_mean(result.samples);
  const double tol = tolerance(spec, params.is_critical() ? 0.01 : 0.02);
  TestReport mean_report = rb.make("mu-mean", ref, mean, tol, "|statistic - q/(pf)| <= threshold",
                                   std::abs(mean - expected) <= tol);
  mean_report.extra = {{"expected", expected},
                       {"standard_error", standard_error(result.samples)},
                       {"excursions", result.samples.size()}};
  result.reports.push_back(mean_report);

  // Each zero-holding step is a death (q), a neutral birth or the exit (pf);
  // mu = 0 when the exit precedes every death.
  const double pf = params.p() * params.f();
  const double p_zero = pf / (pf + params.q());
  const auto zeros = std::count(result.samples.begin(), result.samples.end(), 0.0);
  const double total = static_cast<double>(result.samples.size());
  const double frac = static_cast<double>(zeros) / total;
  const double zero_tol = 3.0 * std::sqrt(p_zero * (1.0 - p_zero) / total);
  TestReport zero_report =
      rb.make("mu-zero-fraction", "P(mu=0) = pf/(pf+q)", frac, zero_tol,
              "|statistic - pf/(pf+q)| <= 3 standard errors", std::abs(frac - p_zero) <= zero_tol);
  zero_report.extra = {{"expected", p_zero}};
  result.reports.push_back(zero_report);

  std::ostringstream pmf;
  pmf.precision(10);
  pmf << "k,empirical,reference\n";
  const double ratio = params.q() / (pf + params.q());
  for (int k = 0; k <= 20; ++k) {
    const auto hits = std::count(result.samples.begin(), result.samples.end(), static_cast<double>(k));
    pmf << k << ',' << static_cast<double>(hits) / total << ','
        << std::pow(ratio, k) * (1.0 - ratio) << '\n';
  }
  result.plot_files["mu_pmf.csv"] = pmf.str();
  return result;
}

ExperimentResult run_drift(const ExperimentSpec& spec, int) {
  ExperimentResult result = start(spec, 2);
  const ReportBuilder rb{spec};
  const ModelParams& params = spec.params;
  const double q = params.q();
  if (spec.n < 2) {
    result.reports = {rb.insufficient("drift-holding-excess", "1/(2q)")};
    return result;
  }
  const ExcursionBatch batch = sample_excursions(params, spec.n, result.replica_seeds[0]);
  const ExcursionAggregates agg = aggregate_excursions(batch.records);
  const auto m = static_cast<double>(agg.count());
  const auto last = static_cast<std::size_t>(agg.count());

  result.samples.reserve(batch.records.size());
  for (const auto& rec : batch.records) {
    result.samples.push_back(static_cast<double>(rec.tau));
  }

  const double excess = static_cast<double>(agg.V[last] - agg.V_prime[last]) / m;
  const double excess_tol = tolerance(spec, 0.025);
  TestReport excess_report =
      rb.make("drift-holding-excess", "E(h_tilde) - E(h') = 1/(2q)", excess, excess_tol,
              "|statistic - 1/(2q)| <= threshold", std::abs(excess - 0.5 / q) <= excess_tol);
  excess_report.extra = {{"expected", 0.5 / q}, {"censored", batch.censored}};
  result.reports.push_back(excess_report);

  const double ratio =
      2.0 * q * static_cast<double>(agg.V_prime[last]) / static_cast<double>(agg.T[last]);
  const double ratio_tol = tolerance(spec, 0.02);
  TestReport ratio_report =
      rb.make("drift-skeleton-ratio", "V'_m ~ T_m/(2q)", ratio, ratio_tol,
              "|statistic - 1| <= threshold", std::abs(ratio - 1.0) <= ratio_tol);
  ratio_report.extra = {{"V_m", agg.V[last]}, {"V_prime_m", agg.V_prime[last]}, {"T_m", agg.T[last]}};
  result.reports.push_back(ratio_report);

  std::int64_t violations = 0;
  for (std::size_t k = 0; k < agg.V.size(); ++k) {
    violations += agg.V[k] < agg.V_prime[k] ? 1 : 0;
  }
  result.reports.push_back(rb.make("drift-dominance", "V_m >= V'_m for every m",
                                   static_cast<double>(violations), 0.0,
                                   "statistic == 0", violations == 0));

  // Skeleton lengths against independent simple-random-walk return times.
  const std::int64_t k = std::min<std::int64_t>(agg.count(), 20000);
  const ReturnTimes srw = sample_srw_return_times(k, result.replica_seeds[1]);
  std::vector<double> taus(result.samples.begin(), result.samples.begin() + k);
  std::vector<double> returns(srw.values.begin(), srw.values.end());
  const KsResult ks = two_sample_ks(EmpiricalSample(std::move(taus)), EmpiricalSample(std::move(returns)));
  TestReport law_report = rb.make("skeleton-law-ks", "SRW return time t_1 (two-sample)", ks.D,
                                  0.001, "p_value >= threshold", ks.p_value >= 0.001, ks.p_value);
  law_report.extra = {{"sample_size", k}};
  result.reports.push_back(law_report);
  return result;
}

ExperimentResult run_stable(const ExperimentSpec& spec, int threads) {
  ExperimentResult result = start(spec, spec.replicas);
  const ReportBuilder rb{spec};
  const std::string ref = "stable-1/2 (c=1)";
  if (spec.n < 1) {
    result.reports = {rb.insufficient("stable-ks", ref)};
    return result;
  }
  const StableScaling scaling = stable_scaling_sample(spec.n, spec.replicas, spec.master_seed, threads);
  result.samples = scaling.values;
  const StableHalfLaw law(1.0);
  const EmpiricalSample sample(result.samples);
  const double d = ks_statistic(sample, [&](double t) { return law.cdf(t); });
  const double ks_tol = tolerance(spec, 0.05);
  TestReport ks_report = rb.make("stable-ks", ref, d, ks_tol, "statistic <= threshold", d <= ks_tol,
                                 ks_pvalue(d, static_cast<std::int64_t>(sample.size())));
  ks_report.extra = {{"censored", scaling.censored}};
  result.reports.push_back(ks_report);

  double laplace = 0.0;
  for (const double v : result.samples) {
    laplace += std::exp(-v);
  }
  laplace /= static_cast<double>(result.samples.size());
  const double lt_tol = tolerance(spec, 0.02);
  TestReport lt_report =
      rb.make("stable-laplace", "E exp(-T_m/m^2) -> exp(-sqrt(2))", laplace, lt_tol,
              "|statistic - exp(-sqrt 2)| <= threshold", std::abs(laplace - law.laplace(1.0)) <= lt_tol);
  lt_report.extra = {{"expected", law.laplace(1.0)}};
  result.reports.push_back(lt_report);
  result.plot_files["stable_cdf.csv"] = cdf_csv(sample, [&](double t) { return law.cdf(t); });
  return result;
}

ExperimentResult run_lil(const ExperimentSpec& spec, int threads) {
  ExperimentResult result = start(spec, spec.replicas);
  const ReportBuilder rb{spec};
  const std::string ref = "running sup of Delta_m / sqrt(4 q m ln ln m) in [0.3, 1.7]";
  if (spec.n < kLilStart) {
    result.reports = {rb.insufficient("lil-band", ref)};
    return result;
  }
  const ModelParams& params = spec.params;
  const double q = params.q();

  // Plot checkpoints: ~40 per decade from the first admissible step.
  std::vector<std::int64_t> grid;
  for (double x = kLilStart; x < static_cast<double>(spec.n); x *= std::pow(10.0, 1.0 / 40.0)) {
    const auto step = static_cast<std::int64_t>(x);
    if (grid.empty() || step > grid.back()) grid.push_back(step);
  }
  if (grid.back() != spec.n) grid.push_back(spec.n);

  std::vector<std::vector<LilPoint>> series(static_cast<std::size_t>(spec.replicas));
  result.samples.assign(static_cast<std::size_t>(spec.replicas), 0.0);
  for_each_replica(spec.replicas, threads, [&](std::int64_t r) {
    const auto idx = static_cast<std::size_t>(r);
    const PrimitiveStream stream(result.replica_seeds[idx], q);
    ReducedState state;
    advance_reduced(state, params, stream, kLilStart);
    // Between increments of Delta the ratio decreases, so the running sup
    // only needs refreshing where Delta grows.
    double sup = static_cast<double>(state.Delta) / lil_envelope(kLilStart, q);
    auto& points = series[idx];
    points.reserve(grid.size());
    for (const std::int64_t stop : grid) {
      advance_reduced(state, params, stream, stop - state.n,
                      [&](const Counters& before, const Primitive&, const Counters& after) {
                        if (after.Delta != before.Delta) {
                          sup = std::max(sup, static_cast<double>(after.Delta) /
                                                  lil_envelope(static_cast<double>(after.n), q));
                        }
                      });
      points.push_back({stop, sup});
    }
    result.samples[idx] = sup;
  });

  const auto [lo_it, hi_it] = std::minmax_element(result.samples.begin(), result.samples.end());
  const bool in_band = *lo_it >= 0.3 && *hi_it <= 1.7;
  const double med = median(result.samples);
  TestReport report = rb.make("lil-band", ref, med, 1.7,
                              "every replica's statistic in [0.3, 1.7]; statistic = median", in_band);
  report.extra = {{"min", *lo_it}, {"max", *hi_it}, {"median", med}, {"values", result.samples},
                  {"start_step", kLilStart}};
  result.reports.push_back(report);

  std::ostringstream csv;
  csv.precision(10);
  csv << "replica,n,running_sup\n";
  for (std::size_t r = 0; r < series.size(); ++r) {
    for (const auto& pt : series[r]) {
      csv << r << ',' << pt.n << ',' << pt.running_sup << '\n';
    }
  }
  result.plot_files["lil_series.csv"] = csv.str();
  return result;
}

ExperimentResult run_sandwich(const ExperimentSpec& spec, int threads) {
  ExperimentResult result = start(spec, spec.replicas);
  const ReportBuilder rb{spec};
  const ModelParams& params = spec.params;
  std::vector<std::int64_t> checkpoints;
  constexpr std::int64_t kCheckpoints = 100;
  for (std::int64_t i = 1; i <= kCheckpoints && spec.n > 0; ++i) {
    const std::int64_t step = spec.n * i / kCheckpoints;
    if (checkpoints.empty() || step > checkpoints.back()) checkpoints.push_back(step);
  }
  std::vector<SandwichCheck> checks(static_cast<std::size_t>(spec.replicas));
  for_each_replica(spec.replicas, threads, [&](std::int64_t r) {
    const auto idx = static_cast<std::size_t>(r);
    checks[idx] = occupation_vs_excursions(params, spec.n, result.replica_seeds[idx], checkpoints);
  });

  std::int64_t violations = 0;
  std::int64_t tight = 0;
  std::int64_t points = 0;
  std::int64_t eta_total = 0;
  std::int64_t n_total = 0;
  nlohmann::json per_seed = nlohmann::json::array();
  for (const auto& check : checks) {
    violations += check.violations;
    tight += check.tight;
    points += static_cast<std::int64_t>(check.points.size());
    const SandwichPoint& last = check.points.back();
    eta_total += last.eta;
    n_total += last.N;
    const double ratio = last.N > 0 ? static_cast<double>(last.eta) / static_cast<double>(last.N)
                                    : std::numeric_limits<double>::quiet_NaN();
    result.samples.push_back(ratio);
    per_seed.push_back({{"eta", last.eta}, {"N", last.N}, {"ratio", ratio}});
  }
  TestReport sandwich = rb.make("sandwich-weak", "sum_{k<=N} mu_k <= eta_n <= sum_{k<=N+1} mu_k",
                                static_cast<double>(violations), 0.0, "statistic == 0",
                                violations == 0);
  sandwich.extra = {{"checkpoints", points}, {"tight", tight}};
  result.reports.push_back(sandwich);

  if (n_total == 0) {
    result.reports.push_back(rb.insufficient("eta-over-N", "eta_n ~ N_n"));
    return result;
  }
  const double pooled = static_cast<double>(eta_total) / static_cast<double>(n_total);
  const double tol = tolerance(spec, 0.05);
  TestReport ratio = rb.make("eta-over-N", "eta_n ~ N_n (pooled over seeds)", pooled, tol,
                             "|statistic - 1| <= threshold", std::abs(pooled - 1.0) <= tol);
  ratio.extra = {{"per_seed", per_seed}};
  result.reports.push_back(ratio);
  return result;
}

ExperimentResult run_recurrence(const ExperimentSpec& spec, int) {
  ExperimentResult result = start(spec, 1);
  const ReportBuilder rb{spec};
  const ModelParams& params = spec.params;
  const StationaryLawL law = stationary_law_L(params.p(), params.f());
  const PrimitiveStream stream(result.replica_seeds[0], params.q());
  if (spec.n < 1) {
    result.reports = {rb.insufficient(std::string("recurrence-") + to_string(law.kind), "")};
    return result;
  }
  const double pf = params.p() * params.f();
  const double q = params.q();
  ReducedState state;

  switch (law.kind) {
    case Recurrence::kPositive: {
      // Occupation is sampled every `thin` steps: ten relaxation times of the
      // birth-death walk, so consecutive samples are close to independent.
      const double lambda = 1.0 - pf - q + 2.0 * std::sqrt(pf * q);
      const auto thin = static_cast<std::int64_t>(std::ceil(-10.0 / std::log(lambda)));
      constexpr std::size_t kBins = 64;
      std::vector<std::int64_t> counts(kBins, 0);
      while (state.n + thin <= spec.n) {
        advance_reduced(state, params, stream, thin);
        const auto bin = std::min<std::size_t>(static_cast<std::size_t>(state.L), kBins - 1);
        ++counts[bin];
        result.samples.push_back(static_cast<double>(state.L));
      }
      if (result.samples.size() < 50) {
        result.reports = {rb.insufficient("recurrence-positive-chi2", "geometric stationary law")};
        return result;
      }
      const std::vector<double> probs = law.binned(kBins);
      const ChiSquareResult chi = chi_square_goodness(counts, probs);
      TestReport report = rb.make("recurrence-positive-chi2", "pi(n) = (1-rho) rho^n", chi.statistic,
                                  0.001, "p_value >= threshold", chi.p_value >= 0.001, chi.p_value);
      report.extra = {{"rho", law.rho}, {"dof", chi.dof}, {"thin", thin},
                      {"samples", result.samples.size()}};
      result.reports.push_back(report);
      break;
    }
    case Recurrence::kNull: {
      std::int64_t returns = 0;
      advance_reduced(state, params, stream, spec.n,
                      [&](const Counters& before, const Primitive&, const Counters& after) {
                        returns += (before.L == 1 && after.L == 0) ? 1 : 0;
                      });
      const double density = static_cast<double>(state.L) / static_cast<double>(spec.n);
      result.samples = {static_cast<double>(returns), density};
      result.reports.push_back(rb.make("recurrence-null-returns", "L returns to 0 infinitely often",
                                       static_cast<double>(returns), 100.0,
                                       "statistic >= threshold", returns >= 100));
      const double tol = tolerance(spec, 0.01);
      result.reports.push_back(rb.make("recurrence-null-density", "L_n / n -> 0", density, tol,
                                       "statistic <= threshold", density <= tol));
      break;
    }
    case Recurrence::kTransient: {
      advance_reduced(state, params, stream, spec.n);
      const double density = static_cast<double>(state.L) / static_cast<double>(spec.n);
      result.samples = {density};
      const double tol = tolerance(spec, 0.01);
      TestReport report = rb.make("recurrence-transient-drift", "L_n / n -> pf - q", density, tol,
                                  "|statistic - (pf - q)| <= threshold",
                                  std::abs(density - law.drift) <= tol);
      report.extra = {{"expected", law.drift}};
      result.reports.push_back(report);
      break;
    }
  }
  return result;
}

ExperimentResult run_correction(const ExperimentSpec& spec, int threads) {
  ExperimentResult result = start(spec, spec.replicas);
  const ReportBuilder rb{spec};
  const ModelParams& params = spec.params;
  const CorrectionMoments moments = correction_moments(params.p());
  if (spec.replicas < 2) {
    result.reports = {rb.insufficient("correction-mean", "q/(2p-1)")};
    return result;
  }
  result.samples.assign(static_cast<std::size_t>(spec.replicas), 0.0);
  for_each_replica(spec.replicas, threads, [&](std::int64_t r) {
    const auto idx = static_cast<std::size_t>(r);
    const PrimitiveStream stream(result.replica_seeds[idx], params.q());
    ReducedState state;
    advance_reduced(state, params, stream, spec.n);
    result.samples[idx] = static_cast<double>(state.C);
  });
  const double mean = sample_mean(result.samples);
  const double se = standard_error(result.samples);
  TestReport mean_report =
      rb.make("correction-mean", "E C = q/(2p-1)", mean, 3.0 * se,
              "|statistic - q/(2p-1)| <= 3 standard errors",
              std::abs(mean - moments.exact_mean) <= 3.0 * se);
  mean_report.extra = {{"expected", moments.exact_mean}, {"standard_error", se}};
  result.reports.push_back(mean_report);
  result.reports.push_back(rb.make("correction-bound", "E C <= E(g) E(h) = 1/(2p-1)", mean,
                                   moments.bound, "statistic < threshold", mean < moments.bound));
  return result;
}

}  // namespace

namespace detail {

ExperimentResult run_kind(const ExperimentSpec& spec, int threads) {
  switch (spec.kind) {
    case ExperimentKind::kClt:
      return run_clt(spec, threads);
    case ExperimentKind::kFitnessDist:
      return run_fitness_dist(spec, threads);
    case ExperimentKind::kMu:
      return run_mu(spec, threads);
    case ExperimentKind::kDrift:
      return run_drift(spec, threads);
    case ExperimentKind::kStable:
      return run_stable(spec, threads);
    case ExperimentKind::kLil:
      return run_lil(spec, threads);
    case ExperimentKind::kSandwich:
      return run_sandwich(spec, threads);
    case ExperimentKind::kRecurrence:
      return run_recurrence(spec, threads);
    case ExperimentKind::kCorrection:
      return run_correction(spec, threads);
  }
  throw UsageError("unknown experiment kind");
}

}  // namespace detail

}  // namespace gms

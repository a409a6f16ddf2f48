#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "gms/analytic.hpp"
#include "gms/excursion.hpp"
#include "gms/rng.hpp"
#include "gms/stats.hpp"

using namespace gms;
using Catch::Approx;

namespace {

template <class T>
std::vector<double> as_doubles(const std::vector<T>& v) {
  return {v.begin(), v.end()};
}

double mean_of(const std::vector<double>& v) { return sample_mean(v); }

// Catalan(k - 1) / 2^(2k - 1): P(first hit of 0 from 1 at step 2k - 1) for
// the simple symmetric walk.
double srw_hit_prob(int k) {
  double catalan = 1.0;
  for (int j = 0; j < k - 1; ++j) catalan = catalan * 2.0 * (2 * j + 1) / (j + 2);
  return catalan / std::ldexp(1.0, 2 * k - 1);
}

}  // namespace

TEST_CASE("leaping and stepwise walks share the hitting-time law") {
  for (const double up : {0.5, 0.4}) {
    for (const std::int64_t start : {std::int64_t{1}, std::int64_t{40}}) {
      PhiloxEngine a(derive_seed(1, start), StreamDomain::kRandomWalk);
      PhiloxEngine b(derive_seed(2, start), StreamDomain::kRandomWalk);
      std::vector<double> leap, step;
      const std::int64_t cap = 1'000'000;
      for (int i = 0; i < 20000; ++i) {
        const auto x = hitting_time(a, start, up, cap, WalkMethod::kLeaping);
        const auto y = hitting_time(b, start, up, cap, WalkMethod::kStepwise);
        if (!x.censored) leap.push_back(static_cast<double>(x.steps));
        if (!y.censored) step.push_back(static_cast<double>(y.steps));
      }
      const auto r = two_sample_ks(EmpiricalSample(leap), EmpiricalSample(step));
      CHECK(r.p_value >= 0.001);
      if (up < 0.5) {
        // Mean hitting time from d with drift 1 - 2 up toward 0.
        const double expected = start / (1.0 - 2.0 * up);
        const double se = standard_error(leap);
        CHECK(std::abs(mean_of(leap) - expected) <= 4 * se);
      }
    }
  }
}

TEST_CASE("symmetric hitting time from 1 follows the Catalan law") {
  PhiloxEngine engine(5, StreamDomain::kRandomWalk);
  const int n = 100000;
  std::vector<std::int64_t> counts(6, 0);  // k = 1..5, then the tail
  for (int i = 0; i < n; ++i) {
    const auto r = hitting_time(engine, 1, 0.5, kDefaultSkeletonCap);
    REQUIRE(r.steps % 2 == 1);
    const auto k = (r.steps + 1) / 2;
    ++counts[static_cast<std::size_t>(std::min<std::int64_t>(k, 6) - 1)];
  }
  std::vector<double> probs;
  double head = 0.0;
  for (int k = 1; k <= 5; ++k) {
    probs.push_back(srw_hit_prob(k));
    head += probs.back();
  }
  probs.push_back(1.0 - head);
  CHECK(chi_square_goodness(counts, probs).p_value >= 0.001);
}

TEST_CASE("hitting time censoring") {
  PhiloxEngine engine(8, StreamDomain::kRandomWalk);
  int censored = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto r = hitting_time(engine, 1, 0.5, 10);
    if (r.censored) {
      ++censored;
    } else {
      CHECK(r.steps <= 10);
    }
  }
  // P(T > 10) = P(T >= 11) = 1 - sum_{k<=5} P(T = 2k - 1).
  double head = 0.0;
  for (int k = 1; k <= 5; ++k) head += srw_hit_prob(k);
  const double p = 1.0 - head;
  CHECK(std::abs(censored / 2000.0 - p) <= 4 * std::sqrt(p * (1 - p) / 2000));
}

TEST_CASE("sum of geometrics moments") {
  PhiloxEngine engine(3, StreamDomain::kGeneric);
  for (const std::int64_t count : {std::int64_t{0}, std::int64_t{1}, std::int64_t{7},
                                   std::int64_t{33}, std::int64_t{5000}}) {
    for (const double a : {0.8, 0.3}) {
      std::vector<double> draws;
      for (int i = 0; i < 20000; ++i) {
        const auto s = sum_of_geometrics(engine, count, a);
        REQUIRE(s >= count);
        draws.push_back(static_cast<double>(s));
      }
      const double mean = count / a;
      const double var = count * (1 - a) / (a * a);
      CHECK(std::abs(mean_of(draws) - mean) <= 4 * std::sqrt(var / draws.size()) + 1e-12);
    }
  }
}

TEST_CASE("coupled geometric is dominated and has the target marginal") {
  PhiloxEngine engine(21, StreamDomain::kCoupling);
  const double source = 0.4;  // pf at p = 0.6, f = f_c
  const double target = 0.8;  // 2q
  const GeometricLaw law(source);
  const GeometricLaw target_law(target);
  const int n = 200000;
  std::vector<std::int64_t> counts(5, 0);
  for (int i = 0; i < n; ++i) {
    const std::int64_t h = law.quantile(engine.uniform());
    const std::int64_t hp = coupled_geometric(h, source, target, engine.uniform());
    REQUIRE(hp >= 1);
    REQUIRE(hp <= h);
    ++counts[static_cast<std::size_t>(std::min<std::int64_t>(hp, 5) - 1)];
  }
  std::vector<double> probs;
  for (int k = 1; k <= 4; ++k) probs.push_back(target_law.pmf(k));
  probs.push_back(1.0 - target_law.cdf(4));
  CHECK(chi_square_goodness(counts, probs).p_value >= 0.001);
}

TEST_CASE("excursion sampler matches the step-by-step path reference") {
  // Positive recurrent parameters keep the reference walk short.
  const ModelParams params(0.6, 0.3);
  ExcursionSampler fast(params, 17);
  PhiloxEngine slow_engine(18, StreamDomain::kExcursion);
  std::vector<double> mu_a, mu_b, h_a, h_b, tau_a, tau_b, alpha_a, alpha_b;
  for (int i = 0; i < 20000; ++i) {
    const auto a = fast.next();
    const auto b = sample_excursion_path(params, slow_engine, 1'000'000);
    REQUIRE_FALSE(a.censored);
    REQUIRE_FALSE(b.censored);
    mu_a.push_back(a.mu);
    mu_b.push_back(b.mu);
    h_a.push_back(a.h_tilde);
    h_b.push_back(b.h_tilde);
    tau_a.push_back(a.tau);
    tau_b.push_back(b.tau);
    alpha_a.push_back(a.alpha);
    alpha_b.push_back(b.alpha);
  }
  CHECK(two_sample_ks(EmpiricalSample(mu_a), EmpiricalSample(mu_b)).p_value >= 0.001);
  CHECK(two_sample_ks(EmpiricalSample(h_a), EmpiricalSample(h_b)).p_value >= 0.001);
  CHECK(two_sample_ks(EmpiricalSample(tau_a), EmpiricalSample(tau_b)).p_value >= 0.001);
  CHECK(two_sample_ks(EmpiricalSample(alpha_a), EmpiricalSample(alpha_b)).p_value >= 0.001);

  // First-step analysis: E mu = q / (pf); the zero holding time is Geom(pf).
  CHECK(std::abs(mean_of(mu_a) - expected_mu(0.6, 0.3)) <= 4 * standard_error(mu_a));
  CHECK(std::abs(mean_of(h_a) - 1.0 / (0.6 * 0.3)) <= 4 * standard_error(h_a));
}

TEST_CASE("excursion records chain their indices and start times") {
  const auto batch = sample_excursions(ModelParams::critical(0.6), 500, 3);
  REQUIRE(batch.records.size() == 500);
  std::int64_t sigma = 0;
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    const auto& r = batch.records[i];
    CHECK(r.k == static_cast<std::int64_t>(i) + 1);
    CHECK(r.sigma == sigma);
    CHECK(r.h_prime <= r.h_tilde);
    CHECK(r.tau % 2 == 0);
    CHECK(r.alpha >= r.tau - 1);
    sigma += r.duration();
  }
}

TEST_CASE("censored excursions are flagged and skipped") {
  ExcursionSampler sampler(ModelParams::critical(0.6), 4, 8);
  int flagged = 0;
  std::vector<ExcursionRecord> records;
  for (int i = 0; i < 500; ++i) {
    const auto r = sampler.next();
    flagged += r.censored;
    records.push_back(r);
    if (!r.censored) CHECK(r.tau <= 8);
  }
  CHECK(flagged == sampler.censored());
  CHECK(flagged > 0);
  const auto agg = aggregate_excursions(records);
  CHECK(agg.count() == 500 - flagged);
}

TEST_CASE("aggregates and the counting process") {
  std::vector<ExcursionRecord> recs(3);
  recs[0].h_tilde = 3;
  recs[0].alpha = 1;
  recs[0].h_prime = 1;
  recs[0].tau = 2;
  recs[1].h_tilde = 1;
  recs[1].alpha = 5;
  recs[1].h_prime = 1;
  recs[1].tau = 4;
  recs[2].h_tilde = 2;
  recs[2].alpha = 1;
  recs[2].h_prime = 2;
  recs[2].tau = 2;
  const auto agg = aggregate_excursions(recs);
  CHECK(agg.V == std::vector<std::int64_t>{0, 4, 10, 13});
  CHECK(agg.V_prime == std::vector<std::int64_t>{0, 2, 8, 11});
  CHECK(agg.T == std::vector<std::int64_t>{0, 2, 6, 8});
  CHECK(agg.N(0) == 0);
  CHECK(agg.N(3) == 0);
  CHECK(agg.N(4) == 1);
  CHECK(agg.N(12) == 2);
  CHECK(agg.N(100) == 3);
  CHECK(agg.first_dominance_violation() == -1);

  recs[1].h_prime = 9;
  CHECK(aggregate_excursions(recs).first_dominance_violation() == 2);
}

TEST_CASE("path tracker agrees with the excursion sampler in law") {
  // At f_c a single path has only ~sqrt(n) excursions; use pf < q.
  const ModelParams params(0.6, 0.3);
  const PrimitiveStream stream(55, params.q());
  PathExcursionTracker tracker;
  ReducedState state;
  advance_reduced(state, params, stream, 2'000'000,
                  [&](const Counters& b, const Primitive& p, const Counters& a) { tracker.observe(b, p, a); });
  const auto& settled = tracker.settled_mu();
  REQUIRE(settled.size() > 1000);

  const auto batch = sample_excursions(params, static_cast<std::int64_t>(settled.size()), 56);
  std::vector<double> path_mu = as_doubles(settled), sampled_mu;
  for (const auto& r : batch.records) sampled_mu.push_back(r.mu);
  CHECK(two_sample_ks(EmpiricalSample(path_mu), EmpiricalSample(sampled_mu)).p_value >= 0.001);

  // Completed excursions tile the path.
  std::int64_t sigma = 0;
  for (const auto& r : tracker.completed()) {
    REQUIRE(r.sigma == sigma);
    REQUIRE(r.tau % 2 == 0);
    sigma += r.duration();
  }
}

TEST_CASE("occupation sandwich holds on simulated paths (property)") {
  const ModelParams params = ModelParams::critical(0.6);
  std::vector<std::int64_t> cps;
  for (std::int64_t k = 1000; k < 200000; k += 1000) cps.push_back(k);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto check = occupation_vs_excursions(params, 200000, derive_seed(77, s), cps);
    CHECK(check.violations == 0);
    CHECK(check.points.size() == cps.size() + 1);
    CHECK(check.terminal == run_trajectory(params, 200000, derive_seed(77, s), SimMode::kReduced).terminal);
    for (const auto& pt : check.points) {
      REQUIRE(pt.holds());
    }
  }
}

TEST_CASE("srw return times and ladder epochs") {
  SrwExcursionOracle oracle(9);
  const int n = 100000;
  std::vector<std::int64_t> counts(4, 0);
  for (int i = 0; i < n; ++i) {
    const auto r = oracle.return_time();
    REQUIRE(r.steps % 2 == 0);
    ++counts[static_cast<std::size_t>(std::min<std::int64_t>(r.steps / 2, 4) - 1)];
  }
  // t_1 = 1 + (hit from 1), so P(t_1 = 2k) = Catalan(k - 1) / 2^(2k - 1).
  const std::vector<double> probs = {srw_hit_prob(1), srw_hit_prob(2), srw_hit_prob(3),
                                     1.0 - srw_hit_prob(1) - srw_hit_prob(2) - srw_hit_prob(3)};
  CHECK(chi_square_goodness(counts, probs).p_value >= 0.001);

  const auto ladder = oracle.ladder_times(50);
  CHECK(ladder.Y.size() == 50);
  std::int64_t total = 0;
  for (const auto y : ladder.Y) {
    CHECK(y % 2 == 1);
    total += y;
  }
  CHECK(total == ladder.gamma);

  const auto times = sample_srw_return_times(1000, 10);
  CHECK(times.values.size() == 1000);
}

TEST_CASE("stable scaling sample is independent of thread count") {
  const auto one = stable_scaling_sample(50, 40, 123, 1);
  const auto two = stable_scaling_sample(50, 40, 123, 2);
  CHECK(one.values == two.values);
  CHECK(one.values.size() == 40);
  for (const double v : one.values) CHECK(v > 0.0);
}

TEST_CASE("excursion csv header") {
  const auto batch = sample_excursions(ModelParams::critical(0.6), 3, 1);
  std::ostringstream out;
  write_excursions_csv(out, batch.records);
  CHECK(out.str().rfind("k,sigma,h_tilde,alpha,tau,mu\n", 0) == 0);
}

#pragma once

// Excursions of L away from zero and the reduction to the simple symmetric
// random walk.
//
// An excursion starts with L = 0 at step sigma, holds at zero for h_tilde
// steps (the last of which is the birth that moves L to 1), then spends
// alpha steps at positive levels until L returns from 1 to 0. tau counts
// the excursion's skeleton moves (transitions that change L) and mu the
// death attempts made while L = 0.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gms/model.hpp"
#include "gms/params.hpp"
#include "gms/rng.hpp"

namespace gms {

/// Skeleton walks longer than this are censored. Large enough that the
/// excluded mass does not move any acceptance statistic.
inline constexpr std::int64_t kDefaultSkeletonCap = 1'000'000'000'000;

struct ExcursionRecord {
  std::int64_t k = 0;
  std::int64_t sigma = 0;
  std::int64_t h_tilde = 0;
  std::int64_t alpha = 0;
  std::int64_t tau = 0;
  std::int64_t mu = 0;
  // Geom(2q) draw coupled to h_tilde through one uniform: h_prime <= h_tilde.
  std::int64_t h_prime = 0;
  bool censored = false;

  std::int64_t duration() const { return h_tilde + alpha; }
};

enum class WalkMethod {
  // Exact leaps: from distance d the walk cannot reach 0 in fewer than d
  // steps, so d steps are taken at once as a binomial increment.
  kLeaping,
  // One step at a time (serial reference).
  kStepwise,
};

struct WalkResult {
  std::int64_t steps;
  bool censored;
};

/// First time a nearest-neighbour walk started at `start` > 0 (up with
/// probability up_prob, down otherwise) hits 0; censored once it would
/// exceed `cap` steps.
WalkResult hitting_time(PhiloxEngine& engine, std::int64_t start, double up_prob,
                        std::int64_t cap, WalkMethod method = WalkMethod::kLeaping);

/// Sum of `count` independent Geom(a) variables (support {1, 2, ...}).
std::int64_t sum_of_geometrics(PhiloxEngine& engine, std::int64_t count, double a);

/// Geom(target) draw driven by the same uniform that produced
/// h ~ Geom(source): the uniform is resampled inside h's inverse-CDF bucket.
std::int64_t coupled_geometric(std::int64_t h, double source, double target,
                               double v);

/// One excursion of L from zero. The zero-holding period is simulated step
/// by step from (J, U) draws; positive levels are covered by the skeleton
/// walk (up with probability pf / (pf + q)) and Geom(pf + q) holding times.
/// At f = f_c the skeleton is the simple symmetric random walk.
class ExcursionSampler {
 public:
  ExcursionSampler(const ModelParams& params, std::uint64_t seed,
                   std::int64_t cap = kDefaultSkeletonCap,
                   WalkMethod method = WalkMethod::kLeaping);

  /// Next excursion; k and sigma continue from the previous non-censored one.
  ExcursionRecord next();

  std::int64_t censored() const { return censored_; }

 private:
  ModelParams params_;
  PhiloxEngine engine_;
  PhiloxEngine coupling_;
  std::int64_t cap_;
  WalkMethod method_;
  std::int64_t next_k_ = 1;
  std::int64_t next_sigma_ = 0;
  std::int64_t censored_ = 0;
};

/// Reference excursion sampler that walks L one chain step at a time from
/// (J, U) draws, measuring every observable on the path. alpha is capped.
ExcursionRecord sample_excursion_path(const ModelParams& params, PhiloxEngine& engine,
                                      std::int64_t alpha_cap);

/// `count` non-censored excursions from ExcursionSampler(params, seed).
struct ExcursionBatch {
  std::vector<ExcursionRecord> records;
  std::int64_t censored = 0;
};
ExcursionBatch sample_excursions(const ModelParams& params, std::int64_t count,
                                 std::uint64_t seed,
                                 std::int64_t cap = kDefaultSkeletonCap);

/// Cumulative excursion durations; index m holds the value after m
/// excursions (V[0] = 0).
struct ExcursionAggregates {
  std::vector<std::int64_t> V;
  std::vector<std::int64_t> V_prime;
  std::vector<std::int64_t> T;

  std::int64_t count() const { return static_cast<std::int64_t>(V.size()) - 1; }
  /// max{m : V_m <= k}, the number of excursions completed by time k.
  std::int64_t N(std::int64_t k) const;
  /// First m with V_m < V'_m, or -1 when dominance holds everywhere.
  std::int64_t first_dominance_violation() const;
};

/// Censored records are skipped.
ExcursionAggregates aggregate_excursions(std::span<const ExcursionRecord> records);

/// Splits a trajectory's L path into excursions as it is stepped.
class PathExcursionTracker {
 public:
  void observe(const Counters& before, const Primitive& prim, const Counters& after);

  const std::vector<ExcursionRecord>& completed() const { return completed_; }
  std::int64_t completed_count() const {
    return static_cast<std::int64_t>(completed_.size());
  }
  bool holding() const { return holding_; }
  /// mu of every excursion whose zero-holding period is over, by index.
  const std::vector<std::int64_t>& settled_mu() const { return settled_mu_; }
  /// Deaths so far in the running holding period.
  std::int64_t pending_mu() const { return current_.mu; }

 private:
  std::vector<ExcursionRecord> completed_;
  std::vector<std::int64_t> settled_mu_;
  ExcursionRecord current_{1, 0, 0, 0, 0, 0, 0, false};
  bool holding_ = true;
};

struct SandwichPoint {
  std::int64_t n;
  std::int64_t eta;
  std::int64_t N;
  std::int64_t lower;  // sum_{k <= N} mu_k
  std::int64_t upper;  // sum_{k <= N+1} mu_k
  bool holds() const { return lower <= eta && eta <= upper; }
  bool tight() const { return lower == eta; }
};

struct SandwichCheck {
  std::vector<SandwichPoint> points;
  std::int64_t violations = 0;
  // Instants with sum_{k<=N} mu_k == eta (the strict left inequality fails).
  std::int64_t tight = 0;
  Counters terminal;
};

/// Runs a reduced trajectory to `horizon` while decomposing it into
/// excursions, and checks the occupation sandwich at each checkpoint (and at
/// the horizon). The stream is followed past the horizon only as far as
/// needed to settle the pending excursion's mu.
SandwichCheck occupation_vs_excursions(const ModelParams& params, std::int64_t horizon,
                                       std::uint64_t seed,
                                       std::span<const std::int64_t> checkpoints = {});

/// Return times and ladder epochs of the simple symmetric random walk.
class SrwExcursionOracle {
 public:
  explicit SrwExcursionOracle(std::uint64_t seed, std::int64_t cap = kDefaultSkeletonCap,
                              WalkMethod method = WalkMethod::kLeaping);

  /// t_1: time to return to 0 from 0 (even, >= 2).
  WalkResult return_time();

  struct Ladder {
    std::vector<std::int64_t> Y;  // Y_0 .. Y_{m-1}
    std::int64_t gamma = 0;       // gamma_m = sum of Y
    bool censored = false;
  };
  /// Ladder epochs gamma_{i+1} = first time after gamma_i with S = i + 1.
  Ladder ladder_times(std::int64_t height);

 private:
  PhiloxEngine engine_;
  std::int64_t cap_;
  WalkMethod method_;
};

struct ReturnTimes {
  std::vector<std::int64_t> values;
  std::int64_t censored = 0;
};
/// m uncensored copies of t_1; censored walks are redrawn and counted.
ReturnTimes sample_srw_return_times(std::int64_t m, std::uint64_t seed,
                                    std::int64_t cap = kDefaultSkeletonCap,
                                    WalkMethod method = WalkMethod::kLeaping);

struct StableScaling {
  std::vector<double> values;  // T_m / m^2 per replica
  std::int64_t censored = 0;
};
/// Replica r uses derive_seed(seed, r); runs replicas in parallel.
StableScaling stable_scaling_sample(std::int64_t m, std::int64_t replicas,
                                    std::uint64_t seed, int threads = 0,
                                    std::int64_t cap = kDefaultSkeletonCap);

/// CSV with header `k,sigma,h_tilde,alpha,tau,mu`.
void write_excursions_csv(std::ostream& out, std::span<const ExcursionRecord> records);

}  // namespace gms

#include "gms/excursion.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "gms/analytic.hpp"
#include "gms/parallel.hpp"

namespace gms {

namespace {

// Below this distance single steps are cheaper than a binomial draw.
constexpr std::int64_t kLeapThreshold = 16;

WalkResult hitting_time_stepwise(PhiloxEngine& engine, std::int64_t pos, double up_prob,
                                 std::int64_t cap) {
  std::int64_t t = 0;
  while (pos > 0) {
    if (t == cap) {
      return {t, true};
    }
    pos += engine.uniform() < up_prob ? 1 : -1;
    ++t;
  }
  return {t, false};
}

WalkResult hitting_time_leaping(PhiloxEngine& engine, std::int64_t pos, double up_prob,
                                std::int64_t cap) {
  std::int64_t t = 0;
  while (pos > 0) {
    // Zero is at least `pos` steps away, and can only be reached on the
    // last of them (all steps down).
    if (pos > cap - t) {
      return {t, true};
    }
    if (pos < kLeapThreshold) {
      pos += engine.uniform() < up_prob ? 1 : -1;
      ++t;
      continue;
    }
    std::binomial_distribution<std::int64_t> ups(pos, up_prob);
    const std::int64_t leap = pos;
    pos += 2 * ups(engine) - leap;
    t += leap;
  }
  return {t, false};
}

struct Holding {
  std::int64_t h = 0;
  std::int64_t mu = 0;
};

// Zero-holding period: each step is a death attempt (J = 1), a birth with
// fitness >= f (L stays 0) or a birth with fitness < f, which ends it.
Holding simulate_zero_holding(const ModelParams& params, PhiloxEngine& engine) {
  Holding out;
  for (;;) {
    ++out.h;
    const bool death = engine.uniform() < params.q();
    const double u = engine.uniform();
    if (death) {
      ++out.mu;
    } else if (u < params.f()) {
      return out;
    }
  }
}

}  // namespace

WalkResult hitting_time(PhiloxEngine& engine, std::int64_t start, double up_prob,
                        std::int64_t cap, WalkMethod method) {
  if (start <= 0) {
    throw std::invalid_argument("hitting_time needs start > 0");
  }
  return method == WalkMethod::kLeaping
             ? hitting_time_leaping(engine, start, up_prob, cap)
             : hitting_time_stepwise(engine, start, up_prob, cap);
}

std::int64_t sum_of_geometrics(PhiloxEngine& engine, std::int64_t count, double a) {
  if (count <= 0) {
    return 0;
  }
  if (a >= 1.0) {
    return count;
  }
  if (count <= 32) {
    std::geometric_distribution<std::int64_t> failures(a);
    std::int64_t total = count;
    for (std::int64_t i = 0; i < count; ++i) {
      total += failures(engine);
    }
    return total;
  }
  std::negative_binomial_distribution<std::int64_t> failures(count, a);
  return count + failures(engine);
}

std::int64_t coupled_geometric(std::int64_t h, double source, double target, double v) {
  const GeometricLaw from(source);
  const double lo = from.cdf(h - 1);
  const double hi = from.cdf(h);
  return GeometricLaw(target).quantile(lo + v * (hi - lo));
}

ExcursionSampler::ExcursionSampler(const ModelParams& params, std::uint64_t seed,
                                   std::int64_t cap, WalkMethod method)
    : params_(params),
      engine_(seed, StreamDomain::kExcursion),
      coupling_(seed, StreamDomain::kCoupling),
      cap_(cap),
      method_(method) {
  if (cap < 2) {
    throw std::invalid_argument("skeleton cap must be at least 2");
  }
}

ExcursionRecord ExcursionSampler::next() {
  const double pf = params_.p() * params_.f();
  const double leave = pf + params_.q();

  ExcursionRecord rec;
  rec.k = next_k_;
  rec.sigma = next_sigma_;
  const Holding holding = simulate_zero_holding(params_, engine_);
  rec.h_tilde = holding.h;
  rec.mu = holding.mu;
  rec.h_prime = coupled_geometric(rec.h_tilde, pf, 2.0 * params_.q(), coupling_.uniform());

  // The 0 -> 1 move is the first skeleton step.
  const WalkResult walk = hitting_time(engine_, 1, pf / leave, cap_ - 1, method_);
  if (walk.censored) {
    rec.censored = true;
    ++censored_;
    return rec;
  }
  rec.tau = 1 + walk.steps;
  // One holding period per visit to a positive level.
  rec.alpha = sum_of_geometrics(engine_, rec.tau - 1, leave);
  ++next_k_;
  next_sigma_ += rec.duration();
  return rec;
}

ExcursionRecord sample_excursion_path(const ModelParams& params, PhiloxEngine& engine,
                                      std::int64_t alpha_cap) {
  ExcursionRecord rec;
  rec.k = 1;
  const Holding holding = simulate_zero_holding(params, engine);
  rec.h_tilde = holding.h;
  rec.mu = holding.mu;
  rec.tau = 1;
  std::int64_t level = 1;
  while (level > 0) {
    if (rec.alpha == alpha_cap) {
      rec.censored = true;
      return rec;
    }
    ++rec.alpha;
    const bool death = engine.uniform() < params.q();
    const double u = engine.uniform();
    if (death) {
      --level;
      ++rec.tau;
    } else if (u < params.f()) {
      ++level;
      ++rec.tau;
    }
  }
  return rec;
}

ExcursionBatch sample_excursions(const ModelParams& params, std::int64_t count,
                                 std::uint64_t seed, std::int64_t cap) {
  ExcursionSampler sampler(params, seed, cap);
  ExcursionBatch batch;
  batch.records.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  while (static_cast<std::int64_t>(batch.records.size()) < count) {
    ExcursionRecord rec = sampler.next();
    if (!rec.censored) {
      batch.records.push_back(rec);
    }
  }
  batch.censored = sampler.censored();
  return batch;
}

std::int64_t ExcursionAggregates::N(std::int64_t k) const {
  const auto it = std::upper_bound(V.begin(), V.end(), k);
  return static_cast<std::int64_t>(it - V.begin()) - 1;
}

std::int64_t ExcursionAggregates::first_dominance_violation() const {
  for (std::size_t m = 0; m < V.size(); ++m) {
    if (V[m] < V_prime[m]) {
      return static_cast<std::int64_t>(m);
    }
  }
  return -1;
}

ExcursionAggregates aggregate_excursions(std::span<const ExcursionRecord> records) {
  ExcursionAggregates agg;
  agg.V.reserve(records.size() + 1);
  agg.V_prime.reserve(records.size() + 1);
  agg.T.reserve(records.size() + 1);
  agg.V.push_back(0);
  agg.V_prime.push_back(0);
  agg.T.push_back(0);
  for (const auto& rec : records) {
    if (rec.censored) {
      continue;
    }
    agg.V.push_back(agg.V.back() + rec.h_tilde + rec.alpha);
    agg.V_prime.push_back(agg.V_prime.back() + rec.h_prime + rec.alpha);
    agg.T.push_back(agg.T.back() + rec.tau);
  }
  return agg;
}

void PathExcursionTracker::observe(const Counters& before, const Primitive& prim,
                                   const Counters& after) {
  if (holding_) {
    ++current_.h_tilde;
    if (prim.death) {
      ++current_.mu;
    }
    if (after.L == 1) {
      holding_ = false;
      current_.tau = 1;
      settled_mu_.push_back(current_.mu);
    }
    return;
  }
  ++current_.alpha;
  if (after.L != before.L) {
    ++current_.tau;
  }
  if (after.L == 0) {
    completed_.push_back(current_);
    current_ = ExcursionRecord{current_.k + 1, after.n, 0, 0, 0, 0, 0, false};
    holding_ = true;
  }
}

SandwichCheck occupation_vs_excursions(const ModelParams& params, std::int64_t horizon,
                                       std::uint64_t seed,
                                       std::span<const std::int64_t> checkpoints) {
  if (horizon < 0) {
    throw UsageError("horizon must be non-negative");
  }
  std::vector<std::int64_t> stops(checkpoints.begin(), checkpoints.end());
  for (std::size_t i = 0; i < stops.size(); ++i) {
    if (stops[i] < 0 || stops[i] > horizon || (i > 0 && stops[i] <= stops[i - 1])) {
      throw UsageError("checkpoints must be strictly increasing within [0, horizon]");
    }
  }
  if (stops.empty() || stops.back() != horizon) {
    stops.push_back(horizon);
  }

  const PrimitiveStream stream(seed, params.q());
  ReducedState state;
  PathExcursionTracker tracker;
  auto observe = [&](const Counters& b, const Primitive& prim, const Counters& a) {
    tracker.observe(b, prim, a);
  };

  SandwichCheck check;
  check.points.reserve(stops.size());
  for (const std::int64_t stop : stops) {
    advance_reduced(state, params, stream, stop - state.n, observe);
    check.points.push_back({stop, state.eta, tracker.completed_count(), 0, 0});
  }
  check.terminal = state;
  while (tracker.holding()) {
    advance_reduced(state, params, stream, 1, observe);
  }

  const auto& mus = tracker.settled_mu();
  std::vector<std::int64_t> prefix(mus.size() + 1, 0);
  std::partial_sum(mus.begin(), mus.end(), prefix.begin() + 1);
  for (auto& point : check.points) {
    point.lower = prefix[static_cast<std::size_t>(point.N)];
    point.upper = prefix[static_cast<std::size_t>(point.N) + 1];
    if (!point.holds()) {
      ++check.violations;
    }
    if (point.tight()) {
      ++check.tight;
    }
  }
  return check;
}

SrwExcursionOracle::SrwExcursionOracle(std::uint64_t seed, std::int64_t cap,
                                       WalkMethod method)
    : engine_(seed, StreamDomain::kRandomWalk), cap_(cap), method_(method) {
  if (cap < 2) {
    throw std::invalid_argument("random walk cap must be at least 2");
  }
}

WalkResult SrwExcursionOracle::return_time() {
  // Whatever the direction of the first step, |S| then has to travel from 1
  // back to 0, and the reflected walk is again symmetric.
  engine_();
  const WalkResult back = hitting_time(engine_, 1, 0.5, cap_ - 1, method_);
  return {1 + back.steps, back.censored};
}

SrwExcursionOracle::Ladder SrwExcursionOracle::ladder_times(std::int64_t height) {
  if (height < 1) {
    throw std::invalid_argument("ladder height must be >= 1");
  }
  Ladder ladder;
  ladder.Y.reserve(static_cast<std::size_t>(height));
  for (std::int64_t i = 0; i < height; ++i) {
    // Reaching i + 1 from i is hitting 0 from distance 1 by symmetry.
    const WalkResult w = hitting_time(engine_, 1, 0.5, cap_, method_);
    if (w.censored) {
      ladder.censored = true;
      return ladder;
    }
    ladder.Y.push_back(w.steps);
    ladder.gamma += w.steps;
  }
  return ladder;
}

ReturnTimes sample_srw_return_times(std::int64_t m, std::uint64_t seed, std::int64_t cap,
                                    WalkMethod method) {
  if (m < 1) {
    throw UsageError("need at least one return time");
  }
  SrwExcursionOracle oracle(seed, cap, method);
  ReturnTimes out;
  out.values.reserve(static_cast<std::size_t>(m));
  while (static_cast<std::int64_t>(out.values.size()) < m) {
    const WalkResult w = oracle.return_time();
    if (w.censored) {
      ++out.censored;
    } else {
      out.values.push_back(w.steps);
    }
  }
  return out;
}

StableScaling stable_scaling_sample(std::int64_t m, std::int64_t replicas,
                                    std::uint64_t seed, int threads, std::int64_t cap) {
  if (m < 1 || replicas < 1) {
    throw UsageError("stable scaling needs m >= 1 and replicas >= 1");
  }
  StableScaling out;
  out.values.assign(static_cast<std::size_t>(replicas), 0.0);
  std::vector<std::int64_t> censored(static_cast<std::size_t>(replicas), 0);
  const double scale = static_cast<double>(m) * static_cast<double>(m);
  for_each_replica(replicas, threads, [&](std::int64_t r) {
    const ReturnTimes times = sample_srw_return_times(m, derive_seed(seed, r), cap);
    const std::int64_t total =
        std::accumulate(times.values.begin(), times.values.end(), std::int64_t{0});
    out.values[static_cast<std::size_t>(r)] = static_cast<double>(total) / scale;
    censored[static_cast<std::size_t>(r)] = times.censored;
  });
  out.censored = std::accumulate(censored.begin(), censored.end(), std::int64_t{0});
  return out;
}

void write_excursions_csv(std::ostream& out, std::span<const ExcursionRecord> records) {
  out << "k,sigma,h_tilde,alpha,tau,mu\n";
  for (const auto& r : records) {
    out << r.k << ',' << r.sigma << ',' << r.h_tilde << ',' << r.alpha << ',' << r.tau
        << ',' << r.mu << '\n';
  }
}

}  // namespace gms

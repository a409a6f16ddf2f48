#include "gms/model.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gms {

namespace {

// std heap algorithms build max-heaps; invert the order for a min-heap.
struct HeapOrder {
  bool operator()(const Population::Entry& a, const Population::Entry& b) const {
    return b < a;
  }
};

}  // namespace

void PrimitiveStream::fill(std::int64_t start, std::span<Primitive> out) const {
  // Structure-of-arrays Philox so the rounds vectorize across the batch.
  std::array<std::uint32_t, kBatch> c0, c1, c2, c3;
  for (std::size_t offset = 0; offset < out.size(); offset += kBatch) {
    const std::size_t count = std::min<std::size_t>(kBatch, out.size() - offset);
    for (std::size_t i = 0; i < count; ++i) {
      const auto n = static_cast<std::uint64_t>(start) + offset + i;
      c0[i] = static_cast<std::uint32_t>(n);
      c1[i] = static_cast<std::uint32_t>(n >> 32);
      c2[i] = static_cast<std::uint32_t>(StreamDomain::kTrajectory);
      c3[i] = 0u;
    }
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c0[i];
        const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c2[i];
        const auto n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[i] ^ k0;
        const auto n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[i] ^ k1;
        c1[i] = static_cast<std::uint32_t>(p1);
        c3[i] = static_cast<std::uint32_t>(p0);
        c0[i] = n0;
        c2[i] = n2;
      }
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    for (std::size_t i = 0; i < count; ++i) {
      out[offset + i] = make(c0[i], c1[i], c2[i], c3[i]);
    }
  }
}

void Population::insert(Entry e) {
  heap_.push_back(e);
  std::push_heap(heap_.begin(), heap_.end(), HeapOrder{});
}

Population::Entry Population::pop_min() {
  std::pop_heap(heap_.begin(), heap_.end(), HeapOrder{});
  const Entry e = heap_.back();
  heap_.pop_back();
  return e;
}

StepOutcome step_full(FullState& s, const ModelParams& params, bool death, double u) {
  Counters& c = s.counters;
  StepOutcome outcome{};
  if (!death) {
    s.population.insert({u, c.n});
    ++c.X;
    if (u < params.f()) {
      ++c.L;
    } else {
      ++c.B;
    }
    outcome = {StepKind::kBirth, u};
  } else if (c.X == 0) {
    ++c.C;
    ++c.eta;
    outcome = {StepKind::kHoldAtZero, std::nullopt};
  } else {
    const Population::Entry removed = s.population.pop_min();
    --c.X;
    if (removed.fitness < params.f()) {
      --c.L;
    } else {
      // An R species dies only when no sub-threshold species is alive.
      ++c.Delta;
      ++c.eta;
    }
    outcome = {StepKind::kDeath, removed.fitness};
  }
  ++c.n;
  return outcome;
}

void check_invariants(const Counters& c) {
  auto fail = [&](const char* what) {
    std::ostringstream msg;
    msg << "invariant violated at n=" << c.n << ": " << what;
    throw std::logic_error(msg.str());
  };
  if (c.X < 0) fail("X >= 0");
  if (c.L < 0) fail("L >= 0");
  if (c.R() < 0) fail("R >= 0");
  if (c.B < c.R()) fail("B >= R");
  if (c.Delta != c.B - c.R()) fail("Delta = B - R");
  if (c.Delta != c.eta - c.C) fail("Delta = eta - C");
}

void check_invariants(const FullState& s, const ModelParams& params) {
  check_invariants(s.counters);
  const auto entries = s.population.entries();
  if (static_cast<std::int64_t>(entries.size()) != s.counters.X) {
    throw std::logic_error("population size differs from X");
  }
  const auto below = std::count_if(entries.begin(), entries.end(), [&](const auto& e) {
    return e.fitness < params.f();
  });
  if (below != s.counters.L) {
    throw std::logic_error("sub-threshold population differs from L");
  }
}

TrajectorySeries run_trajectory(const ModelParams& params, std::int64_t n_steps,
                                std::uint64_t seed, SimMode mode,
                                std::span<const std::int64_t> checkpoints) {
  if (n_steps < 0) {
    throw UsageError("n_steps must be non-negative");
  }
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0 || checkpoints[i] > n_steps) {
      std::ostringstream msg;
      msg << "checkpoint " << checkpoints[i] << " outside [0, " << n_steps << "]";
      throw UsageError(msg.str());
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw UsageError("checkpoints must be strictly increasing");
    }
  }

  TrajectorySeries series{mode, {}, {}, std::nullopt};
  series.snapshots.reserve(checkpoints.size() + 1);
  const PrimitiveStream stream(seed, params.q());

  if (mode == SimMode::kReduced) {
    ReducedState s;
    for (const std::int64_t cp : checkpoints) {
      advance_reduced(s, params, stream, cp - s.n);
      series.snapshots.push_back({cp, s});
    }
    advance_reduced(s, params, stream, n_steps - s.n);
    series.terminal = s;
  } else {
    FullState s;
    auto run_to = [&](std::int64_t target) {
      while (s.counters.n < target) {
        const Primitive prim = stream.at(s.counters.n);
        step_full(s, params, prim.death, prim.u);
      }
    };
    for (const std::int64_t cp : checkpoints) {
      run_to(cp);
      series.snapshots.push_back({cp, s.counters});
    }
    run_to(n_steps);
    series.terminal = s.counters;
    series.terminal_fitness = surviving_fitness_above(s, 0.0);
  }
  if (series.snapshots.empty() || series.snapshots.back().step != n_steps) {
    series.snapshots.push_back({n_steps, series.terminal});
  }
  return series;
}

std::vector<double> surviving_fitness_above(const FullState& s, double threshold) {
  std::vector<double> out;
  for (const auto& e : s.population.entries()) {
    if (e.fitness >= threshold) {
      out.push_back(e.fitness);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> surviving_fitness_above(const TrajectorySeries& series,
                                            double threshold) {
  if (series.mode != SimMode::kFull || !series.terminal_fitness) {
    throw ModeError("surviving fitness values need a full-mode trajectory");
  }
  const auto& all = *series.terminal_fitness;
  return {std::lower_bound(all.begin(), all.end(), threshold), all.end()};
}

void write_trajectory_csv(std::ostream& out, const TrajectorySeries& series) {
  out << "step,X,L,R,B,Delta,eta,C\n";
  for (const auto& snap : series.snapshots) {
    const Counters& c = snap.counters;
    out << snap.step << ',' << c.X << ',' << c.L << ',' << c.R() << ',' << c.B << ','
        << c.Delta << ',' << c.eta << ',' << c.C << '\n';
  }
}

void write_fitness_values(std::ostream& out, std::span<const double> values) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  for (const double v : values) {
    out << v << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace gms

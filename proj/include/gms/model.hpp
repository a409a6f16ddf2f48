#pragma once

// Exact simulation of the species-survival chain.
//
// X is the number of living species, L those with fitness < f, R = X - L
// the rest, B the cumulative births with fitness >= f, Delta = B - R,
// eta the number of death attempts made while L = 0 and C the number of
// death attempts made while X = 0 (reflection events). Delta = eta - C
// holds on every path.

#include <algorithm>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gms/params.hpp"
#include "gms/rng.hpp"

namespace gms {

/// The per-step pair (J_n, U_n). J_n = 1 (probability q) selects a death
/// attempt; U_n is the fitness draw, produced on every step whether or not
/// it is used so that full and reduced modes consume the same stream.
struct Primitive {
  bool death;
  double u;
};

/// Random-access primitive stream: step n is a pure function of (seed, n).
class PrimitiveStream {
 public:
  static constexpr std::int64_t kBatch = 256;

  PrimitiveStream(std::uint64_t seed, double q) : key_(key_from_seed(seed)), q_(q) {}

  Primitive at(std::int64_t n) const {
    const auto n_bits = static_cast<std::uint64_t>(n);
    const auto out = philox4x32(
        {static_cast<std::uint32_t>(n_bits), static_cast<std::uint32_t>(n_bits >> 32),
         static_cast<std::uint32_t>(StreamDomain::kTrajectory), 0u},
        key_);
    return make(out[0], out[1], out[2], out[3]);
  }

  /// out[i] = at(start + i); the Philox rounds run over the whole batch.
  void fill(std::int64_t start, std::span<Primitive> out) const;

 private:
  Primitive make(std::uint32_t w0, std::uint32_t w1, std::uint32_t w2,
                 std::uint32_t w3) const {
    const std::uint64_t jump_bits = (static_cast<std::uint64_t>(w1) << 32) | w0;
    const std::uint64_t fitness_bits = (static_cast<std::uint64_t>(w3) << 32) | w2;
    return {to_unit_double(jump_bits) < q_, to_unit_double(fitness_bits)};
  }

  Philox4x32Key key_;
  double q_;
};

/// Counter block shared by both simulation modes.
struct Counters {
  std::int64_t n = 0;
  std::int64_t X = 0;
  std::int64_t L = 0;
  std::int64_t B = 0;
  std::int64_t Delta = 0;
  std::int64_t eta = 0;
  std::int64_t C = 0;

  std::int64_t R() const { return X - L; }
  bool at_zero() const { return X == 0; }

  bool operator==(const Counters&) const = default;
};

/// Reduced mode: counters only, O(1) memory.
using ReducedState = Counters;

enum class StepKind { kBirth, kDeath, kHoldAtZero };

struct StepOutcome {
  StepKind kind;
  // Birth: the newborn's fitness. Death: the removed fitness.
  std::optional<double> fitness;
};

/// Living species keyed by (fitness, birth step); a binary min-heap so that
/// deaths always remove the least fit, ties broken by age.
class Population {
 public:
  struct Entry {
    double fitness;
    std::int64_t birth_step;
    bool operator<(const Entry& o) const {
      return fitness < o.fitness || (fitness == o.fitness && birth_step < o.birth_step);
    }
  };

  void insert(Entry e);
  Entry pop_min();
  const Entry& min() const { return heap_.front(); }
  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }
  std::span<const Entry> entries() const { return heap_; }

 private:
  std::vector<Entry> heap_;
};

/// Full mode: counters plus the explicit fitness population.
struct FullState {
  Counters counters;
  Population population;
};

/// Reduced transition. When a death hits X > 0 the least fit species has
/// fitness < f exactly when L > 0, so no population is needed. Written
/// without branches: the chain's moves are unpredictable.
inline void step_reduced(ReducedState& s, const ModelParams& params, bool death,
                         double u) {
  const std::int64_t d = death;
  const std::int64_t birth = 1 - d;
  const std::int64_t low = u < params.f();
  const std::int64_t empty = s.X == 0;
  const std::int64_t has_low = s.L > 0;
  const std::int64_t death_at_low_zero = d * (1 - has_low);  // J = 1 and L = 0
  const std::int64_t reflected = d * empty;                  // J = 1 and X = 0
  s.X += birth - d + reflected;
  s.L += birth * low - d * has_low;
  s.B += birth * (1 - low);
  s.eta += death_at_low_zero;
  s.C += reflected;
  s.Delta += death_at_low_zero - reflected;
  ++s.n;
}

StepOutcome step_full(FullState& s, const ModelParams& params, bool death, double u);

/// Checks the per-step invariants (throws std::logic_error on violation).
void check_invariants(const Counters& c);
void check_invariants(const FullState& s, const ModelParams& params);

enum class SimMode { kFull, kReduced };

struct Snapshot {
  std::int64_t step;
  Counters counters;
};

struct TrajectorySeries {
  SimMode mode;
  std::vector<Snapshot> snapshots;
  Counters terminal;
  // Full mode only: terminal living fitness values, ascending.
  std::optional<std::vector<double>> terminal_fitness;
};

/// Advances a reduced state `steps` times along `stream`, calling
/// observer(state_before, primitive, state_after) after every step.
template <class Observer>
void advance_reduced(ReducedState& s, const ModelParams& params,
                     const PrimitiveStream& stream, std::int64_t steps,
                     Observer&& observer) {
  std::array<Primitive, PrimitiveStream::kBatch> batch;
  const std::int64_t end = s.n + steps;
  while (s.n < end) {
    const std::int64_t count = std::min(end - s.n, PrimitiveStream::kBatch);
    const std::span<Primitive> prims(batch.data(), static_cast<std::size_t>(count));
    stream.fill(s.n, prims);
    for (const Primitive& prim : prims) {
      const ReducedState before = s;
      step_reduced(s, params, prim.death, prim.u);
      observer(before, prim, s);
    }
  }
}

inline void advance_reduced(ReducedState& s, const ModelParams& params,
                            const PrimitiveStream& stream, std::int64_t steps) {
  advance_reduced(s, params, stream, steps,
                  [](const ReducedState&, const Primitive&, const ReducedState&) {});
}

/// Snapshots at each checkpoint (sorted, within [0, n_steps]) followed by the
/// terminal state if it is not already the last checkpoint. Throws
/// UsageError for malformed checkpoints.
TrajectorySeries run_trajectory(const ModelParams& params, std::int64_t n_steps,
                                std::uint64_t seed, SimMode mode,
                                std::span<const std::int64_t> checkpoints = {});

/// Living fitness values >= threshold, ascending.
std::vector<double> surviving_fitness_above(const FullState& s, double threshold);
/// Throws ModeError for a reduced-mode series.
std::vector<double> surviving_fitness_above(const TrajectorySeries& series,
                                            double threshold);

/// CSV with header `step,X,L,R,B,Delta,eta,C`.
void write_trajectory_csv(std::ostream& out, const TrajectorySeries& series);
/// One value per line, 17 significant digits.
void write_fitness_values(std::ostream& out, std::span<const double> values);

}  // namespace gms

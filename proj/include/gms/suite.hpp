#pragma once

// The acceptance experiment set shared by `gms_lab suite` and the
// acceptance test binary.

#include <cstdint>
#include <string>
#include <vector>

#include "gms/montecarlo.hpp"

namespace gms {

inline constexpr std::uint64_t kSuiteSeed = 20261016;

struct SuiteEntry {
  std::string criterion;  // "A1" .. "A9"
  std::string title;
  ExperimentSpec spec;
};

/// Full-size configurations, or with `quick` every n and replica count
/// divided by 10 (at least 1) and sampling tolerances widened by sqrt(10).
std::vector<SuiteEntry> acceptance_suite(bool quick, std::uint64_t master_seed = kSuiteSeed);

/// Default spec for a single experiment subcommand (the suite's first
/// configuration of that kind, before any user overrides).
ExperimentSpec default_spec(ExperimentKind kind, std::uint64_t master_seed = kSuiteSeed);

}  // namespace gms

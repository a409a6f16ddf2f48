#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gms/model.hpp"
#include "gms/rng.hpp"

using namespace gms;

TEST_CASE("philox4x32-10 known-answer vectors") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                   {0xffffffffu, 0xffffffffu}) ==
        Philox4x32Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                   {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("splitmix64 finalizer matches the reference generator outputs") {
  // SplitMix64 seeded with 0 emits mix(k * golden) for k = 1, 2, ...
  constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;
  CHECK(splitmix64_mix(golden) == 0xE220A8397B1DCDAFull);
  CHECK(splitmix64_mix(2 * golden) == 0x6E789E6AA1B965F4ull);
  CHECK(derive_seed(0, 0) == splitmix64_mix(0xE220A8397B1DCDAFull));
}

TEST_CASE("derive_seed has no collisions over a million replica indices") {
  for (const std::uint64_t master : {0ull, 7ull, 20261016ull}) {
    std::vector<std::uint64_t> seeds(1'000'000);
    for (std::uint64_t i = 0; i < seeds.size(); ++i) seeds[i] = derive_seed(master, i);
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  }
  CHECK(derive_seed(1, 0) != derive_seed(0, 1));
}

TEST_CASE("to_unit_double covers [0, 1)") {
  CHECK(to_unit_double(0) == 0.0);
  CHECK(to_unit_double(~0ull) < 1.0);
  CHECK(to_unit_double(~0ull) == 1.0 - 0x1.0p-53);
}

TEST_CASE("batched primitive fill equals random access") {
  const PrimitiveStream stream(12345, 0.4);
  for (const std::int64_t start : {std::int64_t{0}, std::int64_t{17}, (std::int64_t{1} << 32) - 100}) {
    std::vector<Primitive> batch(700);
    stream.fill(start, batch);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Primitive ref = stream.at(start + static_cast<std::int64_t>(i));
      REQUIRE(batch[i].death == ref.death);
      REQUIRE(batch[i].u == ref.u);
    }
  }
}

TEST_CASE("primitive stream frequencies") {
  const double q = 0.4;
  const PrimitiveStream stream(99, q);
  const int n = 200000;
  int deaths = 0;
  double sum_u = 0.0;
  for (int i = 0; i < n; ++i) {
    const Primitive prim = stream.at(i);
    deaths += prim.death;
    sum_u += prim.u;
  }
  // Four standard errors.
  CHECK(std::abs(deaths / double(n) - q) < 4 * std::sqrt(q * (1 - q) / n));
  CHECK(std::abs(sum_u / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
}

TEST_CASE("philox engine is a deterministic URBG with separated domains") {
  PhiloxEngine a(5, StreamDomain::kExcursion);
  PhiloxEngine b(5, StreamDomain::kExcursion);
  PhiloxEngine c(5, StreamDomain::kCoupling);
  bool all_equal_c = true;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    REQUIRE(x == b());
    all_equal_c = all_equal_c && x == c();
  }
  CHECK_FALSE(all_equal_c);
  CHECK(a.blocks_consumed() == 50);

  PhiloxEngine e(1, StreamDomain::kGeneric);
  std::uniform_int_distribution<int> die(1, 6);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 60000; ++i) ++counts[die(e)];
  for (int face = 1; face <= 6; ++face) {
    CHECK(std::abs(counts[face] - 10000) < 400);
  }
}

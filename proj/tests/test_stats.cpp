#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "gms/analytic.hpp"
#include "gms/rng.hpp"
#include "gms/stats.hpp"
#include "oracles.hpp"

using namespace gms;
using Catch::Approx;

namespace {

std::vector<double> uniforms(int n, std::uint64_t seed) {
  PhiloxEngine engine(seed, StreamDomain::kGeneric);
  std::vector<double> out(n);
  for (double& x : out) x = engine.uniform();
  return out;
}

double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

// sup over every point of either sample of |F_a - F_b|, both by counting.
double brute_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double sup = 0.0;
  for (const auto* pool : {&a, &b}) {
    for (const double x : *pool) {
      const double fa = double(std::upper_bound(a.begin(), a.end(), x) - a.begin()) / a.size();
      const double fb = double(std::upper_bound(b.begin(), b.end(), x) - b.begin()) / b.size();
      sup = std::max(sup, std::abs(fa - fb));
    }
  }
  return sup;
}

}  // namespace

TEST_CASE("ks statistic on a hand-computed sample") {
  const EmpiricalSample s(std::vector<double>{0.9, 0.1, 0.5});
  CHECK(ks_statistic(s, uniform_cdf) == Approx(0.9 - 2.0 / 3.0));
  CHECK(s.cdf(0.5) == Approx(2.0 / 3.0));
  CHECK(s.cdf(0.0) == 0.0);
  CHECK_THROWS_AS(ks_statistic(EmpiricalSample(std::vector<double>{}), uniform_cdf),
                  std::invalid_argument);
}

TEST_CASE("ks statistic matches the grid-scan oracle") {
  for (const int n : {10, 137, 2000}) {
    const auto u = uniforms(n, 100 + n);
    CHECK(std::abs(ks_statistic(EmpiricalSample(u), uniform_cdf) -
                   oracle::grid_scan_ks(u, uniform_cdf, 0.0, 1.0)) <= 1e-6);

    // Exponential draws against a half-normal cdf, so the sup is not tiny.
    std::vector<double> hn;
    for (const double x : u) hn.push_back(-2.0 * std::log(1.0 - x));
    const auto cdf = [](double x) { return half_normal_cdf(x, 1.3); };
    CHECK(std::abs(ks_statistic(EmpiricalSample(hn), cdf) -
                   oracle::grid_scan_ks(hn, cdf, 0.0, 40.0)) <= 1e-6);
  }
}

TEST_CASE("kolmogorov distribution tail") {
  CHECK(kolmogorov_survival(1.3580986393225505) == Approx(0.05).margin(1e-9));
  CHECK(kolmogorov_survival(1.0) == Approx(0.26999967167735456).margin(1e-12));
  CHECK(kolmogorov_survival(0.5) == Approx(0.9639452436648751).margin(1e-12));
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(10.0) < 1e-12);
  // The two series representations meet continuously.
  CHECK(kolmogorov_survival(1.0 - 1e-9) == Approx(kolmogorov_survival(1.0 + 1e-9)).margin(1e-8));
  double prev = 1.0;
  for (double x = 0.05; x < 3.0; x += 0.05) {
    const double v = kolmogorov_survival(x);
    REQUIRE(v <= prev);
    prev = v;
  }
  CHECK(ks_pvalue(0.05, 400) == Approx(kolmogorov_survival(1.0)));
}

TEST_CASE("ks null calibration") {
  const double rate = oracle::ks_null_rejection_rate(2000, 1000, 0.05, 2024);
  CHECK(rate >= 0.03);
  CHECK(rate <= 0.07);
}

TEST_CASE("two-sample ks") {
  const auto a = uniforms(300, 1);
  const auto b = uniforms(500, 2);
  const auto r = two_sample_ks(EmpiricalSample(a), EmpiricalSample(b));
  CHECK(r.D == Approx(brute_two_sample(a, b)).margin(1e-15));
  CHECK(r.p_value == Approx(kolmogorov_survival(std::sqrt(300.0 * 500.0 / 800.0) * r.D)));

  CHECK(two_sample_ks(EmpiricalSample(a), EmpiricalSample(a)).D == 0.0);
  std::vector<double> shifted;
  for (const double x : a) shifted.push_back(x + 2.0);
  CHECK(two_sample_ks(EmpiricalSample(a), EmpiricalSample(shifted)).D == 1.0);

  // Heavy ties, as with integer-valued samples.
  const std::vector<double> ta = {1, 1, 2, 2, 2, 3, 5};
  const std::vector<double> tb = {1, 2, 3, 3, 4, 4};
  CHECK(two_sample_ks(EmpiricalSample(ta), EmpiricalSample(tb)).D ==
        Approx(brute_two_sample(ta, tb)).margin(1e-15));
}

TEST_CASE("chi-square goodness of fit") {
  const std::vector<std::int64_t> counts = {18, 22, 30, 30};
  const std::vector<double> probs = {0.25, 0.25, 0.25, 0.25};
  const auto r = chi_square_goodness(counts, probs);
  CHECK(r.statistic == Approx((49.0 + 9.0 + 25.0 + 25.0) / 25.0));
  CHECK(r.dof == 3);
  const boost::math::chi_squared law(3);
  CHECK(r.p_value == Approx(boost::math::cdf(boost::math::complement(law, r.statistic))));

  // Sparse tail bins are merged until each expected count reaches 5.
  const std::vector<std::int64_t> sparse = {50, 40, 6, 2, 1, 1};
  const std::vector<double> sparse_p = {0.5, 0.4, 0.06, 0.02, 0.01, 0.01};
  const auto m = chi_square_goodness(sparse, sparse_p);
  CHECK(m.bins_used == 3);
  CHECK(m.statistic == Approx(0.0).margin(1e-12));

  const std::vector<double> bad = {0.5, 0.4, 0.06, 0.02, 0.01, 0.02};
  CHECK_THROWS_AS(chi_square_goodness(sparse, bad), std::invalid_argument);
  const std::vector<std::int64_t> tiny = {1, 1};
  const std::vector<double> half = {0.5, 0.5};
  CHECK_THROWS_AS(chi_square_goodness(tiny, half), std::invalid_argument);
}

TEST_CASE("chi-square null calibration") {
  const std::vector<double> probs(10, 0.1);
  int rejected = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::int64_t> counts(10, 0);
    for (const double u : uniforms(500, 9000 + t)) ++counts[static_cast<int>(u * 10)];
    if (chi_square_goodness(counts, probs).p_value < 0.05) ++rejected;
  }
  const double rate = double(rejected) / trials;
  CHECK(rate >= 0.03);
  CHECK(rate <= 0.07);
}

TEST_CASE("lil tracker keeps a running supremum") {
  const std::vector<std::int64_t> steps = {16, 100, 1000, 10000};
  const std::vector<std::int64_t> deltas = {4, 3, 40, 10};
  const auto pts = lil_tracker(steps, deltas, 0.4);
  REQUIRE(pts.size() == 4);
  const double first = 4.0 / lil_envelope(16, 0.4);
  const double third = 40.0 / lil_envelope(1000, 0.4);
  CHECK(pts[0].running_sup == Approx(first));
  CHECK(pts[1].running_sup == Approx(std::max(first, 3.0 / lil_envelope(100, 0.4))));
  CHECK(pts[2].running_sup == Approx(std::max(pts[1].running_sup, third)));
  CHECK(pts[3].running_sup == pts[2].running_sup);
  const std::vector<std::int64_t> early = {15};
  const std::vector<std::int64_t> one = {1};
  CHECK_THROWS_AS(lil_tracker(early, one, 0.4), std::domain_error);
}

TEST_CASE("means, intervals and medians") {
  const std::vector<double> s = {1, 2, 3, 4};
  const auto ci = mean_with_ci(s);
  CHECK(ci.mean == 2.5);
  CHECK(ci.half_width == Approx(1.959963984540054 * std::sqrt(1.25) / 2.0));
  CHECK(standard_error(s) == Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(median(s) == 2.5);
  CHECK(median({5, 1, 3}) == 3.0);
  CHECK_THROWS_AS(mean_with_ci(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("test reports serialize") {
  TestReport r;
  r.name = "demo";
  r.statistic = 0.01;
  r.threshold = 0.05;
  r.verdict = Verdict::kPass;
  const auto j = to_json(r);
  CHECK(j.at("verdict") == "pass");
  CHECK(j.at("p_value").is_null());
  CHECK(r.passed());
  const std::vector<TestReport> reports = {r};
  CHECK(format_report_table(reports).find("demo") != std::string::npos);
  CHECK(std::string(to_string(Verdict::kInsufficientData)) == "insufficient-data");
}

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace gms {

/// Sorted copy of a sample.
class EmpiricalSample {
 public:
  explicit EmpiricalSample(std::vector<double> values);
  explicit EmpiricalSample(std::span<const double> values)
      : EmpiricalSample(std::vector<double>(values.begin(), values.end())) {}

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  /// Fraction of observations <= x.
  double cdf(double x) const;

 private:
  std::vector<double> values_;
};

using Cdf = std::function<double(double)>;

/// sup_x |F_n(x) - F(x)| by the order-statistic formula. Throws
/// std::invalid_argument for an empty sample.
double ks_statistic(const EmpiricalSample& sample, const Cdf& cdf);

/// Asymptotic Kolmogorov tail P(K > sqrt(n) D).
double ks_pvalue(double D, std::int64_t n);
/// Kolmogorov tail P(K > x).
double kolmogorov_survival(double x);

struct KsResult {
  double D;
  double p_value;
};

/// Two-sample statistic evaluated at every jump of either empirical CDF;
/// p-value at effective size n_a n_b / (n_a + n_b).
KsResult two_sample_ks(const EmpiricalSample& a, const EmpiricalSample& b);

struct ChiSquareResult {
  double statistic;
  int dof;
  double p_value;
  std::size_t bins_used;
};

/// Pearson goodness-of-fit. Bins whose expected count is below
/// `min_expected` are merged into their neighbour, starting from the tail.
/// Throws std::invalid_argument if fewer than two bins remain.
ChiSquareResult chi_square_goodness(std::span<const std::int64_t> counts,
                                    std::span<const double> probabilities,
                                    double min_expected = 5.0);

/// Upper tail of the chi-square law.
double chi_square_survival(double statistic, int dof);

struct LilPoint {
  std::int64_t n;
  double running_sup;
};

/// Running sup over m <= n of Delta_m / sqrt(4 q m ln ln m). Points with
/// n < 16 are rejected.
std::vector<LilPoint> lil_tracker(std::span<const std::int64_t> steps,
                                  std::span<const std::int64_t> deltas, double q);

struct MeanCi {
  double mean;
  double half_width;
};

/// Normal-approximation interval using the population standard deviation
/// (divide by n). Throws std::invalid_argument for n < 2.
MeanCi mean_with_ci(std::span<const double> sample, double confidence = 0.95);

double sample_mean(std::span<const double> sample);
/// Unbiased (n - 1) standard error of the mean.
double standard_error(std::span<const double> sample);
double median(std::vector<double> sample);

enum class Verdict { kPass, kFail, kInsufficientData };

const char* to_string(Verdict v);

struct TestReport {
  std::string name;
  double statistic = 0.0;
  std::string reference;
  std::optional<double> p_value;
  double threshold = 0.0;
  std::string rule;  // decision rule the verdict applies, e.g. "statistic <= threshold"
  Verdict verdict = Verdict::kInsufficientData;
  std::int64_t n = 0;
  std::int64_t replicas = 0;
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();

  bool passed() const { return verdict == Verdict::kPass; }
};

nlohmann::json to_json(const TestReport& report);
/// Fixed-width human-readable table, one row per report.
std::string format_report_table(std::span<const TestReport> reports);

}  // namespace gms

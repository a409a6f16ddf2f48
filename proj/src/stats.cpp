#include "gms/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gms/analytic.hpp"

namespace gms {

EmpiricalSample::EmpiricalSample(std::vector<double> values) : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
}

double EmpiricalSample::cdf(double x) const {
  if (values_.empty()) {
    return 0.0;
  }
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double ks_statistic(const EmpiricalSample& sample, const Cdf& cdf) {
  if (sample.empty()) {
    throw std::invalid_argument("KS statistic of an empty sample");
  }
  const auto values = sample.values();
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return std::clamp(d, 0.0, 1.0);
}

double kolmogorov_survival(double x) {
  if (!(x > 0.0)) {
    return 1.0;
  }
  if (x < 1.0) {
    // Theta-function form of the CDF converges fast for small x.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k < 200; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * x * x));
      cdf += term;
      if (term < 1e-16) {
        break;
      }
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-12) {
      break;
    }
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double D, std::int64_t n) {
  if (n < 1) {
    throw std::invalid_argument("KS p-value needs n >= 1");
  }
  return kolmogorov_survival(std::sqrt(static_cast<double>(n)) * D);
}

KsResult two_sample_ks(const EmpiricalSample& a, const EmpiricalSample& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("two-sample KS needs non-empty samples");
  }
  const auto x = a.values();
  const auto y = b.values();
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    // Step past every copy of the next jump point in both samples.
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j])) {
      v = x[i];
    } else {
      v = y[j];
    }
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double effective = na * nb / (na + nb);
  return {d, kolmogorov_survival(std::sqrt(effective) * d)};
}

double chi_square_survival(double statistic, int dof) {
  if (dof < 1) {
    throw std::invalid_argument("chi-square needs dof >= 1");
  }
  if (!(statistic > 0.0)) {
    return 1.0;
  }
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult chi_square_goodness(std::span<const std::int64_t> counts,
                                    std::span<const double> probabilities,
                                    double min_expected) {
  if (counts.size() != probabilities.size() || counts.size() < 2) {
    throw std::invalid_argument("chi-square needs matching count/probability bins");
  }
  const double total_prob = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (std::abs(total_prob - 1.0) > 1e-9) {
    throw std::invalid_argument("bin probabilities must sum to 1");
  }
  const double n = static_cast<double>(
      std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
  if (!(n > 0.0)) {
    throw std::invalid_argument("chi-square needs a non-empty sample");
  }

  struct Bin {
    double observed;
    double expected;
  };
  std::vector<Bin> merged;
  Bin pending{0.0, 0.0};
  for (std::size_t i = counts.size(); i-- > 0;) {
    pending.observed += static_cast<double>(counts[i]);
    pending.expected += n * probabilities[i];
    if (pending.expected >= min_expected) {
      merged.push_back(pending);
      pending = {0.0, 0.0};
    }
  }
  if (pending.expected > 0.0 || pending.observed > 0.0) {
    if (merged.empty()) {
      merged.push_back(pending);
    } else {
      merged.back().observed += pending.observed;
      merged.back().expected += pending.expected;
    }
  }
  if (merged.size() < 2) {
    throw std::invalid_argument("degenerate binning: fewer than two usable bins");
  }

  double statistic = 0.0;
  for (const Bin& bin : merged) {
    const double diff = bin.observed - bin.expected;
    statistic += diff * diff / bin.expected;
  }
  const int dof = static_cast<int>(merged.size()) - 1;
  return {statistic, dof, chi_square_survival(statistic, dof), merged.size()};
}

std::vector<LilPoint> lil_tracker(std::span<const std::int64_t> steps,
                                  std::span<const std::int64_t> deltas, double q) {
  if (steps.size() != deltas.size()) {
    throw std::invalid_argument("lil_tracker needs one Delta per step");
  }
  std::vector<LilPoint> out;
  out.reserve(steps.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double env = lil_envelope(static_cast<double>(steps[i]), q);
    sup = std::max(sup, static_cast<double>(deltas[i]) / env);
    out.push_back({steps[i], sup});
  }
  return out;
}

double sample_mean(std::span<const double> sample) {
  if (sample.empty()) {
    throw std::invalid_argument("mean of an empty sample");
  }
  return std::accumulate(sample.begin(), sample.end(), 0.0) /
         static_cast<double>(sample.size());
}

double standard_error(std::span<const double> sample) {
  if (sample.size() < 2) {
    throw std::invalid_argument("standard error needs n >= 2");
  }
  const double mean = sample_mean(sample);
  double ss = 0.0;
  for (const double v : sample) {
    ss += (v - mean) * (v - mean);
  }
  const double n = static_cast<double>(sample.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

MeanCi mean_with_ci(std::span<const double> sample, double confidence) {
  if (sample.size() < 2) {
    throw std::invalid_argument("confidence interval needs n >= 2");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  const double mean = sample_mean(sample);
  double ss = 0.0;
  for (const double v : sample) {
    ss += (v - mean) * (v - mean);
  }
  const double n = static_cast<double>(sample.size());
  const double sd = std::sqrt(ss / n);
  const double z =
      boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * confidence);
  return {mean, z * sd / std::sqrt(n)};
}

double median(std::vector<double> sample) {
  if (sample.empty()) {
    throw std::invalid_argument("median of an empty sample");
  }
  const std::size_t mid = sample.size() / 2;
  std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(mid), sample.end());
  const double upper = sample[mid];
  if (sample.size() % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInsufficientData:
      return "insufficient-data";
  }
  return "unknown";
}

nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["statistic"] = r.statistic;
  j["reference"] = r.reference;
  j["p_value"] = r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr);
  j["threshold"] = r.threshold;
  j["rule"] = r.rule;
  j["verdict"] = to_string(r.verdict);
  j["n"] = r.n;
  j["replicas"] = r.replicas;
  j["seed"] = r.seed;
  j["params"] = r.params;
  if (!r.extra.empty()) {
    j["extra"] = r.extra;
  }
  return j;
}

std::string format_report_table(std::span<const TestReport> reports) {
  std::ostringstream out;
  out << std::left << std::setw(34) << "test" << std::setw(14) << "statistic"
      << std::setw(12) << "threshold" << std::setw(12) << "p-value" << "verdict\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(34) << r.name << std::setw(14) << std::setprecision(6)
        << r.statistic << std::setw(12) << r.threshold << std::setw(12);
    if (r.p_value) {
      out << *r.p_value;
    } else {
      out << "-";
    }
    out << to_string(r.verdict) << '\n';
  }
  return out.str();
}

}  // namespace gms

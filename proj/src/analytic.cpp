#include "gms/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gms/params.hpp"

namespace gms {

double critical_fitness(double p) {
  if (!(p > 0.5 && p < 1.0)) {
    std::ostringstream msg;
    msg << "birth probability p must satisfy 1/2 < p < 1 (got " << p << ")";
    throw UsageError(msg.str());
  }
  return (1.0 - p) / p;
}

double expected_mu(double p, double f) { return (1.0 - p) / (p * f); }

CorrectionMoments correction_moments(double p) {
  if (!(p > 0.5 && p <= 1.0)) {
    throw UsageError("correction moments need p > 1/2");
  }
  const double q = 1.0 - p;
  return {q / (2.0 * p - 1.0), 1.0 / (2.0 * p - 1.0)};
}

StableHalfLaw::StableHalfLaw(double c) : c_(c) {
  if (!(c > 0.0)) {
    throw std::domain_error("stable law scale c must be positive");
  }
}

double StableHalfLaw::pdf(double u) const {
  if (!(u > 0.0)) {
    return 0.0;
  }
  // Log space: u^3 underflows long before the exponential factor does.
  return std::exp(std::log(c_) - c_ * c_ / (2.0 * u) -
                  0.5 * std::log(2.0 * std::numbers::pi) - 1.5 * std::log(u));
}

double StableHalfLaw::cdf(double t) const {
  if (!(t > 0.0)) {
    return 0.0;
  }
  if (std::isinf(t)) {
    return 1.0;
  }
  return std::erfc(c_ / std::sqrt(2.0 * t));
}

double StableHalfLaw::laplace(double theta) const {
  if (theta < 0.0) {
    throw std::domain_error("Laplace transform argument must be >= 0");
  }
  return std::exp(-c_ * std::sqrt(2.0 * theta));
}

double stable_pdf(double u, double c) { return StableHalfLaw(c).pdf(u); }
double stable_cdf(double t, double c) { return StableHalfLaw(c).cdf(t); }
double stable_laplace(double theta, double c) {
  return StableHalfLaw(c).laplace(theta);
}

HalfNormalLaw::HalfNormalLaw(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0)) {
    throw std::domain_error("half-normal sigma must be positive");
  }
}

double HalfNormalLaw::pdf(double x) const {
  if (x < 0.0) {
    return 0.0;
  }
  const double z = x / sigma_;
  return std::sqrt(2.0 / std::numbers::pi) / sigma_ * std::exp(-0.5 * z * z);
}

double HalfNormalLaw::cdf(double x) const {
  if (!(x > 0.0)) {
    return 0.0;
  }
  return std::erf(x / (sigma_ * std::numbers::sqrt2));
}

double HalfNormalLaw::mean() const {
  return sigma_ * std::sqrt(2.0 / std::numbers::pi);
}

double half_normal_cdf(double x, double sigma) {
  return HalfNormalLaw(sigma).cdf(x);
}
double half_normal_mean(double sigma) { return HalfNormalLaw(sigma).mean(); }

GeometricLaw::GeometricLaw(double a) : a_(a) {
  if (!(a > 0.0 && a <= 1.0)) {
    throw std::domain_error("geometric parameter must lie in (0, 1]");
  }
}

double GeometricLaw::pmf(std::int64_t k) const {
  if (k < 1) {
    return 0.0;
  }
  return std::pow(1.0 - a_, static_cast<double>(k - 1)) * a_;
}

double GeometricLaw::cdf(std::int64_t k) const {
  if (k < 1) {
    return 0.0;
  }
  return -std::expm1(static_cast<double>(k) * std::log1p(-a_));
}

std::int64_t GeometricLaw::quantile(double u) const {
  if (a_ == 1.0 || u <= 0.0) {
    return 1;
  }
  // ceil(log(1 - u) / log(1 - a)), then fix up rounding at bucket edges.
  auto k = static_cast<std::int64_t>(std::ceil(std::log1p(-u) / std::log1p(-a_)));
  if (k < 1) {
    k = 1;
  }
  while (k > 1 && cdf(k - 1) >= u) {
    --k;
  }
  while (cdf(k) < u) {
    ++k;
  }
  return k;
}

double lil_envelope(double n, double q) {
  if (!(n >= 16.0)) {
    throw std::domain_error("LIL envelope needs n >= 16");
  }
  return std::sqrt(4.0 * q * n * std::log(std::log(n)));
}

double lil_phi(double x) {
  if (!(x > 1.0) || !(std::log(std::log(x)) > 0.0)) {
    throw std::domain_error("lil_phi needs ln ln x > 0");
  }
  return std::sqrt(2.0 * x * std::log(std::log(x)));
}

double StationaryLawL::pmf(std::int64_t n) const {
  if (kind != Recurrence::kPositive || n < 0) {
    return 0.0;
  }
  return (1.0 - rho) * std::pow(rho, static_cast<double>(n));
}

std::vector<double> StationaryLawL::binned(std::size_t bins) const {
  if (kind != Recurrence::kPositive) {
    throw std::logic_error("no stationary law outside positive recurrence");
  }
  if (bins < 2) {
    throw std::invalid_argument("need at least two bins");
  }
  std::vector<double> out(bins);
  for (std::size_t i = 0; i + 1 < bins; ++i) {
    out[i] = pmf(static_cast<std::int64_t>(i));
  }
  out.back() = std::pow(rho, static_cast<double>(bins - 1));
  return out;
}

StationaryLawL stationary_law_L(double p, double f) {
  const double q = 1.0 - p;
  const double up = p * f;
  StationaryLawL law{};
  if (std::abs(up - q) <= 4.0 * 2.220446049250313e-16 * q) {
    law.kind = Recurrence::kNull;
  } else if (up < q) {
    law.kind = Recurrence::kPositive;
    law.rho = up / q;
  } else {
    law.kind = Recurrence::kTransient;
    law.drift = up - q;
  }
  return law;
}

const char* to_string(Recurrence kind) {
  switch (kind) {
    case Recurrence::kPositive:
      return "positive-recurrent";
    case Recurrence::kNull:
      return "null-recurrent";
    case Recurrence::kTransient:
      return "transient";
  }
  return "unknown";
}

}  // namespace gms

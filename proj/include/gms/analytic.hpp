#pragma once

// Closed-form reference laws for the verification experiments.
//
// Geometric convention used throughout the project: Geom(a) has support
// {1, 2, ...} with P(k) = (1 - a)^(k - 1) a and mean 1 / a.

#include <cstdint>
#include <vector>

namespace gms {

/// f_c = (1 - p) / p. Throws UsageError unless 1/2 < p < 1.
double critical_fitness(double p);

/// Mean number of deaths while L sits at zero during one excursion, q / (p f).
/// This solves mu = q (1 + mu) + p (1 - f) mu and equals 1 at f = f_c.
double expected_mu(double p, double f);

struct CorrectionMoments {
  double exact_mean;  // q / (2p - 1)
  double bound;       // 1 / (2p - 1)
};

/// Moments of C = sum_i J_i 1{X_i = 0}, which equals sum_{i<=g} (h_i - 1)
/// with g ~ Geom(1 - f_c) visits and h_i ~ Geom(p) holding times at zero.
CorrectionMoments correction_moments(double p);

/// Positive stable law of index 1/2 with density
/// c exp(-c^2 / (2u)) / sqrt(2 pi u^3) on u > 0.
class StableHalfLaw {
 public:
  explicit StableHalfLaw(double c);
  double c() const { return c_; }
  double pdf(double u) const;
  double cdf(double t) const;
  double laplace(double theta) const;

 private:
  double c_;
};

double stable_pdf(double u, double c);
/// erfc(c / sqrt(2t)); 0 for t <= 0.
double stable_cdf(double t, double c);
/// exp(-c sqrt(2 theta)). Throws std::domain_error for theta < 0.
double stable_laplace(double theta, double c);

/// Law of |N(0, sigma^2)|.
class HalfNormalLaw {
 public:
  explicit HalfNormalLaw(double sigma);
  double sigma() const { return sigma_; }
  double pdf(double x) const;
  double cdf(double x) const;
  double mean() const;

 private:
  double sigma_;
};

double half_normal_cdf(double x, double sigma);
double half_normal_mean(double sigma);

class GeometricLaw {
 public:
  explicit GeometricLaw(double a);
  double a() const { return a_; }
  double pmf(std::int64_t k) const;
  double cdf(std::int64_t k) const;
  double mean() const { return 1.0 / a_; }
  /// Smallest k with cdf(k) >= u, for u in [0, 1).
  std::int64_t quantile(double u) const;

 private:
  double a_;
};

/// sqrt(4 q n ln ln n). Throws std::domain_error for n < 16.
double lil_envelope(double n, double q);
/// sqrt(2 x ln ln x). Throws std::domain_error when ln ln x <= 0.
double lil_phi(double x);

enum class Recurrence { kPositive, kNull, kTransient };

/// Long-run behaviour of the sub-threshold count L. For pf < q the
/// stationary law is geometric on {0, 1, ...}: pi(n) = (1 - rho) rho^n with
/// rho = pf / q (detailed balance pi(n+1) q = pi(n) pf).
struct StationaryLawL {
  Recurrence kind;
  double rho = 0.0;    // positive recurrent only
  double drift = 0.0;  // transient only: pf - q

  double pmf(std::int64_t n) const;
  /// pmf(0..bins-2) plus the tail mass P(L >= bins-1) in the last entry.
  std::vector<double> binned(std::size_t bins) const;
};

StationaryLawL stationary_law_L(double p, double f);

const char* to_string(Recurrence kind);

}  // namespace gms

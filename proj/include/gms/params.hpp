#pragma once

#include <stdexcept>
#include <string>

namespace gms {

/// Thrown for invalid user-supplied configuration (CLI exit code 2).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a full-mode-only query is made on a reduced trajectory.
class ModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// One model instance: birth probability p, death probability q = 1 - p,
/// fitness threshold f and the critical threshold f_c = q / p.
class ModelParams {
 public:
  /// Throws UsageError unless 1/2 < p < 1 and 0 < f < 1.
  ModelParams(double p, double f);

  /// Same p with f = f_c computed in full precision as q / p.
  static ModelParams critical(double p);

  double p() const { return p_; }
  double q() const { return q_; }
  double f() const { return f_; }
  double f_c() const { return f_c_; }

  /// p f == q up to rounding of the q / p division.
  bool is_critical() const;

  std::string describe() const;

 private:
  double p_;
  double q_;
  double f_;
  double f_c_;
};

}  // namespace gms

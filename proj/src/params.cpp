#include "gms/params.hpp"

#include <cmath>
#include <sstream>

#include "gms/analytic.hpp"

namespace gms {

ModelParams::ModelParams(double p, double f) {
  if (!(p > 0.5 && p < 1.0)) {
    std::ostringstream msg;
    msg << "birth probability p must satisfy p > 1/2 and p < 1 (got " << p << ")";
    throw UsageError(msg.str());
  }
  if (!(f > 0.0 && f < 1.0)) {
    std::ostringstream msg;
    msg << "fitness threshold f must satisfy 0 < f < 1 (got " << f << ")";
    throw UsageError(msg.str());
  }
  p_ = p;
  q_ = 1.0 - p;
  f_ = f;
  f_c_ = critical_fitness(p);
}

ModelParams ModelParams::critical(double p) {
  if (!(p > 0.5 && p < 1.0)) {
    std::ostringstream msg;
    msg << "birth probability p must satisfy p > 1/2 and p < 1 (got " << p << ")";
    throw UsageError(msg.str());
  }
  return ModelParams(p, critical_fitness(p));
}

bool ModelParams::is_critical() const {
  return std::abs(p_ * f_ - q_) <= 4.0 * 2.220446049250313e-16 * q_;
}

std::string ModelParams::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << "p=" << p_ << " q=" << q_ << " f=" << f_ << " f_c=" << f_c_;
  return out.str();
}

}  // namespace gms

#include "defport/after_default.hpp"

#include <cmath>
#include <stdexcept>

namespace defport::after_default {

double value_multiplier(const Model& m, double theta) {
  const auto& mp = m.params();
  const Coeffs c = m.after_default_coeffs(theta);  // rejects theta outside [0, T]
  const double ratio = c.mu1 / c.sigma1;
  return std::exp(0.5 * mp.p / (1.0 - mp.p) * ratio * ratio * (mp.horizon - theta));
}

double investor_multiplier(const Model& m, double theta) {
  const auto& mp = m.params();
  return mp.lambda * std::exp(-mp.lambda * theta) * value_multiplier(m, theta);
}

double merton_fraction(const Model& m, double theta) {
  const auto& mp = m.params();
  const Coeffs c = m.after_default_coeffs(theta);
  return c.mu1 / ((1.0 - mp.p) * c.sigma1 * c.sigma1);
}

double insider_value(const Model& m, double theta, double x) {
  return value_multiplier(m, theta) * crra_utility(x, m.params().p);
}

double remaining_multiplier(const Model& m, double theta, double t) {
  const auto& mp = m.params();
  if (!(t >= theta && t <= mp.horizon))
    throw std::invalid_argument("t must lie in [theta, T]");
  const Coeffs c = m.after_default_coeffs(theta);
  const double ratio = c.mu1 / c.sigma1;
  return std::exp(0.5 * mp.p / (1.0 - mp.p) * ratio * ratio * (mp.horizon - t));
}

double log_moment_rate(const Model& m, double theta, double nu) {
  const auto& mp = m.params();
  const Coeffs c = m.after_default_coeffs(theta);
  return mp.p * (nu * c.mu1 - 0.5 * (1.0 - mp.p) * nu * nu * c.sigma1 * c.sigma1);
}

}  // namespace defport::after_default

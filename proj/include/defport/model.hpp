#pragma once
// Market model under counterparty default: constant pre-default coefficients,
// a proportional loss at the default time, deterministic intensity, and a
// unit-exponential default barrier.  Everything is validated once and then
// immutable, so concurrent reads are unrestricted.

#include <cmath>
#include <string>
#include <vector>

#include "defport/mc/rng.hpp"

namespace defport {

struct ModelParams {
  double mu0 = 0.03;     // pre-default drift, per year
  double sigma0 = 0.2;   // pre-default volatility, per sqrt-year
  double gamma = 0.2;    // proportional loss at default, in (0,1)
  double horizon = 1.0;  // T, years
  double p = 0.8;        // CRRA exponent, in (0,1)
  double delta = 0.5;    // short-sale floor magnitude (fraction >= -delta)
  double lambda = 0.3;   // default intensity, per year
  double x0 = 1.0;       // initial wealth
};

struct ProfilePoint {
  double theta;
  double mu1;
  double sigma1;
};

// After-default coefficient profile: the linear family
//   mu1(theta) = mu0 * theta / T,  sigma1(theta) = sigma0 * (2 - theta / T),
// or a user table interpolated linearly in theta.
struct AfterDefaultProfile {
  enum class Kind { Linear, Table };
  Kind kind = Kind::Linear;
  std::vector<ProfilePoint> table;

  static AfterDefaultProfile linear() { return {}; }
  static AfterDefaultProfile from_table(std::vector<ProfilePoint> pts) {
    AfterDefaultProfile pr;
    pr.kind = Kind::Table;
    pr.table = std::move(pts);
    return pr;
  }
};

struct Coeffs {
  double mu1;
  double sigma1;
};

// Unit-exponential barrier: with cumulated intensity lambda*t, survival past t
// is exp(-lambda*t) exactly when the threshold is Exp(1).
struct BarrierLaw {
  double density(double l) const { return l > 0.0 ? std::exp(-l) : 0.0; }
  double survival(double l) const { return l > 0.0 ? std::exp(-l) : 1.0; }
  double quantile_from_uniform(double u) const { return -std::log(u); }
};

double sample_barrier(const BarrierLaw& law, mc::RngStream& rng);

// theta = l / lambda: first time the cumulated intensity reaches the barrier.
double default_time(double barrier, double lambda);

double crra_utility(double x, double p);

class Model {
 public:
  // empty result means the configuration is admissible
  static std::vector<std::string> validate(const ModelParams&, const AfterDefaultProfile&);

  Model(ModelParams params, AfterDefaultProfile profile);  // throws on any violation
  explicit Model(ModelParams params) : Model(params, AfterDefaultProfile::linear()) {}
  Model() : Model(ModelParams{}) {}

  const ModelParams& params() const { return params_; }
  const AfterDefaultProfile& profile() const { return profile_; }

  Coeffs after_default_coeffs(double theta) const;  // theta must lie in [0, T]
  double default_time(double barrier) const;
  double merton_fraction() const;  // mu0 / ((1-p) sigma0^2)
  double utility(double x) const { return crra_utility(x, params_.p); }

 private:
  ModelParams params_;
  AfterDefaultProfile profile_;
};

}  // namespace defport

#pragma once
// Backward-in-time dynamic programming for the pre-default phase.
//
// The value-to-utility ratio Y(t) of each agent solves a scalar backward
// equation whose right-hand side is a pointwise supremum over the invested
// fraction.  For the agent who knows the barrier, default at tau enters only
// through the terminal condition; for the progressively informed agent it
// enters the driver through the intensity-weighted post-default value.

#include <optional>
#include <vector>

#include "defport/after_default.hpp"
#include "defport/model.hpp"

namespace defport {

// ---------------------------------------------------------------------------
// Piecewise-constant investment policies
// ---------------------------------------------------------------------------

struct PostDefaultRule {
  enum class Kind { Optimal, Constant };
  Kind kind = Kind::Optimal;
  double value = 0.0;

  static PostDefaultRule optimal() { return {}; }
  static PostDefaultRule constant(double nu) { return {Kind::Constant, nu}; }
};

struct Policy {
  std::vector<double> knots;  // 0 = knots[0] < ... < knots[m] = T
  std::vector<double> nu;     // fraction on [knots[s], knots[s+1})
  std::optional<double> at_default;  // fraction held at the default instant; empty = nu(theta)
  PostDefaultRule post = PostDefaultRule::optimal();

  static Policy constant(double nu, double T);
  double nu_at(double t) const;
  double at_default_fraction(double theta) const;
  std::size_t segments() const { return nu.size(); }
};

struct Weighting {
  enum class Kind { Insider, Investor };
  Kind kind = Kind::Investor;
  double barrier = 0.0;  // used by the insider weighting

  static Weighting insider(double barrier) { return {Kind::Insider, barrier}; }
  static Weighting investor() { return {Kind::Investor, 0.0}; }
};

// ---------------------------------------------------------------------------
// Driver optimization
// ---------------------------------------------------------------------------

struct DriverResult {
  double nu_star;
  double f_value;
};

struct DriverBounds {
  double lo = 0.0;
  std::optional<double> hi;  // empty = unconstrained above
};

// Maximizes p*y*(mu0*nu - (1-p)/2 sigma0^2 nu^2) over [lo, hi]; closed form.
DriverResult optimize_driver(const Model& m, double y, const DriverBounds& bounds);

// Progressive-information driver at time t:
//   sup_nu (p mu0 nu - p(1-p)/2 sigma0^2 nu^2 - lambda) y
//          + lambda K(t) (1 - nu gamma)^p
// over nu < 1/gamma, optionally floored.  Strictly concave; solved by
// bisection on the derivative.
DriverResult optimize_investor_driver(const Model& m, double t, double y,
                                      std::optional<double> floor);

// ---------------------------------------------------------------------------
// Backward solves
// ---------------------------------------------------------------------------

// Terminal condition at the default time.  The consistent form is
// K(tau) * (1 + delta*gamma)^p; the DividedByP variant additionally divides
// by p and exists only to let the oracle flag it (fault injection).
enum class TerminalVariant { Consistent, DividedByP };

struct SolveOptions {
  int steps = 2000;  // fixed-step fourth-order grid on [0, t_end]
  double tolerance = 1e-8;  // reject the solve when the step-halving estimate exceeds this
  // Pre-default cap on the fraction at (1-eps)/gamma.  Off by default: only
  // the at-default instant is loss-constrained, so the driver is floor-only.
  bool cap_pre_default = false;
  double cap_epsilon = 1e-6;
  TerminalVariant terminal = TerminalVariant::Consistent;
};

struct InvestorOptions {
  int steps = 2000;
  double tolerance = 1e-8;
  std::optional<double> floor;  // compare-on-equal-footing variant
};

struct ValueSolution {
  enum class TerminalKind { NoDefault, DefaultAt };
  std::vector<double> t;   // ascending grid on [0, t_end]
  std::vector<double> y;   // value-to-utility ratio, > 0
  std::vector<double> nu;  // maximizing fraction at the grid nodes
  TerminalKind terminal_kind = TerminalKind::NoDefault;
  double default_time = 0.0;     // set when terminal_kind == DefaultAt
  double error_estimate = 0.0;   // step-halving estimate at t = 0

  double y0() const { return y.front(); }
  double value0(const Model& m) const { return y.front() * m.utility(m.params().x0); }
  double y_at(double tq) const;
  double nu_at(double tq) const;
  Policy extract_policy(const Model& m, bool pin_at_default_to_floor) const;
};

// Barrier-informed solve on [0, tau ∧ T]; tau = barrier / lambda.
ValueSolution solve_insider(const Model& m, double barrier, const SolveOptions& opt = {});

// Progressive-information benchmark on [0, T].
ValueSolution solve_investor(const Model& m, const InvestorOptions& opt = {});

// Fixed-policy value ODE under the investor weighting (no optimization):
// the running conditional expected utility of following the given policy.
// Policy knots should align with the step grid; for exact values of arbitrary
// piecewise policies use evaluate_policy instead.
ValueSolution solve_policy_value(const Model& m, const Policy& policy, int steps = 2000);

// ---------------------------------------------------------------------------
// Closed-form policy evaluation and aggregation
// ---------------------------------------------------------------------------

struct QuadOptions {
  int nodes_per_segment = 32;
};

// Expected utility of a deterministic piecewise-constant policy.  Exact per
// segment for the insider weighting; Gauss-Legendre in the default time plus
// the exact survival atom for the investor weighting.
double evaluate_policy(const Model& m, const Policy& policy, const Weighting& w,
                       const QuadOptions& q = {});

// The naive constant-fraction agent: growth-optimal fraction ignoring default
// risk, clamped to the admissible range, held through the default.
Policy merton_policy(const Model& m, double cap_epsilon = 1e-6);
double merton_value(const Model& m, const QuadOptions& q = {});

struct ExAnteOptions {
  int nodes = 64;  // Gauss-Legendre nodes in the default time
  double tolerance = 1e-6;  // node-halving convergence requirement
  SolveOptions solve;
};

struct ExAnteValue {
  double value;
  double error_estimate;  // node-halving quadrature estimate
};

// Barrier-averaged initial value: exp(-lambda T) times the no-default value
// plus the default-time integral of per-barrier values against the
// exponential weight.
ExAnteValue insider_ex_ante(const Model& m, const ExAnteOptions& opt = {});

}  // namespace defport

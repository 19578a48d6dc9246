#include "defport/before_default.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "defport/quadrature.hpp"

namespace defport {

namespace {

// log E[X_t^p] growth rate of a constant fraction on the pre-default
// coefficients
double log_moment_rate0(const ModelParams& mp, double nu) {
  return mp.p * (nu * mp.mu0 - 0.5 * (1.0 - mp.p) * nu * nu * mp.sigma0 * mp.sigma0);
}

struct OdeGrid {
  std::vector<double> t;
  std::vector<double> y;
};

// Classical fourth-order fixed-step scheme, integrating dy/dt = g(t, y)
// from t_end down to 0 on a uniform grid.
template <class RHS>
OdeGrid rk4_backward(RHS&& g, double t_end, double y_end, int steps) {
  OdeGrid out;
  if (t_end <= 0.0) {
    out.t = {0.0};
    out.y = {y_end};
    return out;
  }
  const int n = std::max(1, steps);
  out.t.resize(n + 1);
  out.y.resize(n + 1);
  // ratio form pins the endpoints exactly; stage times are taken from the
  // grid so the right-hand side is never evaluated outside [0, t_end]
  for (int k = 0; k <= n; ++k) out.t[k] = t_end * k / n;
  out.t[n] = t_end;
  out.y[n] = y_end;
  for (int k = n; k > 0; --k) {
    const double tk = out.t[k];
    const double tlo = out.t[k - 1];
    const double tmid = 0.5 * (tk + tlo);
    const double h = tlo - tk;  // negative
    const double yk = out.y[k];
    const double k1 = g(tk, yk);
    const double k2 = g(tmid, yk + 0.5 * h * k1);
    const double k3 = g(tmid, yk + 0.5 * h * k2);
    const double k4 = g(tlo, yk + h * k3);
    out.y[k - 1] = yk + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return out;
}

template <class RHS>
double rk4_backward_y0(RHS&& g, double t_end, double y_end, int steps) {
  return rk4_backward(g, t_end, y_end, steps).y.front();
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double xq) {
  if (xs.size() == 1 || xq <= xs.front()) return ys.front();
  if (xq >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), xq);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double w = (xq - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

void check_policy_shape(const Policy& p, double T) {
  if (p.knots.size() != p.nu.size() + 1 || p.nu.empty())
    throw std::invalid_argument("policy needs one fraction per knot interval");
  if (p.knots.front() != 0.0 || std::abs(p.knots.back() - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("policy knots must span [0, T]");
  for (std::size_t i = 1; i < p.knots.size(); ++i)
    if (!(p.knots[i] > p.knots[i - 1]))
      throw std::invalid_argument("policy knots must be strictly increasing");
}

void check_jump_admissible(double nu, double gamma) {
  if (!(nu * gamma < 1.0))
    throw std::invalid_argument("inadmissible policy: fraction at default wipes out the wealth");
}

}  // namespace

// ---------------------------------------------------------------------------
// Policy
// ---------------------------------------------------------------------------

Policy Policy::constant(double nu_const, double T) {
  Policy p;
  p.knots = {0.0, T};
  p.nu = {nu_const};
  return p;
}

double Policy::nu_at(double t) const {
  if (t <= knots.front()) return nu.front();
  if (t >= knots.back()) return nu.back();
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  return nu[static_cast<std::size_t>(it - knots.begin()) - 1];
}

double Policy::at_default_fraction(double theta) const {
  return at_default ? *at_default : nu_at(theta);
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

DriverResult optimize_driver(const Model& m, double y, const DriverBounds& bounds) {
  if (!(y > 0.0)) throw std::invalid_argument("driver multiplier must be positive");
  const auto& mp = m.params();
  double nu = m.merton_fraction();
  nu = std::max(nu, bounds.lo);
  if (bounds.hi) nu = std::min(nu, *bounds.hi);
  return {nu, y * log_moment_rate0(mp, nu)};
}

DriverResult optimize_investor_driver(const Model& m, double t, double y,
                                      std::optional<double> floor) {
  const auto& mp = m.params();
  const double K = after_default::value_multiplier(m, t);
  const double lam = mp.lambda;
  const double gam = mp.gamma;
  const double p = mp.p;

  auto value = [&](double nu) {
    return (log_moment_rate0(mp, nu) - lam) * y +
           lam * K * std::pow(1.0 - nu * gam, p);
  };
  auto deriv = [&](double nu) {
    return p * mp.mu0 * y - p * (1.0 - p) * mp.sigma0 * mp.sigma0 * nu * y -
           lam * K * gam * p * std::pow(1.0 - nu * gam, p - 1.0);
  };

  // the maximizer always sits strictly left of the default-free optimum and
  // of the wipe-out boundary
  double hi = std::min(m.merton_fraction(), (1.0 - 1e-12) / gam);
  if (floor && !(*floor < hi)) return {*floor, value(*floor)};
  if (deriv(hi) >= 0.0) return {hi, value(hi)};
  if (floor && deriv(*floor) <= 0.0) return {*floor, value(*floor)};
  double lo = floor ? *floor : std::min(-1.0, hi - 1.0);
  if (!floor) {
    while (deriv(lo) <= 0.0) {
      lo *= 2.0;
      if (lo < -1e12) throw std::runtime_error("driver bracket expansion failed");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (deriv(mid) > 0.0 ? lo : hi) = mid;
  }
  const double nu = 0.5 * (lo + hi);
  return {nu, value(nu)};
}

// ---------------------------------------------------------------------------
// ValueSolution
// ---------------------------------------------------------------------------

double ValueSolution::y_at(double tq) const { return interp(t, y, tq); }
double ValueSolution::nu_at(double tq) const { return interp(t, nu, tq); }

Policy ValueSolution::extract_policy(const Model& m, bool pin_at_default_to_floor) const {
  const double T = m.params().horizon;
  Policy p;
  p.knots.push_back(0.0);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double v = nu[k];
    if (!p.nu.empty() && v == p.nu.back()) continue;  // collapse equal segments
    if (!p.nu.empty()) p.knots.push_back(t[k]);
    p.nu.push_back(v);
  }
  if (p.nu.empty()) {
    p.nu.push_back(nu.empty() ? 0.0 : nu.back());
  } else if (t.back() < T && p.nu.back() != nu.back()) {
    // pre-default fractions past the known default time never act
    p.knots.push_back(t.back());
    p.nu.push_back(nu.back());
  }
  p.knots.push_back(T);
  if (pin_at_default_to_floor) p.at_default = -m.params().delta;
  return p;
}

// ---------------------------------------------------------------------------
// Solves
// ---------------------------------------------------------------------------

ValueSolution solve_insider(const Model& m, double barrier, const SolveOptions& opt) {
  const auto& mp = m.params();
  const double theta = m.default_time(barrier);
  DriverBounds bounds{-mp.delta, std::nullopt};
  if (opt.cap_pre_default) bounds.hi = (1.0 - opt.cap_epsilon) / mp.gamma;

  ValueSolution sol;
  double t_end, y_end;
  if (theta > mp.horizon) {
    sol.terminal_kind = ValueSolution::TerminalKind::NoDefault;
    t_end = mp.horizon;
    y_end = 1.0;
  } else {
    sol.terminal_kind = ValueSolution::TerminalKind::DefaultAt;
    sol.default_time = theta;
    t_end = theta;
    y_end = after_default::value_multiplier(m, theta) *
            std::pow(1.0 + mp.delta * mp.gamma, mp.p);
    if (opt.terminal == TerminalVariant::DividedByP) y_end /= mp.p;
  }

  auto rhs = [&](double, double y) { return -optimize_driver(m, y, bounds).f_value; };
  OdeGrid g = rk4_backward(rhs, t_end, y_end, opt.steps);
  const double y0_coarse = rk4_backward_y0(rhs, t_end, y_end, std::max(1, opt.steps / 2));
  sol.t = std::move(g.t);
  sol.y = std::move(g.y);
  sol.nu.resize(sol.y.size());
  for (std::size_t k = 0; k < sol.y.size(); ++k)
    sol.nu[k] = optimize_driver(m, sol.y[k], bounds).nu_star;
  sol.error_estimate = std::abs(sol.y.front() - y0_coarse) / 15.0;
  if (sol.error_estimate > opt.tolerance)
    throw std::runtime_error("integrator tolerance not met: estimated error " +
                             std::to_string(sol.error_estimate));
  return sol;
}

ValueSolution solve_investor(const Model& m, const InvestorOptions& opt) {
  ValueSolution sol;
  sol.terminal_kind = ValueSolution::TerminalKind::NoDefault;
  auto rhs = [&](double t, double y) {
    return -optimize_investor_driver(m, t, y, opt.floor).f_value;
  };
  OdeGrid g = rk4_backward(rhs, m.params().horizon, 1.0, opt.steps);
  const double y0_coarse =
      rk4_backward_y0(rhs, m.params().horizon, 1.0, std::max(1, opt.steps / 2));
  sol.t = std::move(g.t);
  sol.y = std::move(g.y);
  sol.nu.resize(sol.y.size());
  for (std::size_t k = 0; k < sol.y.size(); ++k)
    sol.nu[k] = optimize_investor_driver(m, sol.t[k], sol.y[k], opt.floor).nu_star;
  sol.error_estimate = std::abs(sol.y.front() - y0_coarse) / 15.0;
  if (sol.error_estimate > opt.tolerance)
    throw std::runtime_error("integrator tolerance not met: estimated error " +
                             std::to_string(sol.error_estimate));
  return sol;
}

ValueSolution solve_policy_value(const Model& m, const Policy& policy, int steps) {
  const auto& mp = m.params();
  check_policy_shape(policy, mp.horizon);
  auto post_mult = [&](double th) {
    return policy.post.kind == PostDefaultRule::Kind::Optimal
               ? after_default::value_multiplier(m, th)
               : std::exp(after_default::log_moment_rate(m, th, policy.post.value) *
                          (mp.horizon - th));
  };
  auto rhs = [&](double t, double y) {
    const double nu = policy.nu_at(t);
    const double nu_d = policy.at_default_fraction(t);
    check_jump_admissible(nu_d, mp.gamma);
    const double cont = post_mult(t) * std::pow(1.0 - nu_d * mp.gamma, mp.p);
    return -((log_moment_rate0(mp, nu) - mp.lambda) * y + mp.lambda * cont);
  };
  ValueSolution sol;
  sol.terminal_kind = ValueSolution::TerminalKind::NoDefault;
  OdeGrid g = rk4_backward(rhs, mp.horizon, 1.0, steps);
  const double y0_coarse = rk4_backward_y0(rhs, mp.horizon, 1.0, std::max(1, steps / 2));
  sol.t = std::move(g.t);
  sol.y = std::move(g.y);
  sol.nu.resize(sol.t.size());
  for (std::size_t k = 0; k < sol.t.size(); ++k) sol.nu[k] = policy.nu_at(sol.t[k]);
  sol.error_estimate = std::abs(sol.y.front() - y0_coarse) / 15.0;
  return sol;
}

// ---------------------------------------------------------------------------
// Closed-form evaluation
// ---------------------------------------------------------------------------

double evaluate_policy(const Model& m, const Policy& policy, const Weighting& w,
                       const QuadOptions& q) {
  const auto& mp = m.params();
  check_policy_shape(policy, mp.horizon);

  const std::size_t nseg = policy.segments();
  std::vector<double> cum(nseg + 1, 0.0);  // log E[X^p] at the knots
  for (std::size_t s = 0; s < nseg; ++s)
    cum[s + 1] =
        cum[s] + log_moment_rate0(mp, policy.nu[s]) * (policy.knots[s + 1] - policy.knots[s]);
  auto logG = [&](double t) {
    if (t <= 0.0) return 0.0;
    auto it = std::upper_bound(policy.knots.begin(), policy.knots.end(), t);
    std::size_t s = std::min<std::size_t>(static_cast<std::size_t>(it - policy.knots.begin()),
                                          nseg) - 1;
    return cum[s] + log_moment_rate0(mp, policy.nu[s]) * (t - policy.knots[s]);
  };
  auto post_mult = [&](double th) {
    return policy.post.kind == PostDefaultRule::Kind::Optimal
               ? after_default::value_multiplier(m, th)
               : std::exp(after_default::log_moment_rate(m, th, policy.post.value) *
                          (mp.horizon - th));
  };
  const double u0 = m.utility(mp.x0);

  if (w.kind == Weighting::Kind::Insider) {
    const double theta = m.default_time(w.barrier);
    if (theta > mp.horizon) return u0 * std::exp(logG(mp.horizon));
    const double nu_d = policy.at_default_fraction(theta);
    check_jump_admissible(nu_d, mp.gamma);
    return u0 * std::exp(logG(theta)) * std::pow(1.0 - nu_d * mp.gamma, mp.p) *
           post_mult(theta);
  }

  // investor weighting: survival atom plus the default-time integral
  double acc = std::exp(-mp.lambda * mp.horizon + logG(mp.horizon));
  for (std::size_t s = 0; s < nseg; ++s) {
    GaussLegendre gl(q.nodes_per_segment, policy.knots[s], policy.knots[s + 1]);
    acc += gl.integrate([&](double th) {
      const double nu_d = policy.at_default_fraction(th);
      check_jump_admissible(nu_d, mp.gamma);
      return mp.lambda * std::exp(-mp.lambda * th + logG(th)) *
             std::pow(1.0 - nu_d * mp.gamma, mp.p) * post_mult(th);
    });
  }
  return u0 * acc;
}

Policy merton_policy(const Model& m, double cap_epsilon) {
  const auto& mp = m.params();
  double nu = m.merton_fraction();
  nu = std::max(nu, -mp.delta);
  nu = std::min(nu, (1.0 - cap_epsilon) / mp.gamma);
  return Policy::constant(nu, mp.horizon);
}

double merton_value(const Model& m, const QuadOptions& q) {
  return evaluate_policy(m, merton_policy(m), Weighting::investor(), q);
}

ExAnteValue insider_ex_ante(const Model& m, const ExAnteOptions& opt) {
  const auto& mp = m.params();
  auto y0_at = [&](double theta) {
    return solve_insider(m, mp.lambda * theta, opt.solve).y0();
  };
  const double survival =
      std::exp(-mp.lambda * mp.horizon) *
      solve_insider(m, mp.lambda * (mp.horizon + 1.0), opt.solve).y0();
  auto quad = [&](int nodes) {
    GaussLegendre gl(nodes, 0.0, mp.horizon);
    return gl.integrate(
        [&](double th) { return mp.lambda * std::exp(-mp.lambda * th) * y0_at(th); });
  };
  const double fine = quad(opt.nodes);
  const double coarse = quad(std::max(2, opt.nodes / 2));
  const double u0 = m.utility(mp.x0);
  const double err = u0 * std::abs(fine - coarse);
  if (err > opt.tolerance)
    throw std::runtime_error("quadrature did not converge: estimated error " +
                             std::to_string(err));
  return {u0 * (survival + fine), err};
}

}  // namespace defport

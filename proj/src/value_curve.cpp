#include "defport/value_curve.hpp"

#include <algorithm>
#include <cmath>

#include "defport/mc/rng.hpp"

namespace defport {

namespace {

constexpr std::uint64_t kSaltCurve = 0x55;

struct AgentState {
  double wealth;
  double nu_at_default = 0.0;
  bool jumped = false;
};

double pre_step(const ModelParams& mp, double wealth, double nu, double dt, double z) {
  const double rate = nu * mp.mu0 - 0.5 * nu * nu * mp.sigma0 * mp.sigma0;
  return wealth * std::exp(rate * dt + nu * mp.sigma0 * std::sqrt(dt) * z);
}

double post_step(const Coeffs& c, double wealth, double nu, double dt, double z) {
  const double rate = nu * c.mu1 - 0.5 * nu * nu * c.sigma1 * c.sigma1;
  return wealth * std::exp(rate * dt + nu * c.sigma1 * std::sqrt(dt) * z);
}

struct CurveData {
  ValueCurve curve;
  WealthPath investor_wealth;
};

CurveData build(const Model& m, const Scenario& sc, const CurveOptions& opt) {
  const auto& mp = m.params();
  const double T = mp.horizon;
  const double theta = m.default_time(sc.barrier);
  const bool defaults = theta <= T;

  SolveOptions iopt;
  iopt.steps = opt.solver_steps;
  iopt.cap_pre_default = opt.cap_pre_default;
  ValueSolution ins = solve_insider(m, sc.barrier, iopt);
  InvestorOptions vopt;
  vopt.steps = opt.solver_steps;
  vopt.floor = opt.investor_floor;
  ValueSolution inv = solve_investor(m, vopt);
  Policy mer_pol = merton_policy(m);
  ValueSolution mer = solve_policy_value(m, mer_pol, opt.solver_steps);
  const double nu_mer = mer_pol.nu.front();

  // time grid with tau inserted
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(opt.points) + 2);
  for (int i = 0; i <= opt.points; ++i) grid.push_back(T * i / opt.points);
  if (defaults) {
    auto it = std::lower_bound(grid.begin(), grid.end(), theta);
    if (it == grid.end() || *it != theta) grid.insert(it, theta);
  }

  mc::RngStream rng(sc.seed, kSaltCurve);

  AgentState insider{mp.x0}, investor{mp.x0}, merton{mp.x0};
  insider.nu_at_default = -mp.delta;
  Coeffs cpost{0.0, 1.0};
  double nu_post = 0.0;
  if (defaults) {
    cpost = m.after_default_coeffs(theta);
    nu_post = after_default::merton_fraction(m, theta);
  }

  CurveData out;
  out.curve.has_default = defaults;
  out.curve.default_time = defaults ? theta : 0.0;
  out.investor_wealth.has_default = defaults;
  out.investor_wealth.default_time = defaults ? theta : 0.0;

  auto emit = [&](double t, bool after_jump) {
    CurvePoint cp;
    cp.t = t;
    cp.defaulted = after_jump;
    if (!after_jump) {
      cp.insider = ins.y_at(t) * m.utility(insider.wealth);
      cp.investor = inv.y_at(t) * m.utility(investor.wealth);
      cp.merton = mer.y_at(t) * m.utility(merton.wealth);
    } else {
      const double km = after_default::remaining_multiplier(m, theta, t);
      cp.insider = km * m.utility(insider.wealth);
      cp.investor = km * m.utility(investor.wealth);
      cp.merton = km * m.utility(merton.wealth);
    }
    out.curve.points.push_back(cp);
    out.investor_wealth.t.push_back(t);
    out.investor_wealth.wealth.push_back(investor.wealth);
  };

  bool past_default = false;
  emit(0.0, false);
  if (defaults && theta == 0.0) {  // immediate default
    investor.nu_at_default = inv.nu_at(0.0);
    merton.nu_at_default = nu_mer;
    insider.wealth *= 1.0 + mp.delta * mp.gamma;
    investor.wealth *= 1.0 - investor.nu_at_default * mp.gamma;
    merton.wealth *= 1.0 - merton.nu_at_default * mp.gamma;
    past_default = true;
    emit(0.0, true);
  }
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double t0 = grid[j];
    const double t1 = grid[j + 1];
    const double dt = t1 - t0;
    const double z = rng.next_normal();
    if (!past_default) {
      insider.wealth = pre_step(mp, insider.wealth, ins.nu_at(t0), dt, z);
      investor.wealth = pre_step(mp, investor.wealth, inv.nu_at(t0), dt, z);
      merton.wealth = pre_step(mp, merton.wealth, nu_mer, dt, z);
    } else {
      insider.wealth = post_step(cpost, insider.wealth, nu_post, dt, z);
      investor.wealth = post_step(cpost, investor.wealth, nu_post, dt, z);
      merton.wealth = post_step(cpost, merton.wealth, nu_post, dt, z);
    }
    const bool hits_default = defaults && !past_default && t1 >= theta;
    if (hits_default) {
      // pre-jump row, then the jump, then the post-jump row at the same t
      emit(theta, false);
      investor.nu_at_default = inv.nu_at(theta);
      merton.nu_at_default = nu_mer;
      insider.wealth *= 1.0 + mp.delta * mp.gamma;
      investor.wealth *= 1.0 - investor.nu_at_default * mp.gamma;
      merton.wealth *= 1.0 - merton.nu_at_default * mp.gamma;
      past_default = true;
      emit(theta, true);
    } else {
      emit(t1, past_default);
    }
  }

  out.curve.insider_at_default = insider.nu_at_default;
  out.curve.investor_at_default = investor.nu_at_default;
  out.curve.merton_at_default = merton.nu_at_default;
  return out;
}

}  // namespace

ValueCurve compute_value_curve(const Model& m, const Scenario& sc, const CurveOptions& opt) {
  return build(m, sc, opt).curve;
}

WealthPath investor_wealth_path(const Model& m, const Scenario& sc, const CurveOptions& opt) {
  return build(m, sc, opt).investor_wealth;
}

}  // namespace defport

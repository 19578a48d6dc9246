#include "defport/mc/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "defport/mc/kernels.hpp"

namespace defport::mc {

namespace {

// stream salts keep the branches independent
constexpr std::uint64_t kSaltSchedule = 0x11;
constexpr std::uint64_t kSaltSurvival = 0x22;
constexpr std::uint64_t kSaltDefaultBranch = 0x33;
constexpr std::uint64_t kSaltUnbounded = 0x44;

double pre_rate(const ModelParams& mp, double nu) {
  return nu * mp.mu0 - 0.5 * nu * nu * mp.sigma0 * mp.sigma0;
}

void append_segment(ScheduleKernelParams& kp, const ModelParams& mp, double nu, double len) {
  if (!(len > 0.0)) return;
  kp.drift.push_back(pre_rate(mp, nu) * len);
  kp.vol.push_back(nu * mp.sigma0 * std::sqrt(len));
}

// schedule for a fixed scenario: policy up to theta (or T), jump, post regime
ScheduleKernelParams build_schedule(const Model& m, const Policy& policy,
                                    std::optional<double> theta, std::uint64_t key) {
  const auto& mp = m.params();
  ScheduleKernelParams kp;
  kp.key = key;
  kp.lx0 = std::log(mp.x0);
  kp.p = mp.p;
  const double cut = theta ? *theta : mp.horizon;
  for (std::size_t s = 0; s < policy.segments(); ++s) {
    const double lo = policy.knots[s];
    const double hi = std::min(policy.knots[s + 1], cut);
    if (hi > lo) append_segment(kp, mp, policy.nu[s], hi - lo);
  }
  if (theta) {
    const double nu_d = policy.at_default_fraction(*theta);
    const double jump = 1.0 - nu_d * mp.gamma;
    if (!(jump > 0.0))
      throw std::invalid_argument("inadmissible policy: fraction at default wipes out the wealth");
    kp.jump_lx = std::log(jump);
    const Coeffs c = m.after_default_coeffs(*theta);
    const double nu1 = policy.post.kind == PostDefaultRule::Kind::Optimal
                           ? after_default::merton_fraction(m, *theta)
                           : policy.post.value;
    const double h = mp.horizon - *theta;
    if (h > 0.0) {
      kp.drift.push_back((nu1 * c.mu1 - 0.5 * nu1 * nu1 * c.sigma1 * c.sigma1) * h);
      kp.vol.push_back(nu1 * c.sigma1 * std::sqrt(h));
    }
  }
  if (kp.drift.empty()) {  // degenerate zero-length scenario
    kp.drift.push_back(0.0);
    kp.vol.push_back(0.0);
  }
  return kp;
}

DefaultBranchKernelParams build_default_branch(const Model& m, const Policy& policy,
                                               std::uint64_t key) {
  const auto& mp = m.params();
  DefaultBranchKernelParams kp;
  kp.key = key;
  kp.lx0 = std::log(mp.x0);
  kp.p = mp.p;
  kp.lambda = mp.lambda;
  kp.horizon = mp.horizon;
  kp.trunc_mass = -std::expm1(-mp.lambda * mp.horizon);
  kp.gamma = mp.gamma;
  kp.one_minus_p = 1.0 - mp.p;
  for (std::size_t s = 0; s < policy.segments(); ++s) {
    const double len = policy.knots[s + 1] - policy.knots[s];
    kp.seg_start.push_back(policy.knots[s]);
    kp.seg_len.push_back(len);
    kp.seg_nu.push_back(policy.nu[s]);
    kp.seg_rate.push_back(pre_rate(mp, policy.nu[s]));
    kp.seg_vol.push_back(policy.nu[s] * mp.sigma0);
  }
  // admissibility of the at-default fraction, wherever the default can land
  if (policy.at_default) {
    if (!(*policy.at_default * mp.gamma < 1.0))
      throw std::invalid_argument("inadmissible policy: fraction at default wipes out the wealth");
    kp.has_override = true;
    kp.override_nu = *policy.at_default;
  } else {
    for (double nu : policy.nu)
      if (!(nu * mp.gamma < 1.0))
        throw std::invalid_argument(
            "inadmissible policy: fraction at default wipes out the wealth");
  }
  const auto& prof = m.profile();
  if (prof.kind == AfterDefaultProfile::Kind::Linear) {
    kp.profile_linear = true;
    kp.lin_mu_slope = mp.mu0 / mp.horizon;
    kp.lin_sg_base = 2.0 * mp.sigma0;
    kp.lin_sg_slope = -mp.sigma0 / mp.horizon;
  } else {
    kp.profile_linear = false;
    for (const auto& pt : prof.table) {
      kp.tab_theta.push_back(pt.theta);
      kp.tab_mu.push_back(pt.mu1);
      kp.tab_sg.push_back(pt.sigma1);
    }
  }
  kp.post_optimal = policy.post.kind == PostDefaultRule::Kind::Optimal;
  kp.post_nu = policy.post.value;
  return kp;
}

struct Moments {
  double mean;
  double se;
};

// fixed-order compensated sum: identical bytes for identical inputs, and the
// accumulation error stays at a few ulps regardless of the path count
double neumaier_sum(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

Moments reduce(const std::vector<double>& v) {
  const std::size_t n = v.size();
  const double mean = neumaier_sum(v) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) {
    const double d = x - mean;
    ss += d * d;
  }
  const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace

PathSample simulate_wealth(const Model& m, const Policy& policy, std::optional<double> theta,
                           std::uint64_t seed, std::uint64_t path_index) {
  if (theta && !(*theta >= 0.0 && *theta <= m.params().horizon))
    throw std::invalid_argument("scenario default time must lie in [0, T]");
  ScheduleKernelParams kp =
      build_schedule(m, policy, theta, stream_key(seed, kSaltSchedule));
  double w = 0.0, u = 0.0;
  active_kernels().schedule(kp, path_index, 1, &w, &u);
  return {theta, w, u};
}

McEstimate estimate_value(const Model& m, const Policy& policy, const Weighting& wgt,
                          std::uint64_t n, std::uint64_t seed, const ExecOptions& ex) {
  if (n < 1000) throw std::invalid_argument("need at least 1000 paths");
  const auto& mp = m.params();
  std::vector<double> wealth(n), util(n);

  if (wgt.kind == Weighting::Kind::Insider) {
    const double theta = m.default_time(wgt.barrier);
    std::optional<double> th;
    if (theta <= mp.horizon) th = theta;
    ScheduleKernelParams kp = build_schedule(m, policy, th, stream_key(seed, kSaltSchedule));
    fill_schedule(kp, n, wealth.data(), util.data(), ex.threads);
    Moments mo = reduce(util);
    return {mo.mean, mo.se, n, seed};
  }

  // survival branch
  ScheduleKernelParams surv =
      build_schedule(m, policy, std::nullopt, stream_key(seed, kSaltSurvival));
  fill_schedule(surv, n, wealth.data(), util.data(), ex.threads);
  Moments ms = reduce(util);
  // default-before-horizon branch
  DefaultBranchKernelParams db =
      build_default_branch(m, policy, stream_key(seed, kSaltDefaultBranch));
  fill_default_branch(db, n, wealth.data(), util.data(), ex.threads);
  Moments md = reduce(util);

  const double ps = std::exp(-mp.lambda * mp.horizon);
  const double pd = 1.0 - ps;
  const double mean = ps * ms.mean + pd * md.mean;
  const double se = std::sqrt(ps * ps * ms.se * ms.se + pd * pd * md.se * md.se);
  return {mean, se, n, seed};
}

std::vector<UnboundedRow> unbounded_experiment(const Model& m, const std::vector<double>& psis,
                                               double barrier, double eta_fraction,
                                               std::uint64_t n, std::uint64_t seed,
                                               const ExecOptions& ex) {
  const auto& mp = m.params();
  if (!(barrier > 0.0) || !(m.default_time(barrier) <= mp.horizon))
    throw std::invalid_argument("experiment barrier must default within the horizon");
  if (!(eta_fraction > 0.0 && eta_fraction < 1.0))
    throw std::invalid_argument("eta fraction must lie in (0,1)");
  const double window = eta_fraction * barrier / mp.lambda;  // exposure time

  std::vector<UnboundedRow> rows;
  std::vector<double> wealth(n), util(n);
  for (double psi : psis) {
    if (!(psi >= 0.0)) throw std::invalid_argument("psi must be nonnegative");
    ScheduleKernelParams kp;
    kp.key = stream_key(seed, kSaltUnbounded);  // common draws across psi
    kp.lx0 = std::log(mp.x0);
    kp.p = mp.p;
    kp.jump_lx = std::log(1.0 + mp.gamma * psi);
    kp.drift.push_back((-psi * mp.mu0 - 0.5 * psi * psi * mp.sigma0 * mp.sigma0) * window);
    kp.vol.push_back(-psi * mp.sigma0 * std::sqrt(window));
    fill_schedule(kp, n, wealth.data(), util.data(), ex.threads);
    Moments mw = reduce(wealth);
    Moments mu = reduce(util);
    rows.push_back({psi, mw.mean, mw.se, mu.mean, mu.se});
  }
  return rows;
}

}  // namespace defport::mc

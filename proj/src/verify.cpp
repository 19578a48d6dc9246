#include "defport/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>

#include "defport/after_default.hpp"
#include "defport/before_default.hpp"
#include "defport/mc/kernels.hpp"
#include "defport/mc/oracle.hpp"
#include "defport/mc/rng.hpp"
#include "defport/model.hpp"
#include "defport/quadrature.hpp"
#include "defport/value_curve.hpp"

namespace defport::verify {

namespace {

using after_default::investor_multiplier;
using after_default::value_multiplier;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

struct Builder {
  Criterion c;
  explicit Builder(std::string name) { c.name = std::move(name); }
  void check(const std::string& name, bool pass, const std::string& detail) {
    c.checks.push_back({name, pass, detail});
    c.pass = c.pass && pass;
  }
  void within(const std::string& name, double observed, double expected, double tol) {
    const double err = std::abs(observed - expected);
    check(name, err <= tol,
          "observed=" + fmt(observed) + " expected=" + fmt(expected) + " |err|=" + fmt(err) +
              " tol=" + fmt(tol));
  }
};

template <class F>
Criterion timed(const std::string& name, F&& body) {
  Builder b(name);
  auto t0 = std::chrono::steady_clock::now();
  body(b);
  b.c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return std::move(b.c);
}

ModelParams base_params() { return ModelParams{}; }  // mu0 .03 sigma0 .2 gamma .2 T 1 p .8 delta .5 lambda .3 x0 1

double growth_rate(const Model& m, double nu) {
  const auto& mp = m.params();
  return mp.p * (nu * mp.mu0 - 0.5 * (1.0 - mp.p) * nu * nu * mp.sigma0 * mp.sigma0);
}

// mean/stderr of exp(a + b Z) through the schedule kernel
std::pair<double, double> lognormal_moment_mc(double a, double b, std::uint64_t n,
                                              std::uint64_t key, int threads) {
  mc::ScheduleKernelParams kp;
  kp.key = key;
  kp.p = 1.0;
  kp.drift = {a};
  kp.vol = {b};
  std::vector<double> w(n), u(n);
  mc::fill_schedule(kp, n, w.data(), u.data(), threads);
  double sum = 0.0;
  for (double x : w) sum += x;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double x : w) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return {mean, se};
}

// ---------------------------------------------------------------------------
// Acceptance criteria
// ---------------------------------------------------------------------------

Criterion crit_k_formula(const Options& opt) {
  return timed("k-formula-mc-equivalence", [&](Builder& b) {
    Model m{base_params()};
    const auto& mp = m.params();
    const double q = mp.p / (mp.p - 1.0);
    int i = 0;
    for (double theta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const Coeffs c = m.after_default_coeffs(theta);
      const double bb = c.mu1 / c.sigma1;
      const double h = mp.horizon - theta;
      // E[Z^q], Z the after-default state-price density over [theta, T]
      auto [mean, se] =
          lognormal_moment_mc(-q * 0.5 * bb * bb * h, -q * bb * std::sqrt(h), opt.n,
                              mc::stream_key(opt.seed, 0x700 + i++), opt.threads);
      const double k_mc = std::pow(mean, 1.0 - mp.p);
      const double k_se = (1.0 - mp.p) * std::pow(mean, -mp.p) * se;
      b.within("theta=" + fmt(theta), k_mc, value_multiplier(m, theta), 3.0 * k_se + 1e-12);
    }
  });
}

Criterion crit_ratio_identity(const Options&) {
  return timed("progressive-ratio-identity", [&](Builder& b) {
    Model m{base_params()};
    const auto& mp = m.params();
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double theta = mp.horizon * i / 20.0;
      const double ratio = investor_multiplier(m, theta) / value_multiplier(m, theta);
      const double expect = mp.lambda * std::exp(-mp.lambda * theta);
      worst = std::max(worst, std::abs(ratio / expect - 1.0));
    }
    b.check("ratio = lambda*exp(-lambda*theta) across theta grid", worst < 1e-12,
            "max relative error " + fmt(worst));
  });
}

Criterion crit_no_default_reduction(const Options&) {
  return timed("no-default-merton-reduction", [&](Builder& b) {
    Model m{base_params()};
    const auto& mp = m.params();
    ValueSolution sol = solve_insider(m, mp.lambda * (mp.horizon + 0.5));
    const double nu = std::max(m.merton_fraction(), -mp.delta);
    const double expect = std::exp(growth_rate(m, nu) * mp.horizon);
    b.within("Y(0) equals the floor-constrained closed form", sol.y0(), expect, 1e-8);
  });
}

Criterion crit_dominance(const Options&) {
  return timed("bsde-dominance-and-tightness", [&](Builder& b) {
    Model m{base_params()};
    const auto& mp = m.params();
    const std::vector<double> barriers{0.1, 0.3, 0.6, 1.2};
    const std::vector<double> grid{-mp.delta, 0.0, 1.0, m.merton_fraction(), 4.9};
    for (double l : barriers) {
      ValueSolution sol = solve_insider(m, l);
      const double vopt = sol.value0(m);
      double worst_gap = -1e300;
      for (double nu : grid) {
        const double ev = evaluate_policy(m, Policy::constant(nu, mp.horizon),
                                          Weighting::insider(l));
        worst_gap = std::max(worst_gap, ev - vopt);
      }
      b.check("policy grid dominated at barrier " + fmt(l), worst_gap <= 1e-6,
              "max (policy - optimum) = " + fmt(worst_gap));
      Policy star = sol.extract_policy(m, true);
      const double ev_star = evaluate_policy(m, star, Weighting::insider(l));
      b.within("extracted policy attains the optimum at barrier " + fmt(l), ev_star, vopt, 1e-6);
    }
  });
}

struct OraclePair {
  std::string name;
  Policy policy;
  Weighting weighting;
};

std::vector<OraclePair> oracle_pairs(const Model& m) {
  const double T = m.params().horizon;
  const double nu_m = m.merton_fraction();
  std::vector<OraclePair> ps;
  ps.push_back({"flat-zero/investor", Policy::constant(0.0, T), Weighting::investor()});
  ps.push_back({"growth-optimal/investor", Policy::constant(nu_m, T), Weighting::investor()});
  ps.push_back({"growth-optimal/barrier-survives", Policy::constant(nu_m, T),
                Weighting::insider(0.6)});
  Policy pinned = Policy::constant(nu_m, T);
  pinned.at_default = -m.params().delta;
  ps.push_back({"pinned-floor/barrier-0.15", pinned, Weighting::insider(0.15)});
  Policy two;
  two.knots = {0.0, 0.5 * T, T};
  two.nu = {1.0, -0.5};
  two.at_default = -m.params().delta;
  two.post = PostDefaultRule::constant(0.5);
  ps.push_back({"two-segment/barrier-0.24", two, Weighting::insider(0.24)});
  ps.push_back({"short-floor/investor", Policy::constant(-m.params().delta, T),
                Weighting::investor()});
  return ps;
}

Criterion crit_oracle_agreement(const Options& opt) {
  return timed("oracle-agreement", [&](Builder& b) {
    Model m{base_params()};
    int i = 0;
    for (const auto& pr : oracle_pairs(m)) {
      const double cf = evaluate_policy(m, pr.policy, pr.weighting);
      const mc::McEstimate est = mc::estimate_value(m, pr.policy, pr.weighting, opt.n,
                                                    opt.seed + 17 * i++, {opt.threads});
      b.within(pr.name, est.mean, cf, 3.0 * est.stderr_ + 1e-12);
    }
  });
}

Criterion crit_terminal_arbitration(const Options& opt) {
  return timed("terminal-condition-arbitration", [&](Builder& b) {
    Model m{base_params()};
    const double l = 0.15;  // default mid-horizon
    SolveOptions good;
    SolveOptions bad;
    bad.terminal = TerminalVariant::DividedByP;
    const double v_good = solve_insider(m, l, good).value0(m);
    const double v_bad = solve_insider(m, l, bad).value0(m);
    Policy star = solve_insider(m, l, good).extract_policy(m, true);
    const mc::McEstimate est =
        mc::estimate_value(m, star, Weighting::insider(l), opt.n, opt.seed + 909, {opt.threads});
    b.check("consistent terminal agrees with the oracle",
            std::abs(v_good - est.mean) <= 3.0 * est.stderr_,
            "analytic=" + fmt(v_good) + " mc=" + fmt(est.mean) + " se=" + fmt(est.stderr_));
    b.check("terminal divided by p is flagged by the oracle",
            std::abs(v_bad - est.mean) > 5.0 * est.stderr_,
            "analytic=" + fmt(v_bad) + " mc=" + fmt(est.mean) + " se=" + fmt(est.stderr_));
  });
}

Criterion crit_unbounded(const Options& opt) {
  return timed("short-sale-unboundedness", [&](Builder& b) {
    Model m{base_params()};  // lambda 0.3, gamma 0.2
    const auto& mp = m.params();
    const double barrier = mp.lambda * mp.horizon / 4.0;
    auto rows = mc::unbounded_experiment(m, {1.0, 5.0, 25.0, 125.0}, barrier, 0.05, opt.n,
                                         opt.seed, {opt.threads});
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double gap = rows[i + 1].mean_utility - rows[i].mean_utility;
      const double se = std::sqrt(rows[i].utility_stderr * rows[i].utility_stderr +
                                  rows[i + 1].utility_stderr * rows[i + 1].utility_stderr);
      b.check("mean utility increases psi=" + fmt(rows[i].psi) + "->" + fmt(rows[i + 1].psi),
              gap > 2.0 * se, "gap=" + fmt(gap) + " 2se=" + fmt(2.0 * se));
      const double wgap = rows[i + 1].mean_wealth - rows[i].mean_wealth;
      const double wse = std::sqrt(rows[i].wealth_stderr * rows[i].wealth_stderr +
                                   rows[i + 1].wealth_stderr * rows[i + 1].wealth_stderr);
      b.check("mean wealth non-decreasing psi=" + fmt(rows[i].psi) + "->" + fmt(rows[i + 1].psi),
              wgap > -2.0 * wse, "gap=" + fmt(wgap) + " 2se=" + fmt(2.0 * wse));
    }
  });
}

std::string series_str(const std::vector<double>& v) {
  std::string s;
  for (double x : v) {
    if (!s.empty()) s += ", ";
    s += fmt(x);
  }
  return s;
}

bool non_decreasing(const std::vector<double>& v, double tol) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] < v[i] - tol) return false;
  return true;
}

Criterion crit_figure_shapes(const Options& opt) {
  return timed("figure-shape-reproduction", [&](Builder& b) {
    // delta sweep at lambda = 0.3, gamma = 0.5
    {
      std::vector<double> vs;
      for (double d : {0.0, 0.1, 0.3, 0.5}) {
        ModelParams mp = base_params();
        mp.gamma = 0.5;
        mp.delta = d;
        vs.push_back(insider_ex_ante(Model{mp}).value);
      }
      b.check("delta sweep: barrier-informed value non-decreasing in delta",
              non_decreasing(vs, 1e-9), series_str(vs));
    }
    // gamma sweep at delta = 0.1, for both agents and both intensities
    for (double lam : {0.1, 0.3}) {
      std::vector<double> ins, inv;
      for (double g : {0.1, 0.3, 0.5}) {
        ModelParams mp = base_params();
        mp.lambda = lam;
        mp.gamma = g;
        mp.delta = 0.1;
        Model m{mp};
        ins.push_back(insider_ex_ante(m).value);
        inv.push_back(solve_investor(m).value0(m));
      }
      b.check("gamma sweep lambda=" + fmt(lam) + ": barrier-informed non-decreasing",
              non_decreasing(ins, 1e-9), series_str(ins));
      b.check("gamma sweep lambda=" + fmt(lam) + ": progressive non-decreasing",
              non_decreasing(inv, 1e-9), series_str(inv));
    }
    // extreme default/loss: progressive agent starts above the barrier-informed one
    {
      ModelParams mp = base_params();
      mp.lambda = 0.5;
      mp.gamma = 0.5;
      mp.delta = 0.1;
      Model m{mp};
      const double vi = insider_ex_ante(m).value;
      const double vv = solve_investor(m).value0(m);
      b.check("extreme regime: progressive initial value exceeds barrier-informed",
              vv > vi, "progressive=" + fmt(vv) + " barrier-informed=" + fmt(vi));
    }
    // default-time jump on the reference scenario
    {
      Model m{base_params()};
      ValueCurve vc = compute_value_curve(m, {0.15, opt.seed});
      std::size_t j = 0;
      for (; j + 1 < vc.points.size(); ++j)
        if (vc.points[j].t == vc.points[j + 1].t && !vc.points[j].defaulted) break;
      b.check("curve carries a default", vc.has_default && j + 1 < vc.points.size(), "");
      if (vc.has_default && j + 1 < vc.points.size()) {
        const auto& pre = vc.points[j];
        const auto& post = vc.points[j + 1];
        auto drop = [&](double a, double z, double nu, const char* who) {
          if (nu > 0.0)
            b.check(std::string(who) + " with positive at-default exposure drops", z < a,
                    "pre=" + fmt(a) + " post=" + fmt(z) + " nu=" + fmt(nu));
        };
        drop(pre.investor, post.investor, vc.investor_at_default, "progressive curve");
        drop(pre.merton, post.merton, vc.merton_at_default, "naive curve");
        b.check("barrier-informed curve continuous through the default",
                std::abs(post.insider / pre.insider - 1.0) < 1e-6,
                "pre=" + fmt(pre.insider) + " post=" + fmt(post.insider));
      }
    }
  });
}

Criterion crit_information_dominance(const Options&) {
  return timed("information-dominance", [&](Builder& b) {
    for (double lam : {0.1, 0.3, 0.5})
      for (double g : {0.2, 0.5})
        for (double d : {0.1, 0.5}) {
          ModelParams mp = base_params();
          mp.lambda = lam;
          mp.gamma = g;
          mp.delta = d;
          Model m{mp};
          const double vi = insider_ex_ante(m).value;
          InvestorOptions io;
          io.floor = -d;
          const double vv = solve_investor(m, io).value0(m);
          b.check("lambda=" + fmt(lam) + " gamma=" + fmt(g) + " delta=" + fmt(d),
                  vi >= vv - 1e-9,
                  "barrier-informed=" + fmt(vi) + " floored progressive=" + fmt(vv));
        }
  });
}

// ---------------------------------------------------------------------------
// Module invariants beyond the acceptance list
// ---------------------------------------------------------------------------

Criterion inv_market_model(const Options& opt) {
  return timed("market-model-invariants", [&](Builder& b) {
    Model m{base_params()};
    const auto& mp = m.params();
    // barrier sampling: mean and survival curve
    BarrierLaw law;
    mc::RngStream rng(opt.seed, 0x99);
    const std::uint64_t n = opt.n;
    std::vector<double> draws(n);
    double sum = 0.0;
    for (auto& d : draws) {
      d = sample_barrier(law, rng);
      sum += d;
    }
    const double mean = sum / static_cast<double>(n);
    b.within("unit-exponential sample mean", mean, 1.0, 3.0 / std::sqrt(static_cast<double>(n)));
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
      std::uint64_t count = 0;
      for (double d : draws)
        if (m.default_time(d) > t) ++count;
      const double phat = static_cast<double>(count) / static_cast<double>(n);
      const double pth = std::exp(-mp.lambda * t);
      const double se = std::sqrt(pth * (1.0 - pth) / static_cast<double>(n));
      b.within("survival probability at t=" + fmt(t), phat, pth, 3.0 * se);
    }
    // default-time monotonicity
    bool mono = true;
    for (int i = 0; i < 50; ++i) {
      const double l = 0.01 + 0.05 * i;
      mono = mono && defport::default_time(l + 0.01, 0.3) > defport::default_time(l, 0.3);
      mono = mono && defport::default_time(l, 0.35) < defport::default_time(l, 0.3);
    }
    b.check("default time increasing in the barrier, decreasing in the intensity", mono, "");
    // profile ratios
    double worst = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double th = mp.horizon * i / 10.0;
      const Coeffs c = m.after_default_coeffs(th);
      worst = std::max(worst, std::abs(c.mu1 - mp.mu0 * th / mp.horizon));
      worst = std::max(worst, std::abs(c.sigma1 - mp.sigma0 * (2.0 - th / mp.horizon)));
    }
    b.check("linear profile ratios exact", worst < 1e-15, "max abs err " + fmt(worst));
  });
}

Criterion inv_after_default(const Options& opt) {
  return timed("after-default-invariants", [&](Builder& b) {
    Model m{base_params()};
    const auto& mp = m.params();
    b.within("zero horizon multiplier", value_multiplier(m, mp.horizon), 1.0, 0.0);
    b.within("zero drift at immediate default", value_multiplier(m, 0.0), 1.0, 0.0);
    // p-homogeneity
    double worst = 0.0;
    for (double cmul : {0.5, 2.0, 7.5}) {
      const double lhs = after_default::insider_value(m, 0.5, cmul * 1.3);
      const double rhs = std::pow(cmul, mp.p) * after_default::insider_value(m, 0.5, 1.3);
      worst = std::max(worst, std::abs(lhs / rhs - 1.0));
    }
    b.check("value homogeneous of degree p in wealth", worst < 1e-12,
            "max rel err " + fmt(worst));
    // the progressive/barrier-informed ratio does not depend on preferences
    // or on the coefficient profile
    ModelParams mp2 = base_params();
    mp2.p = 0.2;
    Model m2{mp2};
    AfterDefaultProfile table = AfterDefaultProfile::from_table(
        {{0.0, 0.01, 0.5}, {0.6, 0.02, 0.45}, {1.0, 0.03, 0.3}});
    Model m3{base_params(), table};
    double worst2 = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double th = mp.horizon * i / 10.0;
      const double expect = mp.lambda * std::exp(-mp.lambda * th);
      for (const Model* mm : {&m, &m2, &m3}) {
        const double r = investor_multiplier(*mm, th) / value_multiplier(*mm, th);
        worst2 = std::max(worst2, std::abs(r / expect - 1.0));
      }
    }
    b.check("multiplier ratio independent of preferences and profile", worst2 < 1e-12,
            "max rel err " + fmt(worst2));
    // growth-optimal fraction confirmed by a Monte Carlo grid search
    {
      const double theta = 0.5;
      const double star = after_default::merton_fraction(m, theta);
      const Coeffs c = m.after_default_coeffs(theta);
      const double h = mp.horizon - theta;
      std::vector<double> cand{0.0, 0.5 * star, star, 1.5 * star, 2.0 * star};
      double best = -1e300;
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        mc::ScheduleKernelParams kp;
        kp.key = mc::stream_key(opt.seed, 0xAD);  // common draws across candidates
        kp.p = mp.p;
        const double nu = cand[i];
        kp.drift = {(nu * c.mu1 - 0.5 * nu * nu * c.sigma1 * c.sigma1) * h};
        kp.vol = {nu * c.sigma1 * std::sqrt(h)};
        std::vector<double> w(opt.n), u(opt.n);
        mc::fill_schedule(kp, opt.n, w.data(), u.data(), opt.threads);
        double s = 0.0;
        for (double x : u) s += x;
        if (s > best) {
          best = s;
          best_i = i;
        }
      }
      b.check("post-default fraction grid search lands on the closed form", best_i == 2,
              "argmax candidate " + fmt(cand[best_i]) + " expected " + fmt(cand[2]));
    }
  });
}

Criterion inv_before_default(const Options& opt) {
  return timed("before-default-invariants", [&](Builder& b) {
    Model m{base_params()};
    const auto& mp = m.params();

    // piecewise closed form whenever the floor is inactive
    for (double l : {0.06, 0.15, 0.27}) {
      const double theta = m.default_time(l);
      ValueSolution sol = solve_insider(m, l);
      const double nu = std::max(m.merton_fraction(), -mp.delta);
      const double expect = value_multiplier(m, theta) *
                            std::pow(1.0 + mp.delta * mp.gamma, mp.p) *
                            std::exp(growth_rate(m, nu) * theta);
      b.within("closed-form match at barrier " + fmt(l), sol.y0(), expect, 1e-8);
    }

    // at-default pin never hurts (exact inequality on the jump factor)
    {
      bool ok = true;
      for (double nu : {-0.5, 0.0, 1.0, 3.75})
        for (double l : {0.1, 0.2}) {
          Policy a = Policy::constant(nu, mp.horizon);
          Policy pinned = a;
          pinned.at_default = -mp.delta;
          ok = ok && evaluate_policy(m, pinned, Weighting::insider(l)) >=
                         evaluate_policy(m, a, Weighting::insider(l)) - 1e-12;
        }
      b.check("pinning the at-default fraction to the floor never decreases the value", ok, "");
    }

    // progressive benchmark: reduction, extracted-policy consistency, oracle sup
    {
      ModelParams mp0 = base_params();
      mp0.lambda = 1e-12;
      Model m0{mp0};
      b.within("intensity -> 0 reduces to the default-free value",
               solve_investor(m0).y0(), std::exp(growth_rate(m0, m0.merton_fraction())), 1e-6);

      ValueSolution inv = solve_investor(m);
      Policy ext = inv.extract_policy(m, false);
      const double ev = evaluate_policy(m, ext, Weighting::investor());
      b.within("progressive solve consistent with direct evaluation of its own policy",
               ev, inv.value0(m), 5e-5 * inv.value0(m));
      const mc::McEstimate est =
          mc::estimate_value(m, ext, Weighting::investor(), opt.n, opt.seed + 5, {opt.threads});
      b.within("progressive extracted policy agrees with the oracle", est.mean, ev,
               3.0 * est.stderr_);
      // no policy on a coarse grid beats the solve
      double best = -1e300;
      for (double nu : {-4.0, -1.0, 0.0, 1.5, 3.0, 3.75})
        best = std::max(best,
                        evaluate_policy(m, Policy::constant(nu, mp.horizon), Weighting::investor()));
      b.check("coarse policy grid dominated by the progressive solve",
              best <= inv.value0(m) + 1e-9,
              "best grid value " + fmt(best) + " solve " + fmt(inv.value0(m)));
    }

    // naive benchmark
    {
      ModelParams mp0 = base_params();
      mp0.lambda = 1e-12;
      Model m0{mp0};
      b.within("naive value reduces when the intensity vanishes", merton_value(m0),
               std::exp(growth_rate(m0, m0.merton_fraction())) * m0.utility(mp0.x0), 1e-6);
      b.check("naive value sits below the progressive optimum",
              merton_value(m) < solve_investor(m).value0(m),
              fmt(merton_value(m)) + " vs " + fmt(solve_investor(m).value0(m)));
      std::vector<double> vs;
      for (double g : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        ModelParams mpg = base_params();
        mpg.gamma = g;
        vs.push_back(merton_value(Model{mpg}));
      }
      bool dec = true;
      for (std::size_t i = 0; i + 1 < vs.size(); ++i) dec = dec && vs[i + 1] <= vs[i] + 1e-12;
      b.check("naive value decreasing in the loss fraction", dec, series_str(vs));
    }

    // flat-zero policy closed form vs an independent in-test quadrature
    {
      const double ev = evaluate_policy(m, Policy::constant(0.0, mp.horizon),
                                        Weighting::investor());
      // Simpson on a fine grid, written independently of the library quadrature
      const int N = 4000;
      double acc = 0.0;
      for (int i = 0; i <= N; ++i) {
        const double th = mp.horizon * i / N;
        const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * mp.lambda * std::exp(-mp.lambda * th) * value_multiplier(m, th);
      }
      acc *= mp.horizon / N / 3.0;
      const double expect = m.utility(mp.x0) * (std::exp(-mp.lambda * mp.horizon) + acc);
      b.within("flat-zero policy value matches an independent quadrature", ev, expect, 1e-9);
    }

    // ex-ante aggregation limits
    {
      ModelParams mpg = base_params();
      mpg.gamma = 1e-9;
      mpg.delta = 0.0;
      AfterDefaultProfile flat = AfterDefaultProfile::from_table(
          {{0.0, mpg.mu0, mpg.sigma0}, {mpg.horizon, mpg.mu0, mpg.sigma0}});
      Model mflat{mpg, flat};
      b.within("degenerate loss: ex-ante value equals the naive value",
               insider_ex_ante(mflat).value, merton_value(mflat), 1e-6);

      const double limit = std::pow(1.0 + mp.delta * mp.gamma, mp.p) * m.utility(mp.x0);
      double prev_gap = 1e300;
      bool shrinking = true;
      double final_gap = 0.0;
      for (double lam : {20.0, 50.0}) {
        ModelParams mpl = base_params();
        mpl.lambda = lam;
        ExAnteOptions eo;
        eo.nodes = 256;
        final_gap = std::abs(insider_ex_ante(Model{mpl}, eo).value - limit);
        shrinking = shrinking && final_gap < prev_gap;
        prev_gap = final_gap;
      }
      b.check("large-intensity limit approaches the immediate-default value",
              shrinking && final_gap < 5e-3, "final gap " + fmt(final_gap));
    }

    // curve coincidence when default risk vanishes and the floor is slack
    {
      ModelParams mp0 = base_params();
      mp0.lambda = 1e-8;
      Model m0{mp0};
      ValueCurve vc = compute_value_curve(m0, {10.0, opt.seed});
      double worst = 0.0;
      for (const auto& cp : vc.points) {
        worst = std::max(worst, std::abs(cp.investor / cp.insider - 1.0));
        worst = std::max(worst, std::abs(cp.merton / cp.insider - 1.0));
      }
      b.check("all three curves coincide without default risk", worst < 1e-5,
              "max rel spread " + fmt(worst));
      b.check("no jump without a default", !vc.has_default, "");
    }

    // post-default multipliers agree across agents along the curve
    {
      ValueCurve vc = compute_value_curve(m, {0.15, opt.seed});
      double lo = 1e300, hi = -1e300;
      for (const auto& cp : vc.points)
        if (cp.defaulted) {
          const double r = cp.insider / cp.investor;
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
      b.check("post-default value ratio across agents is wealth-only", hi - lo < 1e-9 * hi,
              "spread " + fmt(hi - lo));
    }
  });
}

Criterion inv_mc_oracle(const Options& opt) {
  return timed("mc-oracle-invariants", [&](Builder& b) {
    Model m{base_params()};
    const auto& mp = m.params();

    // moment matching against lognormal closed forms, no default
    for (double nu : {0.0, 1.0, 3.75}) {
      mc::ScheduleKernelParams kp;
      kp.key = mc::stream_key(opt.seed, 0xB0 + static_cast<std::uint64_t>(nu * 4));
      kp.p = mp.p;
      const double rate = nu * mp.mu0 - 0.5 * nu * nu * mp.sigma0 * mp.sigma0;
      kp.drift = {rate * mp.horizon};
      kp.vol = {nu * mp.sigma0 * std::sqrt(mp.horizon)};
      std::vector<double> w(opt.n), u(opt.n);
      mc::fill_schedule(kp, opt.n, w.data(), u.data(), opt.threads);
      double sw = 0.0, su = 0.0;
      for (double x : w) sw += x;
      for (double x : u) su += x;
      const double mw = sw / static_cast<double>(opt.n);
      const double mu = su / static_cast<double>(opt.n);
      double ssw = 0.0, ssu = 0.0;
      for (double x : w) ssw += (x - mw) * (x - mw);
      for (double x : u) ssu += (x - mu) * (x - mu);
      const double sew = std::sqrt(ssw / static_cast<double>(opt.n - 1) / static_cast<double>(opt.n));
      const double seu = std::sqrt(ssu / static_cast<double>(opt.n - 1) / static_cast<double>(opt.n));
      b.within("terminal wealth mean, fraction " + fmt(nu), mw,
               std::exp(nu * mp.mu0 * mp.horizon), 3.0 * sew + 1e-12);
      b.within("terminal utility mean, fraction " + fmt(nu), mu,
               std::exp(growth_rate(m, nu) * mp.horizon) / mp.p, 3.0 * seu + 1e-12);
    }

    // determinism: repeated runs and different thread counts byte-identical
    {
      Policy pol = Policy::constant(2.0, mp.horizon);
      auto e1 = mc::estimate_value(m, pol, Weighting::investor(), 40000, opt.seed, {1});
      auto e2 = mc::estimate_value(m, pol, Weighting::investor(), 40000, opt.seed, {1});
      auto e3 = mc::estimate_value(m, pol, Weighting::investor(), 40000, opt.seed, {3});
      const bool same12 = std::memcmp(&e1.mean, &e2.mean, 8) == 0 &&
                          std::memcmp(&e1.stderr_, &e2.stderr_, 8) == 0;
      const bool same13 = std::memcmp(&e1.mean, &e3.mean, 8) == 0 &&
                          std::memcmp(&e1.stderr_, &e3.stderr_, 8) == 0;
      b.check("estimates byte-identical across repeated runs", same12, "");
      b.check("estimates byte-identical across thread counts", same13, "");
    }

    // stderr ~ 1/sqrt(n)
    {
      Policy pol = Policy::constant(3.75, mp.horizon);
      auto e1 = mc::estimate_value(m, pol, Weighting::investor(), opt.n, opt.seed, {opt.threads});
      auto e4 =
          mc::estimate_value(m, pol, Weighting::investor(), 4 * opt.n, opt.seed, {opt.threads});
      const double ratio = e4.stderr_ / e1.stderr_;
      b.check("stderr halves from n to 4n (within 20%)", ratio > 0.4 && ratio < 0.6,
              "ratio " + fmt(ratio));
    }

    // scalar and SIMD kernels produce bit-identical paths
    {
      const mc::KernelSet* simd = mc::avx2_kernels();
      if (!simd) {
        b.check("simd-vs-scalar equivalence (no AVX2 on this host, scalar only)", true, "");
      } else {
        bool same = true;
        mc::ScheduleKernelParams kp;
        kp.key = mc::stream_key(opt.seed, 0xC0);
        kp.p = mp.p;
        kp.jump_lx = std::log(0.9);
        kp.drift = {0.01, -0.002, 0.005};
        kp.vol = {0.08, 0.12, 0.02};
        for (std::uint64_t cnt : {1ull, 5ull, 64ull, 1001ull}) {
          std::vector<double> w1(cnt), u1(cnt), w2(cnt), u2(cnt);
          mc::scalar_kernels()->schedule(kp, 3, cnt, w1.data(), u1.data());
          simd->schedule(kp, 3, cnt, w2.data(), u2.data());
          same = same && std::memcmp(w1.data(), w2.data(), cnt * 8) == 0 &&
                 std::memcmp(u1.data(), u2.data(), cnt * 8) == 0;
        }
        mc::DefaultBranchKernelParams db;
        db.key = mc::stream_key(opt.seed, 0xC1);
        db.p = mp.p;
        db.lambda = mp.lambda;
        db.horizon = mp.horizon;
        db.trunc_mass = -std::expm1(-mp.lambda * mp.horizon);
        db.gamma = mp.gamma;
        db.one_minus_p = 1.0 - mp.p;
        db.seg_start = {0.0, 0.4};
        db.seg_len = {0.4, mp.horizon - 0.4};
        db.seg_nu = {2.0, -0.4};
        db.seg_rate = {2.0 * mp.mu0 - 0.5 * 4.0 * mp.sigma0 * mp.sigma0,
                       -0.4 * mp.mu0 - 0.5 * 0.16 * mp.sigma0 * mp.sigma0};
        db.seg_vol = {2.0 * mp.sigma0, -0.4 * mp.sigma0};
        db.profile_linear = true;
        db.lin_mu_slope = mp.mu0 / mp.horizon;
        db.lin_sg_base = 2.0 * mp.sigma0;
        db.lin_sg_slope = -mp.sigma0 / mp.horizon;
        for (std::uint64_t cnt : {2ull, 63ull, 997ull}) {
          std::vector<double> w1(cnt), u1(cnt), w2(cnt), u2(cnt);
          mc::scalar_kernels()->default_branch(db, 11, cnt, w1.data(), u1.data());
          simd->default_branch(db, 11, cnt, w2.data(), u2.data());
          same = same && std::memcmp(w1.data(), w2.data(), cnt * 8) == 0 &&
                 std::memcmp(u1.data(), u2.data(), cnt * 8) == 0;
        }
        b.check("simd-vs-scalar equivalence (bit exact)", same, "");
      }
    }
  });
}

}  // namespace

std::vector<Criterion> acceptance(const Options& opt) {
  std::vector<Criterion> out;
  out.push_back(crit_k_formula(opt));
  out.push_back(crit_ratio_identity(opt));
  out.push_back(crit_no_default_reduction(opt));
  out.push_back(crit_dominance(opt));
  out.push_back(crit_oracle_agreement(opt));
  out.push_back(crit_terminal_arbitration(opt));
  out.push_back(crit_unbounded(opt));
  out.push_back(crit_figure_shapes(opt));
  out.push_back(crit_information_dominance(opt));
  return out;
}

std::vector<Criterion> full_suite(const Options& opt) {
  std::vector<Criterion> out = acceptance(opt);
  out.push_back(inv_market_model(opt));
  out.push_back(inv_after_default(opt));
  out.push_back(inv_before_default(opt));
  out.push_back(inv_mc_oracle(opt));
  return out;
}

int report(const std::vector<Criterion>& results, std::ostream& os, bool verbose) {
  int failed = 0;
  for (const auto& c : results) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " (" << fmt(c.seconds) << " s)\n";
    for (const auto& ch : c.checks) {
      if (!ch.pass || verbose) {
        os << "    " << (ch.pass ? "ok   " : "FAIL ") << ch.name;
        if (!ch.detail.empty()) os << ": " << ch.detail;
        os << "\n";
      }
    }
    if (!c.pass) ++failed;
  }
  return failed;
}

}  // namespace defport::verify

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "defport/before_default.hpp"
#include "defport/mc/rng.hpp"
#include "defport/value_curve.hpp"

using namespace defport;

TEST_CASE("driver optimization, floor-only") {
  Model m;  // mu0 .03 sigma0 .2 p .8 delta .5
  DriverBounds bounds{-0.5, std::nullopt};
  DriverResult r = optimize_driver(m, 1.0, bounds);
  CHECK(r.nu_star == doctest::Approx(3.75));
  CHECK(r.f_value == doctest::Approx(0.045).epsilon(1e-12));

  ModelParams flat;
  flat.mu0 = 0.0;
  DriverResult r0 = optimize_driver(Model{flat}, 2.0, bounds);
  CHECK(r0.nu_star == doctest::Approx(0.0));
  CHECK(r0.f_value == doctest::Approx(0.0));

  ModelParams neg;
  neg.mu0 = -0.03;
  neg.delta = 0.1;
  DriverResult rn = optimize_driver(Model{neg}, 3.0, DriverBounds{-0.1, std::nullopt});
  CHECK(rn.nu_star == doctest::Approx(-0.1));
  CHECK(rn.f_value == doctest::Approx(0.0023680 * 3.0).epsilon(1e-9));

  CHECK_THROWS_AS(optimize_driver(m, 0.0, bounds), std::invalid_argument);
}

TEST_CASE("driver cap applies when requested") {
  ModelParams mp;
  mp.gamma = 0.5;
  Model m{mp};
  DriverResult capped = optimize_driver(m, 1.0, DriverBounds{-0.5, (1.0 - 1e-6) / 0.5});
  CHECK(capped.nu_star == doctest::Approx(2.0).epsilon(1e-5));
  DriverResult free = optimize_driver(m, 1.0, DriverBounds{-0.5, std::nullopt});
  CHECK(free.nu_star == doctest::Approx(3.75));
}

TEST_CASE("barrier-informed solve: closed forms") {
  Model m;
  // barrier so large the default falls outside the horizon
  ValueSolution surv = solve_insider(m, 0.6);
  CHECK(surv.terminal_kind == ValueSolution::TerminalKind::NoDefault);
  CHECK(surv.y0() == doctest::Approx(std::exp(0.045)).epsilon(1e-8));
  CHECK(surv.y0() == doctest::Approx(1.0460278599).epsilon(1e-8));
  CHECK(surv.error_estimate < 1e-10);

  // immediate default
  ValueSolution now = solve_insider(m, 0.0);
  CHECK(now.terminal_kind == ValueSolution::TerminalKind::DefaultAt);
  CHECK(now.y0() == doctest::Approx(std::pow(1.1, 0.8)));

  // mid-horizon default: piecewise closed form
  ValueSolution mid = solve_insider(m, 0.15);
  const double expect = std::exp(0.0025) * std::pow(1.1, 0.8) * std::exp(0.045 * 0.5);
  CHECK(mid.y0() == doctest::Approx(expect).epsilon(1e-8));
  CHECK(mid.default_time == doctest::Approx(0.5));
  // extracted strategy: constant growth-optimal fraction, floor at the jump
  Policy star = mid.extract_policy(m, true);
  CHECK(star.segments() == 1);
  CHECK(star.nu[0] == doctest::Approx(3.75));
  REQUIRE(star.at_default.has_value());
  CHECK(*star.at_default == doctest::Approx(-0.5));
}

TEST_CASE("immediate default: zero-length solve and policy extraction") {
  Model m;
  ValueSolution now = solve_insider(m, 0.0);
  Policy p = now.extract_policy(m, true);
  CHECK(p.knots.front() == 0.0);
  CHECK(p.knots.back() == doctest::Approx(1.0));
  CHECK(evaluate_policy(m, p, Weighting::insider(0.0)) ==
        doctest::Approx(now.value0(m)).epsilon(1e-10));
}

TEST_CASE("policy evaluation closed forms") {
  Model m;
  const auto& mp = m.params();
  // flat-zero under the progressive weighting, vanishing intensity
  ModelParams mp0 = mp;
  mp0.lambda = 1e-12;
  Model m0{mp0};
  CHECK(evaluate_policy(m0, Policy::constant(0.0, 1.0), Weighting::investor()) ==
        doctest::Approx(1.25).epsilon(1e-9));

  // growth-optimal fraction on a surviving barrier scenario
  CHECK(evaluate_policy(m, Policy::constant(3.75, 1.0), Weighting::insider(0.6)) ==
        doctest::Approx(std::exp(0.045) * 1.25).epsilon(1e-12));

  // inadmissible at-default fraction is rejected
  Policy bad = Policy::constant(5.5, 1.0);  // 5.5 * 0.2 > 1
  CHECK_THROWS_AS(evaluate_policy(m, bad, Weighting::insider(0.15)), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_policy(m, bad, Weighting::investor()), std::invalid_argument);
  // but harmless when the default lands outside the horizon
  CHECK_NOTHROW(evaluate_policy(m, bad, Weighting::insider(0.6)));
}

TEST_CASE("coarse grids fail the integrator tolerance loudly") {
  ModelParams mp;
  mp.lambda = 0.5;
  mp.gamma = 0.5;
  Model m{mp};
  InvestorOptions io;
  io.steps = 2;
  CHECK_THROWS_AS(solve_investor(m, io), std::runtime_error);
  io.steps = 2000;
  CHECK_NOTHROW(solve_investor(m, io));
}

TEST_CASE("progressive solve reduces to the default-free problem") {
  ModelParams mp;
  mp.lambda = 1e-12;
  Model m{mp};
  CHECK(solve_investor(m).y0() == doctest::Approx(std::exp(0.045)).epsilon(1e-8));
}

TEST_CASE("progressive driver: floor binds when shorting is attractive") {
  ModelParams mp;
  mp.lambda = 0.5;
  mp.gamma = 0.5;
  Model m{mp};
  DriverResult free = optimize_investor_driver(m, 0.5, 1.0, std::nullopt);
  CHECK(free.nu_star < -1.0);  // aggressive short
  DriverResult floored = optimize_investor_driver(m, 0.5, 1.0, -0.1);
  CHECK(floored.nu_star == doctest::Approx(-0.1));
  CHECK(floored.f_value <= free.f_value);
}

TEST_CASE("naive benchmark") {
  Model m;
  // clamp keeps the fraction admissible for large losses
  ModelParams mp = m.params();
  mp.gamma = 0.5;
  Model mg{mp};
  Policy naive = merton_policy(mg);
  CHECK(naive.nu[0] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(merton_value(m) < solve_investor(m).value0(m));
}

TEST_CASE("fixed-policy value equation matches the quadrature evaluation") {
  Model m;
  ValueSolution mv = solve_policy_value(m, merton_policy(m));
  CHECK(mv.value0(m) == doctest::Approx(merton_value(m)).epsilon(1e-9));
}

TEST_CASE("ex-ante aggregation dominates the floored progressive benchmark") {
  Model m;
  ExAnteValue ea = insider_ex_ante(m);
  CHECK(ea.error_estimate < 1e-10);
  InvestorOptions io;
  io.floor = -m.params().delta;
  CHECK(ea.value >= solve_investor(m, io).value0(m));
}

TEST_CASE("value curve: immediate default") {
  Model m;
  ValueCurve vc = compute_value_curve(m, {0.0, 5});
  REQUIRE(vc.has_default);
  CHECK(vc.default_time == 0.0);
  REQUIRE(vc.points.size() >= 2);
  CHECK(!vc.points[0].defaulted);
  CHECK(vc.points[1].defaulted);
  CHECK(vc.points[1].t == 0.0);
  // informed agent's value continuous, naive agent takes the full loss
  CHECK(vc.points[1].insider == doctest::Approx(vc.points[0].insider).epsilon(1e-8));
  CHECK(vc.points[1].merton < vc.points[0].merton);
  for (std::size_t i = 1; i < vc.points.size(); ++i) CHECK(vc.points[i].defaulted);
}

TEST_CASE("value curve: jump bookkeeping") {
  Model m;
  ValueCurve vc = compute_value_curve(m, {0.15, 7});
  REQUIRE(vc.has_default);
  CHECK(vc.default_time == doctest::Approx(0.5));
  // exactly one duplicated time stamp: pre- and post-jump rows at tau
  int dup = 0;
  for (std::size_t i = 0; i + 1 < vc.points.size(); ++i)
    if (vc.points[i].t == vc.points[i + 1].t) {
      ++dup;
      CHECK(!vc.points[i].defaulted);
      CHECK(vc.points[i + 1].defaulted);
      // the informed agent's value is continuous through its own default
      CHECK(vc.points[i + 1].insider ==
            doctest::Approx(vc.points[i].insider).epsilon(1e-8));
      // naive agent holds a long position into the loss
      CHECK(vc.points[i + 1].merton < vc.points[i].merton);
    }
  CHECK(dup == 1);

  ValueCurve safe = compute_value_curve(m, {0.6, 7});
  CHECK(!safe.has_default);
  for (const auto& cp : safe.points) CHECK(!cp.defaulted);
}

TEST_CASE("randomized parameters: closed form, dominance, scaling") {
  mc::RngStream rng(2024, 0);
  for (int trial = 0; trial < 25; ++trial) {
    ModelParams mp;
    mp.mu0 = 0.005 + 0.08 * rng.next_uniform();
    mp.sigma0 = 0.1 + 0.4 * rng.next_uniform();
    mp.gamma = 0.05 + 0.9 * rng.next_uniform();
    mp.horizon = 0.5 + 2.0 * rng.next_uniform();
    mp.p = 0.1 + 0.8 * rng.next_uniform();
    mp.delta = 0.7 * rng.next_uniform();
    mp.lambda = 0.05 + 0.6 * rng.next_uniform();
    mp.x0 = 0.5 + 2.0 * rng.next_uniform();
    Model m{mp};
    const double theta = mp.horizon * (0.1 + 0.8 * rng.next_uniform());
    const double barrier = mp.lambda * theta;

    // positive drift keeps the floor slack, so the solve has a closed form
    ValueSolution sol = solve_insider(m, barrier);
    const double nu = m.merton_fraction();
    const double rate = mp.p * (nu * mp.mu0 - 0.5 * (1.0 - mp.p) * nu * nu * mp.sigma0 * mp.sigma0);
    const double expect = after_default::value_multiplier(m, theta) *
                          std::pow(1.0 + mp.delta * mp.gamma, mp.p) * std::exp(rate * theta);
    CHECK(sol.y0() == doctest::Approx(expect).epsilon(1e-7));
    CHECK(after_default::value_multiplier(m, theta) >= 1.0);

    // no admissible constant policy beats the solve
    const double vopt = sol.value0(m);
    for (double frac : {0.0, 0.5, 1.0}) {
      const double cand = -mp.delta + frac * (0.9 / mp.gamma + mp.delta);
      const double ev =
          evaluate_policy(m, Policy::constant(cand, mp.horizon), Weighting::insider(barrier));
      CHECK(ev <= vopt * (1.0 + 1e-9) + 1e-9);
    }

    // initial value scales like x0^p
    ModelParams mp2 = mp;
    mp2.x0 = 2.0 * mp.x0;
    const double v2 = solve_insider(Model{mp2}, barrier).value0(Model{mp2});
    CHECK(v2 == doctest::Approx(std::pow(2.0, mp.p) * vopt).epsilon(1e-9));
  }
}

TEST_CASE("gamma monotonicity of the ex-ante value at a small floor") {
  double prev = 0.0;
  for (double g : {0.1, 0.3, 0.5}) {
    ModelParams mp;
    mp.lambda = 0.1;
    mp.gamma = g;
    mp.delta = 0.1;
    const double v = insider_ex_ante(Model{mp}).value;
    CHECK(v >= prev);
    prev = v;
  }
}

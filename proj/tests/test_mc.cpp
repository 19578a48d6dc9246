#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "defport/mc/kernels.hpp"
#include "defport/mc/oracle.hpp"
#include "defport/mc/rng.hpp"

using namespace defport;

TEST_CASE("counter generator: uniform range and random access") {
  mc::RngStream a(123, 0), b(123, 0), c(124, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.next_uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  // same key replays, different seed diverges
  a = mc::RngStream(123, 0);
  bool all_same = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const double u1 = a.next_uniform();
    all_same = all_same && u1 == b.next_uniform();
    any_diff = any_diff || u1 != c.next_uniform();
  }
  CHECK(all_same);
  CHECK(any_diff);
}

TEST_CASE("shared math matches libm closely") {
  using B = mc::ScalarBatch;
  for (double x : {-20.0, -3.1, -0.4, 0.0, 0.7, 2.0, 15.0, 300.0})
    CHECK(mc::exp_b<B>({x}).v == doctest::Approx(std::exp(x)).epsilon(1e-13));
  for (double x : {1e-12, 0.3, 0.9999, 1.0, 1.5, 7.0, 1e9})
    CHECK(mc::log_b<B>({x}).v == doctest::Approx(std::log(x)).epsilon(1e-13));
  // quantile function: spot values and round trip through the normal CDF
  CHECK(mc::norm_inv<B>({0.5}).v == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(mc::norm_inv<B>({0.975}).v == doctest::Approx(1.959963985).epsilon(1e-7));
  for (double u : {1e-10, 0.001, 0.1, 0.5, 0.9, 0.999, 1.0 - 1e-10}) {
    const double z = mc::norm_inv<B>({u}).v;
    const double back = 0.5 * std::erfc(-z / std::sqrt(2.0));
    CHECK(back == doctest::Approx(u).epsilon(1e-6));
  }
}

TEST_CASE("single-path simulation: jump arithmetic") {
  Model m;  // gamma 0.2
  Policy unit = Policy::constant(1.0, 1.0);

  // flat-through policy (no position even after default) pins the wealth
  Policy flat = Policy::constant(0.0, 1.0);
  flat.post = PostDefaultRule::constant(0.0);
  for (std::uint64_t i = 0; i < 20; ++i) {
    mc::PathSample ps = mc::simulate_wealth(m, flat, 0.5, 99, i);
    CHECK(ps.terminal_wealth == doctest::Approx(1.0));
    CHECK(ps.utility == doctest::Approx(1.25));
  }

  // against a zero-loss twin, the only difference is the jump factor 0.8
  ModelParams tiny = m.params();
  tiny.gamma = 1e-300;
  Model m_noloss{tiny};
  Policy liquidate = unit;
  liquidate.post = PostDefaultRule::constant(0.0);
  mc::PathSample with_loss = mc::simulate_wealth(m, liquidate, 0.5, 7, 3);
  mc::PathSample no_loss = mc::simulate_wealth(m_noloss, liquidate, 0.5, 7, 3);
  CHECK(with_loss.terminal_wealth / no_loss.terminal_wealth == doctest::Approx(0.8));
  REQUIRE(with_loss.default_time.has_value());
  CHECK(*with_loss.default_time == doctest::Approx(0.5));

  // surviving scenario carries no default time
  CHECK(!mc::simulate_wealth(m, unit, std::nullopt, 7, 0).default_time.has_value());
}

TEST_CASE("estimator agrees with closed forms") {
  Model m;
  // growth-optimal fraction, surviving barrier: lognormal moment of the
  // terminal utility
  Policy pol = Policy::constant(3.75, 1.0);
  mc::McEstimate est = mc::estimate_value(m, pol, Weighting::insider(0.6), 100000, 11);
  CHECK(std::abs(est.mean - std::exp(0.045) * 1.25) < 3.0 * est.stderr_);

  // flat policy under the progressive weighting: closed form from the
  // survival atom plus the default integral
  const double cf = evaluate_policy(m, Policy::constant(0.0, 1.0), Weighting::investor());
  mc::McEstimate est0 = mc::estimate_value(m, Policy::constant(0.0, 1.0),
                                           Weighting::investor(), 100000, 12);
  CHECK(std::abs(est0.mean - cf) < 3.0 * est0.stderr_ + 1e-12);
}

TEST_CASE("stderr scales like the square root of the sample count") {
  Model m;
  Policy pol = Policy::constant(3.75, 1.0);
  auto e1 = mc::estimate_value(m, pol, Weighting::investor(), 50000, 5);
  auto e4 = mc::estimate_value(m, pol, Weighting::investor(), 200000, 5);
  CHECK(e4.stderr_ / e1.stderr_ > 0.4);
  CHECK(e4.stderr_ / e1.stderr_ < 0.6);
}

TEST_CASE("estimates are byte-stable and thread-count invariant") {
  Model m;
  Policy pol = Policy::constant(2.0, 1.0);
  pol.at_default = -0.5;
  auto e1 = mc::estimate_value(m, pol, Weighting::investor(), 30000, 77, {1});
  auto e2 = mc::estimate_value(m, pol, Weighting::investor(), 30000, 77, {4});
  CHECK(std::memcmp(&e1.mean, &e2.mean, sizeof(double)) == 0);
  CHECK(std::memcmp(&e1.stderr_, &e2.stderr_, sizeof(double)) == 0);
}

TEST_CASE("simd and scalar kernels produce identical bytes") {
  const mc::KernelSet* simd = mc::avx2_kernels();
  if (!simd) return;  // scalar-only host

  mc::ScheduleKernelParams kp;
  kp.key = mc::stream_key(5, 1);
  kp.p = 0.8;
  kp.lx0 = 0.0;
  kp.jump_lx = std::log(1.1);
  kp.drift = {0.02, -0.01};
  kp.vol = {0.1, 0.3};
  for (std::uint64_t n : {1ull, 3ull, 4ull, 17ull, 4096ull}) {
    std::vector<double> w1(n), u1(n), w2(n), u2(n);
    mc::scalar_kernels()->schedule(kp, 123, n, w1.data(), u1.data());
    simd->schedule(kp, 123, n, w2.data(), u2.data());
    CHECK(std::memcmp(w1.data(), w2.data(), n * 8) == 0);
    CHECK(std::memcmp(u1.data(), u2.data(), n * 8) == 0);
  }
}

TEST_CASE("simd and scalar agree on the default-branch kernel, all features") {
  const mc::KernelSet* simd = mc::avx2_kernels();
  if (!simd) return;

  // table profile and a constant post-default fraction exercise the masked
  // interpolation and the non-optimal post branch
  mc::DefaultBranchKernelParams db;
  db.key = mc::stream_key(9, 2);
  db.p = 0.8;
  db.lambda = 0.4;
  db.horizon = 1.0;
  db.trunc_mass = 1.0 - std::exp(-0.4);
  db.gamma = 0.3;
  db.one_minus_p = 0.2;
  db.seg_start = {0.0, 0.25, 0.7};
  db.seg_len = {0.25, 0.45, 0.3};
  db.seg_nu = {1.5, -0.2, 0.8};
  for (std::size_t s = 0; s < 3; ++s) {
    db.seg_rate.push_back(db.seg_nu[s] * 0.03 - 0.5 * db.seg_nu[s] * db.seg_nu[s] * 0.04);
    db.seg_vol.push_back(db.seg_nu[s] * 0.2);
  }
  db.profile_linear = false;
  db.tab_theta = {0.0, 0.5, 1.0};
  db.tab_mu = {0.0, 0.02, 0.03};
  db.tab_sg = {0.4, 0.25, 0.2};
  db.post_optimal = false;
  db.post_nu = 0.6;
  db.has_override = true;
  db.override_nu = -0.1;
  for (std::uint64_t n : {7ull, 256ull, 1000ull}) {
    std::vector<double> w1(n), u1(n), w2(n), u2(n);
    mc::scalar_kernels()->default_branch(db, 5, n, w1.data(), u1.data());
    simd->default_branch(db, 5, n, w2.data(), u2.data());
    CHECK(std::memcmp(w1.data(), w2.data(), n * 8) == 0);
    CHECK(std::memcmp(u1.data(), u2.data(), n * 8) == 0);
  }
}

TEST_CASE("shared math: dense randomized comparison against libm") {
  using B = mc::ScalarBatch;
  mc::RngStream rng(31337, 0);
  double worst_exp = 0.0, worst_log = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double x = -40.0 + 80.0 * rng.next_uniform();
    worst_exp = std::max(worst_exp,
                         std::abs(mc::exp_b<B>({x}).v / std::exp(x) - 1.0));
    const double y = std::exp(-30.0 + 60.0 * rng.next_uniform());
    worst_log = std::max(worst_log, std::abs(mc::log_b<B>({y}).v - std::log(y)));
  }
  CHECK(worst_exp < 5e-15);
  CHECK(worst_log < 5e-14);
}

TEST_CASE("immediate default scenario") {
  Model m;  // delta 0.5, gamma 0.2
  Policy pol = Policy::constant(1.0, 1.0);
  pol.at_default = -0.5;
  // closed form: jump (1 + delta*gamma), then the optimal post-default value
  const double cf = evaluate_policy(m, pol, Weighting::insider(0.0));
  CHECK(cf == doctest::Approx(std::pow(1.1, 0.8) * 1.25));  // K(0) = 1
  mc::McEstimate est = mc::estimate_value(m, pol, Weighting::insider(0.0), 50000, 31);
  CHECK(std::abs(est.mean - cf) < 3.0 * est.stderr_ + 1e-12);
}

TEST_CASE("estimator handles table profiles") {
  ModelParams mp;
  Model m{mp, AfterDefaultProfile::from_table(
                  {{0.0, 0.0, 0.4}, {0.5, 0.02, 0.3}, {1.0, 0.03, 0.2}})};
  Policy pol = Policy::constant(1.0, 1.0);
  const double cf = evaluate_policy(m, pol, Weighting::investor());
  mc::McEstimate est = mc::estimate_value(m, pol, Weighting::investor(), 100000, 21);
  CHECK(std::abs(est.mean - cf) < 3.0 * est.stderr_);
}

TEST_CASE("forced-short experiment") {
  Model m;  // lambda 0.3, gamma 0.2
  // no position: wealth pinned at the initial level
  auto rows = mc::unbounded_experiment(m, {0.0, 1.0}, 0.075, 0.05, 20000, 3);
  CHECK(rows[0].mean_wealth == doctest::Approx(1.0));
  CHECK(rows[0].wealth_stderr == doctest::Approx(0.0));

  // vanishing window: the jump factor is all that remains
  auto tightrows = mc::unbounded_experiment(m, {125.0}, 0.075, 1e-12, 2000, 3);
  CHECK(tightrows[0].mean_wealth == doctest::Approx(1.0 + 0.2 * 125.0).epsilon(1e-4));
  CHECK(tightrows[0].mean_utility ==
        doctest::Approx(std::pow(26.0, 0.8) / 0.8).epsilon(1e-4));

  CHECK_THROWS_AS(mc::unbounded_experiment(m, {1.0}, 0.6, 0.05, 1000, 3),
                  std::invalid_argument);  // barrier beyond the horizon
}

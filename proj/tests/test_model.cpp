#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "defport/model.hpp"

using namespace defport;

TEST_CASE("reference configuration validates") {
  ModelParams mp;  // gamma 0.2, p 0.8, sigma0 0.2 ...
  CHECK(Model::validate(mp, AfterDefaultProfile::linear()).empty());
}

TEST_CASE("violations are reported per field with the offending value") {
  ModelParams mp;
  mp.gamma = 1.0;
  auto errs = Model::validate(mp, AfterDefaultProfile::linear());
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("gamma must lie in (0,1)") != std::string::npos);
  CHECK(errs[0].find("1") != std::string::npos);

  mp.sigma0 = 0.0;
  errs = Model::validate(mp, AfterDefaultProfile::linear());
  REQUIRE(errs.size() == 2);
  CHECK(errs[1].find("sigma0 must be positive") != std::string::npos);

  CHECK_THROWS_AS(Model{mp}, std::invalid_argument);
}

TEST_CASE("table profiles are validated") {
  ModelParams mp;
  auto bad_sigma = AfterDefaultProfile::from_table({{0.0, 0.0, 0.3}, {1.0, 0.02, 0.0}});
  auto errs = Model::validate(mp, bad_sigma);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("sigma1 must be positive") != std::string::npos);

  auto short_table = AfterDefaultProfile::from_table({{0.0, 0.0, 0.3}});
  CHECK(!Model::validate(mp, short_table).empty());

  auto hole = AfterDefaultProfile::from_table({{0.2, 0.0, 0.3}, {1.0, 0.01, 0.4}});
  CHECK(!Model::validate(mp, hole).empty());
}

TEST_CASE("default time map") {
  CHECK(default_time(0.3, 0.3) == doctest::Approx(1.0));
  CHECK(default_time(0.0, 0.3) == 0.0);
  CHECK(default_time(0.15, 0.3) == doctest::Approx(0.5));
  CHECK_THROWS_AS(default_time(0.3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(default_time(0.3, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(default_time(-0.1, 0.3), std::invalid_argument);
  // strictly increasing in the barrier, strictly decreasing in the intensity
  for (int i = 1; i < 40; ++i) {
    const double l = 0.05 * i;
    CHECK(default_time(l + 1e-3, 0.3) > default_time(l, 0.3));
    CHECK(default_time(l, 0.3 + 1e-3) < default_time(l, 0.3));
  }
}

TEST_CASE("after-default coefficients, linear profile") {
  Model m;  // mu0 0.03, sigma0 0.2, T 1
  Coeffs c0 = m.after_default_coeffs(0.0);
  CHECK(c0.mu1 == doctest::Approx(0.0));
  CHECK(c0.sigma1 == doctest::Approx(0.4));
  Coeffs cT = m.after_default_coeffs(1.0);
  CHECK(cT.mu1 == doctest::Approx(0.03));
  CHECK(cT.sigma1 == doctest::Approx(0.2));
  Coeffs ch = m.after_default_coeffs(0.5);
  CHECK(ch.mu1 == doctest::Approx(0.015));
  CHECK(ch.sigma1 == doctest::Approx(0.3));
  CHECK_THROWS_AS(m.after_default_coeffs(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(m.after_default_coeffs(1.01), std::invalid_argument);
}

TEST_CASE("after-default coefficients, table profile") {
  ModelParams mp;
  Model m{mp, AfterDefaultProfile::from_table({{0.0, 0.0, 0.4}, {0.5, 0.02, 0.3}, {1.0, 0.02, 0.2}})};
  Coeffs c = m.after_default_coeffs(0.25);
  CHECK(c.mu1 == doctest::Approx(0.01));
  CHECK(c.sigma1 == doctest::Approx(0.35));
  CHECK(m.after_default_coeffs(1.0).sigma1 == doctest::Approx(0.2));
}

TEST_CASE("barrier sampling follows the unit exponential") {
  BarrierLaw law;
  // the quantile map pins the sampler's convention
  CHECK(law.quantile_from_uniform(0.5) == doctest::Approx(0.6931471805599453));
  CHECK(law.quantile_from_uniform(1.0 - 1e-12) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(law.density(1.0) == doctest::Approx(std::exp(-1.0)));

  mc::RngStream rng(7, 1);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double l = sample_barrier(law, rng);
    CHECK(l > 0.0);
    sum += l;
  }
  CHECK(std::abs(sum / n - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("merton fraction") {
  Model m;
  CHECK(m.merton_fraction() == doctest::Approx(3.75));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "defport/after_default.hpp"

using namespace defport;
namespace ad = defport::after_default;

TEST_CASE("value multiplier closed form") {
  Model m;  // mu0 .03 sigma0 .2 p .8 T 1
  CHECK(ad::value_multiplier(m, 1.0) == doctest::Approx(1.0));  // zero horizon
  CHECK(ad::value_multiplier(m, 0.0) == doctest::Approx(1.0));  // zero drift
  // mid-horizon: exp(0.5 * 4 * (0.015/0.3)^2 * 0.5) = exp(0.0025)
  CHECK(ad::value_multiplier(m, 0.5) == doctest::Approx(std::exp(0.0025)).epsilon(1e-12));
  CHECK(ad::value_multiplier(m, 0.5) == doctest::Approx(1.0025031276058).epsilon(1e-10));
}

TEST_CASE("post-default value") {
  Model m;
  CHECK(ad::insider_value(m, 1.0, 1.0) == doctest::Approx(1.25));  // U(1) = 1/p
  CHECK(ad::insider_value(m, 0.5, 1.0) == doctest::Approx(1.25 * std::exp(0.0025)));
  // degree-p homogeneity
  for (double c : {0.3, 2.0, 11.0})
    CHECK(ad::insider_value(m, 0.7, c * 1.0) ==
          doctest::Approx(std::pow(c, 0.8) * ad::insider_value(m, 0.7, 1.0)));
  CHECK_THROWS_AS(ad::insider_value(m, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ad::insider_value(m, 0.5, -1.0), std::invalid_argument);
}

TEST_CASE("progressive multiplier and the exact ratio") {
  Model m;  // lambda 0.3
  CHECK(ad::investor_multiplier(m, 0.0) == doctest::Approx(0.3));
  CHECK(ad::investor_multiplier(m, 1.0) == doctest::Approx(0.3 * std::exp(-0.3)));
  for (int i = 0; i <= 20; ++i) {
    const double th = i / 20.0;
    const double ratio = ad::investor_multiplier(m, th) / ad::value_multiplier(m, th);
    CHECK(ratio == doctest::Approx(0.3 * std::exp(-0.3 * th)).epsilon(1e-13));
  }
}

TEST_CASE("ratio ignores preferences and the profile") {
  ModelParams mp;
  mp.p = 0.2;
  Model low_p{mp};
  Model table{ModelParams{}, AfterDefaultProfile::from_table(
                                 {{0.0, 0.01, 0.6}, {1.0, 0.02, 0.1}})};
  for (const Model* m : {&low_p, &table})
    for (int i = 0; i <= 8; ++i) {
      const double th = i / 8.0;
      CHECK(ad::investor_multiplier(*m, th) / ad::value_multiplier(*m, th) ==
            doctest::Approx(0.3 * std::exp(-0.3 * th)).epsilon(1e-13));
    }
}

TEST_CASE("post-default growth-optimal fraction") {
  Model m;
  CHECK(ad::merton_fraction(m, 0.0) == doctest::Approx(0.0));
  CHECK(ad::merton_fraction(m, 1.0) == doctest::Approx(3.75));  // 0.03 / (0.2 * 0.04)
  // diverges toward risk neutrality
  ModelParams mp;
  mp.p = 0.999;
  CHECK(ad::merton_fraction(Model{mp}, 1.0) > 100.0);
}

TEST_CASE("remaining multiplier propagates to one at the horizon") {
  Model m;
  CHECK(ad::remaining_multiplier(m, 0.5, 1.0) == doctest::Approx(1.0));
  CHECK(ad::remaining_multiplier(m, 0.5, 0.5) == doctest::Approx(ad::value_multiplier(m, 0.5)));
  CHECK_THROWS_AS(ad::remaining_multiplier(m, 0.5, 0.4), std::invalid_argument);
}

#pragma once
// Running per-agent value along one realized scenario: all three agents see
// the same Brownian path and the same default time, each follows its own
// strategy.  At a default inside the horizon the curve carries two rows at
// tau: the last pre-jump state and the first post-jump state.

#include <cstdint>
#include <vector>

#include "defport/before_default.hpp"
#include "defport/model.hpp"

namespace defport {

struct Scenario {
  double barrier = 0.15;  // default at barrier / lambda (may exceed T)
  std::uint64_t seed = 42;
};

struct CurvePoint {
  double t;
  double insider;
  double investor;
  double merton;
  bool defaulted;
};

struct CurveOptions {
  int points = 400;  // uniform grid intervals on [0, T]
  int solver_steps = 2000;
  std::optional<double> investor_floor;
  bool cap_pre_default = false;
};

struct ValueCurve {
  std::vector<CurvePoint> points;
  bool has_default = false;
  double default_time = 0.0;
  // fraction each agent holds at the default instant (when it happens)
  double insider_at_default = 0.0;
  double investor_at_default = 0.0;
  double merton_at_default = 0.0;
};

ValueCurve compute_value_curve(const Model& m, const Scenario& sc, const CurveOptions& opt = {});

// Wealth trajectory of the progressively informed agent on the scenario,
// same path construction as the value curve.
struct WealthPath {
  std::vector<double> t;
  std::vector<double> wealth;
  bool has_default = false;
  double default_time = 0.0;
};

WealthPath investor_wealth_path(const Model& m, const Scenario& sc, const CurveOptions& opt = {});

}  // namespace defport

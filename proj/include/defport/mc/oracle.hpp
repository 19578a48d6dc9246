#pragma once
// Brute-force Monte Carlo evaluation of piecewise-constant policies under the
// default model.  Log-wealth increments are exact per constant-coefficient
// segment, so the simulation is unbiased in distribution; agreement with the
// closed-form evaluators is a statistical statement only.

#include <cstdint>
#include <optional>
#include <vector>

#include "defport/before_default.hpp"
#include "defport/model.hpp"

namespace defport::mc {

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

struct ExecOptions {
  int threads = 0;  // 0 = hardware concurrency
};

struct PathSample {
  std::optional<double> default_time;
  double terminal_wealth = 0.0;
  double utility = 0.0;
};

// One path of the wealth process under a fixed default scenario
// (theta empty = the counterparty survives the horizon).
PathSample simulate_wealth(const Model& m, const Policy& policy, std::optional<double> theta,
                           std::uint64_t seed, std::uint64_t path_index = 0);

// Consistent estimator of evaluate_policy under the same weighting.  The
// investor weighting handles the survival atom analytically and samples only
// the default-before-horizon branch.
McEstimate estimate_value(const Model& m, const Policy& policy, const Weighting& w,
                          std::uint64_t n, std::uint64_t seed, const ExecOptions& = {});

// Forced-short experiment: short psi units of exposure on the window between
// the earlier barrier (1 - eta_fraction) * l and the true barrier l, liquidate
// after the default.  Demonstrates that the attainable utility grows without
// bound as psi increases when no floor is imposed.
struct UnboundedRow {
  double psi;
  double mean_wealth;
  double wealth_stderr;
  double mean_utility;
  double utility_stderr;
};

std::vector<UnboundedRow> unbounded_experiment(const Model& m, const std::vector<double>& psis,
                                               double barrier, double eta_fraction,
                                               std::uint64_t n, std::uint64_t seed,
                                               const ExecOptions& = {});

}  // namespace defport::mc

#pragma once
// Cross-verification suite: closed forms against the Monte Carlo oracle,
// dominance and monotonicity properties, determinism, and the kernel
// equivalence tests.  Used by both the acceptance binary and the CLI
// `verify` command.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace defport::verify {

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

struct Criterion {
  std::string name;
  bool pass = true;
  double seconds = 0.0;
  std::vector<Check> checks;
};

struct Options {
  std::uint64_t n = 100000;       // Monte Carlo sample count
  std::uint64_t seed = 20240801;  // suite seed
  int threads = 0;
};

// The nine acceptance criteria, in order.
std::vector<Criterion> acceptance(const Options& opt = {});

// Acceptance plus the per-module invariant checks.
std::vector<Criterion> full_suite(const Options& opt = {});

// One line per criterion, indented detail for failures; returns the number
// of failed criteria.
int report(const std::vector<Criterion>& results, std::ostream& os, bool verbose = false);

}  // namespace defport::verify

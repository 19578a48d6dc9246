// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Sample counts and seeds are fixed so the run is reproducible.

#include <iostream>

#include "defport/verify.hpp"

int main() {
  defport::verify::Options opt;  // n = 1e5, fixed seed
  auto results = defport::verify::acceptance(opt);
  const int failed = defport::verify::report(results, std::cout, /*verbose=*/false);
  double total = 0.0;
  for (const auto& c : results) total += c.seconds;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed in "
            << total << " s\n";
  return failed == 0 ? 0 : 1;
}

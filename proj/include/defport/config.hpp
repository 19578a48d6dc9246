#pragma once
// Flat key-value configuration (JSON file plus command-line overrides) and
// the per-run manifest.

#include <map>
#include <optional>
#include <string>

#include "defport/model.hpp"

namespace defport::config {

struct Resolved {
  ModelParams params;
  AfterDefaultProfile profile;
  std::map<std::string, std::string> raw;  // resolved flat keys, for the manifest
};

// Keys: mu0, sigma0, gamma, T, p, delta, lambda, x0, profile.kind
// (values "linear" or "table"), profile.table (array of [theta, mu1, sigma1]).
Resolved load(const std::optional<std::string>& config_path,
              const std::map<std::string, std::string>& overrides);

Model make_model(const Resolved& r);  // throws with every violated bound named

std::string manifest_json(const std::string& command, const Resolved& r, std::uint64_t seed,
                          std::uint64_t n, const std::string& out_dir,
                          const std::vector<std::string>& files);

extern const char* kToolVersion;

}  // namespace defport::config

#include "defport/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "defport/csv.hpp"

namespace defport::config {

const char* kToolVersion = "1.0.0";

namespace {

using nlohmann::json;

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not a number: " + v);
  }
}

void apply(Resolved& r, const std::string& key, const std::string& value) {
  r.raw[key] = value;
  if (key == "mu0") r.params.mu0 = parse_double(key, value);
  else if (key == "sigma0") r.params.sigma0 = parse_double(key, value);
  else if (key == "gamma") r.params.gamma = parse_double(key, value);
  else if (key == "T") r.params.horizon = parse_double(key, value);
  else if (key == "p") r.params.p = parse_double(key, value);
  else if (key == "delta") r.params.delta = parse_double(key, value);
  else if (key == "lambda") r.params.lambda = parse_double(key, value);
  else if (key == "x0") r.params.x0 = parse_double(key, value);
  else if (key == "profile.kind") {
    if (value == "linear") r.profile.kind = AfterDefaultProfile::Kind::Linear;
    else if (value == "table") r.profile.kind = AfterDefaultProfile::Kind::Table;
    else throw std::invalid_argument("profile.kind must be \"linear\" or \"table\", got " + value);
  } else if (key == "profile.table") {
    json arr = json::parse(value);
    r.profile.table.clear();
    for (const auto& row : arr) {
      if (!row.is_array() || row.size() != 3)
        throw std::invalid_argument("profile.table rows must be [theta, mu1, sigma1]");
      r.profile.table.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

std::string to_flat_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

Resolved load(const std::optional<std::string>& config_path,
              const std::map<std::string, std::string>& overrides) {
  Resolved r;
  if (config_path) {
    std::ifstream f(*config_path);
    if (!f) throw std::runtime_error("cannot open config file: " + *config_path);
    json doc = json::parse(f);
    if (!doc.is_object()) throw std::invalid_argument("config must be a flat JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) apply(r, it.key(), to_flat_string(it.value()));
  }
  for (const auto& [k, v] : overrides) apply(r, k, v);
  return r;
}

Model make_model(const Resolved& r) { return Model(r.params, r.profile); }

std::string manifest_json(const std::string& command, const Resolved& r, std::uint64_t seed,
                          std::uint64_t n, const std::string& out_dir,
                          const std::vector<std::string>& files) {
  json doc;
  doc["tool"] = "defport";
  doc["version"] = kToolVersion;
  doc["command"] = command;
  doc["seed"] = seed;
  doc["samples"] = n;
  doc["out_dir"] = out_dir;
  json model;
  model["mu0"] = r.params.mu0;
  model["sigma0"] = r.params.sigma0;
  model["gamma"] = r.params.gamma;
  model["T"] = r.params.horizon;
  model["p"] = r.params.p;
  model["delta"] = r.params.delta;
  model["lambda"] = r.params.lambda;
  model["x0"] = r.params.x0;
  model["profile.kind"] =
      r.profile.kind == AfterDefaultProfile::Kind::Linear ? "linear" : "table";
  doc["model"] = model;
  doc["overrides"] = r.raw;
  doc["files"] = files;
  return doc.dump(2) + "\n";
}

}  // namespace defport::config

#include "defport/model.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace defport {

namespace {

std::string with_value(const char* msg, double v) {
  std::ostringstream os;
  os << msg << ": got " << v;
  return os.str();
}

}  // namespace

double sample_barrier(const BarrierLaw& law, mc::RngStream& rng) {
  return law.quantile_from_uniform(rng.next_uniform());
}

double default_time(double barrier, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument(with_value("lambda must be positive", lambda));
  if (!(barrier >= 0.0)) throw std::invalid_argument(with_value("barrier must be nonnegative", barrier));
  return barrier / lambda;
}

double crra_utility(double x, double p) {
  if (!(x > 0.0)) throw std::invalid_argument(with_value("wealth must be positive", x));
  return std::pow(x, p) / p;
}

std::vector<std::string> Model::validate(const ModelParams& mp, const AfterDefaultProfile& pr) {
  std::vector<std::string> errs;
  if (!(mp.gamma > 0.0 && mp.gamma < 1.0)) errs.push_back(with_value("gamma must lie in (0,1)", mp.gamma));
  if (!(mp.p > 0.0 && mp.p < 1.0)) errs.push_back(with_value("p must lie in (0,1)", mp.p));
  if (!(mp.sigma0 > 0.0)) errs.push_back(with_value("sigma0 must be positive", mp.sigma0));
  if (!(mp.horizon > 0.0)) errs.push_back(with_value("T must be positive", mp.horizon));
  if (!(mp.lambda > 0.0)) errs.push_back(with_value("lambda must be positive", mp.lambda));
  if (!(mp.x0 > 0.0)) errs.push_back(with_value("x0 must be positive", mp.x0));
  if (!(mp.delta >= 0.0)) errs.push_back(with_value("delta must be nonnegative", mp.delta));

  if (pr.kind == AfterDefaultProfile::Kind::Table) {
    if (pr.table.size() < 2) {
      errs.push_back("profile table needs at least two nodes");
    } else {
      for (std::size_t i = 0; i < pr.table.size(); ++i) {
        if (!(pr.table[i].sigma1 > 0.0))
          errs.push_back(with_value("sigma1 must be positive at every table node", pr.table[i].sigma1));
        if (i > 0 && !(pr.table[i].theta > pr.table[i - 1].theta))
          errs.push_back(with_value("profile table thetas must be strictly increasing", pr.table[i].theta));
      }
      if (mp.horizon > 0.0 &&
          (pr.table.front().theta > 0.0 || pr.table.back().theta < mp.horizon))
        errs.push_back("profile table must cover [0, T]");
    }
  }
  return errs;
}

Model::Model(ModelParams params, AfterDefaultProfile profile)
    : params_(params), profile_(std::move(profile)) {
  auto errs = validate(params_, profile_);
  if (!errs.empty()) {
    std::string joined;
    for (const auto& e : errs) {
      if (!joined.empty()) joined += "; ";
      joined += e;
    }
    throw std::invalid_argument(joined);
  }
}

Coeffs Model::after_default_coeffs(double theta) const {
  const double T = params_.horizon;
  if (!(theta >= 0.0 && theta <= T))
    throw std::invalid_argument("theta must lie in [0, T]");
  if (profile_.kind == AfterDefaultProfile::Kind::Linear) {
    return {params_.mu0 * theta / T, params_.sigma0 * (2.0 - theta / T)};
  }
  const auto& tab = profile_.table;
  if (theta <= tab.front().theta) return {tab.front().mu1, tab.front().sigma1};
  if (theta >= tab.back().theta) return {tab.back().mu1, tab.back().sigma1};
  auto it = std::upper_bound(tab.begin(), tab.end(), theta,
                             [](double t, const ProfilePoint& q) { return t < q.theta; });
  const ProfilePoint& hi = *it;
  const ProfilePoint& lo = *(it - 1);
  const double w = (theta - lo.theta) / (hi.theta - lo.theta);
  return {lo.mu1 + w * (hi.mu1 - lo.mu1), lo.sigma1 + w * (hi.sigma1 - lo.sigma1)};
}

double Model::default_time(double barrier) const {
  return defport::default_time(barrier, params_.lambda);
}

double Model::merton_fraction() const {
  return params_.mu0 / ((1.0 - params_.p) * params_.sigma0 * params_.sigma0);
}

}  // namespace defport

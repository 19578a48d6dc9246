// defport: optimal investment under counterparty default risk, for an agent
// who knows the default barrier, a progressively informed agent, and a naive
// growth-optimal agent.
//
//   defport <command> [--config FILE] [--out DIR] [--seed U64] [--n U64]
//           [--mu0 V] [--sigma0 V] [--gamma V] [--T V] [--p V] [--delta V]
//           [--lambda V] [--x0 V] [--profile.kind linear|table] ...
//
// Commands: figure1 figure2 figure3 figure4 sweep verify unbounded

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "defport/before_default.hpp"
#include "defport/config.hpp"
#include "defport/csv.hpp"
#include "defport/mc/oracle.hpp"
#include "defport/svg.hpp"
#include "defport/value_curve.hpp"
#include "defport/verify.hpp"

namespace {

using namespace defport;
namespace fs = std::filesystem;

struct CommonArgs {
  std::optional<std::string> config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  std::uint64_t n = 100000;
  bool svg = true;
  std::map<std::string, std::string> overrides;
};

struct RunContext {
  CommonArgs args;
  config::Resolved resolved;
  Model model;
  std::vector<std::string> files;

  explicit RunContext(const CommonArgs& a)
      : args(a), resolved(config::load(a.config_path, a.overrides)), model(config::make_model(resolved)) {
    fs::create_directories(args.out_dir);
  }

  std::string path(const std::string& name) { return (fs::path(args.out_dir) / name).string(); }

  void write_csv(const std::string& name, const csv::Table& t) {
    csv::write_file(path(name), t);
    files.push_back(name);
  }

  void write_plot(const std::string& name, const csv::Table& t, const svg::LinePlot& spec) {
    if (!args.svg) return;
    svg::write_file(path(name), t, spec);
    files.push_back(name);
  }

  void finish(const std::string& command) {
    const std::string manifest =
        config::manifest_json(command, resolved, args.seed, args.n, args.out_dir, files);
    std::ofstream f(path("manifest.json"), std::ios::binary);
    f << manifest;
    std::cout << "wrote " << files.size() << " file(s) + manifest to " << args.out_dir << "\n";
  }
};

csv::Table curve_table(const ValueCurve& vc) {
  csv::Table t;
  t.header = {"t", "insider_value", "investor_value", "merton_value", "default_indicator"};
  for (const auto& cp : vc.points)
    t.rows.push_back({cp.t, cp.insider, cp.investor, cp.merton, cp.defaulted ? 1.0 : 0.0});
  return t;
}

svg::LinePlot curve_plot(const std::string& title) {
  return {title, "t", {"insider", "investor", "merton"}};
}

void emit_curve(RunContext& ctx, const std::string& stem, const Model& m, double barrier,
                const CurveOptions& copt, const std::string& title) {
  Scenario sc{barrier, ctx.args.seed};
  ValueCurve vc = compute_value_curve(m, sc, copt);
  csv::Table t = curve_table(vc);
  ctx.write_csv(stem + ".csv", t);
  ctx.write_plot(stem + ".svg", t, curve_plot(title));
}

int cmd_figure1(RunContext& ctx, double barrier, std::optional<double> theta) {
  // reference regime: lambda 0.3, gamma 0.2, delta 0.5.  The scenario is a
  // barrier level; --theta pins the default time under the resolved intensity.
  if (theta) barrier = ctx.model.params().lambda * *theta;
  emit_curve(ctx, "figure1_curve", ctx.model, barrier, {},
             "value along one default scenario");
  ctx.finish("figure1");
  return 0;
}

int cmd_figure2(RunContext& ctx, double theta) {
  for (double lam : {0.1, 0.3}) {
    csv::Table sweep;
    sweep.header = {"param", "insider", "investor", "merton"};
    for (double g : {0.1, 0.3, 0.5}) {
      ModelParams mp = ctx.resolved.params;
      mp.lambda = lam;
      mp.gamma = g;
      mp.delta = 0.1;
      Model m{mp, ctx.resolved.profile};
      sweep.rows.push_back({g, insider_ex_ante(m).value, solve_investor(m).value0(m),
                            merton_value(m)});
      std::ostringstream stem;
      stem << "figure2_curve_lambda" << lam << "_gamma" << g;
      emit_curve(ctx, stem.str(), m, lam * theta, {}, "loss-fraction sweep scenario");
    }
    const std::string name = lam == 0.1 ? "figure2_lambda0.1" : "figure2_lambda0.3";
    ctx.write_csv(name + ".csv", sweep);
    ctx.write_plot(name + ".svg", sweep,
                   {"initial values vs loss fraction", "gamma", {"insider", "investor", "merton"}});
  }
  ctx.finish("figure2");
  return 0;
}

int cmd_figure3(RunContext& ctx, double theta) {
  ModelParams mp = ctx.resolved.params;
  mp.lambda = 0.5;
  mp.gamma = 0.5;
  mp.delta = 0.1;
  Model m{mp, ctx.resolved.profile};
  emit_curve(ctx, "figure3_curve", m, mp.lambda * theta, {}, "extreme default/loss scenario");

  // one trajectory where the counterparty survives the horizon
  Scenario surv{mp.lambda * (mp.horizon + 1.0), ctx.args.seed};
  WealthPath wp = investor_wealth_path(m, surv);
  csv::Table t;
  t.header = {"t", "investor_wealth"};
  for (std::size_t i = 0; i < wp.t.size(); ++i) t.rows.push_back({wp.t[i], wp.wealth[i]});
  ctx.write_csv("figure3_wealth.csv", t);
  ctx.write_plot("figure3_wealth.svg", t, {"wealth on a surviving scenario", "t", {"wealth"}});

  csv::Table init;
  init.header = {"param", "insider", "investor", "merton"};
  init.rows.push_back({mp.gamma, insider_ex_ante(m).value, solve_investor(m).value0(m),
                       merton_value(m)});
  ctx.write_csv("figure3_initial.csv", init);
  ctx.finish("figure3");
  return 0;
}

int cmd_figure4(RunContext& ctx) {
  csv::Table sweep;
  sweep.header = {"param", "insider", "investor", "merton"};
  for (double d : {0.0, 0.1, 0.3, 0.5}) {
    ModelParams mp = ctx.resolved.params;
    mp.lambda = 0.3;
    mp.gamma = 0.5;
    mp.delta = d;
    Model m{mp, ctx.resolved.profile};
    sweep.rows.push_back({d, insider_ex_ante(m).value, solve_investor(m).value0(m),
                          merton_value(m)});
  }
  ctx.write_csv("figure4.csv", sweep);
  ctx.write_plot("figure4.svg", sweep,
                 {"initial values vs short-sale floor", "delta", {"insider", "investor", "merton"}});
  ctx.finish("figure4");
  return 0;
}

int cmd_sweep(RunContext& ctx, const std::string& param, const std::vector<double>& values) {
  csv::Table sweep;
  sweep.header = {"param", "insider", "investor", "merton"};
  for (double v : values) {
    ModelParams mp = ctx.resolved.params;
    if (param == "delta") mp.delta = v;
    else if (param == "gamma") mp.gamma = v;
    else if (param == "lambda") mp.lambda = v;
    else if (param == "p") mp.p = v;
    else throw std::invalid_argument("sweep parameter must be delta, gamma, lambda or p");
    Model m{mp, ctx.resolved.profile};
    sweep.rows.push_back({v, insider_ex_ante(m).value, solve_investor(m).value0(m),
                          merton_value(m)});
  }
  ctx.write_csv("sweep_" + param + ".csv", sweep);
  ctx.write_plot("sweep_" + param + ".svg", sweep,
                 {"initial values vs " + param, param, {"insider", "investor", "merton"}});
  ctx.finish("sweep");
  return 0;
}

int cmd_unbounded(RunContext& ctx, std::vector<double> psis, double theta, double eta_frac) {
  const auto& mp = ctx.model.params();
  auto rows = mc::unbounded_experiment(ctx.model, psis, mp.lambda * theta, eta_frac, ctx.args.n,
                                       ctx.args.seed, {});
  csv::Table t;
  t.header = {"psi", "mean_wealth", "mean_utility", "stderr"};
  for (const auto& r : rows)
    t.rows.push_back({r.psi, r.mean_wealth, r.mean_utility, r.utility_stderr});
  ctx.write_csv("unbounded.csv", t);
  ctx.write_plot("unbounded.svg", t,
                 {"forced-short experiment", "psi", {"mean_wealth", "mean_utility"}});
  ctx.finish("unbounded");
  return 0;
}

int cmd_verify(const CommonArgs& args, bool quick, bool verbose) {
  if (args.n < 1000) {
    std::cerr << "error: verify needs --n >= 1000\n";
    return 2;
  }
  verify::Options vo;
  vo.n = args.n;
  vo.seed = args.seed;
  auto results = quick ? verify::acceptance(vo) : verify::full_suite(vo);
  const int failed = verify::report(results, std::cout, verbose);
  std::cout << (failed == 0 ? "all checks passed\n"
                            : std::to_string(failed) + " check group(s) failed\n");
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"portfolio optimization under counterparty default risk"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "flat JSON configuration file");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed, "random stream seed");
    sub->add_option("--n", args.n, "Monte Carlo sample count");
    sub->add_flag("--svg,!--no-svg", args.svg, "toggle SVG rendering");
    for (const char* key : {"mu0", "sigma0", "gamma", "T", "p", "delta", "lambda", "x0",
                            "profile.kind", "profile.table"}) {
      sub->add_option_function<std::string>(
          std::string("--") + key,
          [&args, key](const std::string& v) { args.overrides[key] = v; },
          std::string("override model key ") + key);
    }
  };

  double theta = 0.5;
  double barrier = 0.15;
  std::optional<double> theta1;
  double eta_frac = 0.05;
  double exp_theta = 0.25;
  std::vector<double> psis{1.0, 5.0, 25.0, 125.0};
  std::string sweep_param = "delta";
  std::vector<double> sweep_values{0.0, 0.1, 0.3, 0.5};
  bool quick = false, verbose = false;

  CLI::App* f1 = app.add_subcommand("figure1", "value curves on one default scenario");
  add_common(f1);
  f1->add_option("--barrier", barrier, "scenario barrier level");
  f1->add_option("--theta", theta1, "pin the scenario default time instead");
  CLI::App* f2 = app.add_subcommand("figure2", "loss-fraction sweep with curves");
  add_common(f2);
  f2->add_option("--theta", theta, "scenario default time");
  CLI::App* f3 = app.add_subcommand("figure3", "extreme default/loss regime");
  add_common(f3);
  f3->add_option("--theta", theta, "scenario default time");
  CLI::App* f4 = app.add_subcommand("figure4", "short-sale floor sweep");
  add_common(f4);
  CLI::App* sw = app.add_subcommand("sweep", "generic parameter sweep");
  add_common(sw);
  sw->add_option("--param", sweep_param, "delta | gamma | lambda | p");
  sw->add_option("--values", sweep_values, "sweep values")->delimiter(',');
  CLI::App* un = app.add_subcommand("unbounded", "forced-short experiment");
  add_common(un);
  un->add_option("--psi", psis, "short sizes")->delimiter(',');
  un->add_option("--theta", exp_theta, "experiment default time");
  un->add_option("--eta-frac", eta_frac, "window fraction of the barrier");
  CLI::App* ve = app.add_subcommand("verify", "oracle-vs-analytic check suite");
  add_common(ve);
  ve->add_flag("--quick", quick, "acceptance criteria only");
  ve->add_flag("--verbose", verbose, "print passing checks too");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ve->parsed()) return cmd_verify(args, quick, verbose);
    RunContext ctx(args);
    if (f1->parsed()) return cmd_figure1(ctx, barrier, theta1);
    if (f2->parsed()) return cmd_figure2(ctx, theta);
    if (f3->parsed()) return cmd_figure3(ctx, theta);
    if (f4->parsed()) return cmd_figure4(ctx);
    if (sw->parsed()) return cmd_sweep(ctx, sweep_param, sweep_values);
    if (un->parsed()) return cmd_unbounded(ctx, psis, exp_theta, eta_frac);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

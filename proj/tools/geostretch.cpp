// geostretch: command-line front end. Options are collected into a RunConfig
// and handed to geostretch::cli::run.

#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geostretch/cli/commands.hpp"

namespace {

using geostretch::cli::RunConfig;
using geostretch::cli::UsageError;

struct Leaf {
  CLI::App* app = nullptr;
  std::string command;
  std::map<std::string, std::string> values;
  std::vector<std::string> params;
  std::vector<std::string> fixes;

  CLI::Option* option(const std::string& key, const std::string& help) {
    return app->add_option("--" + key, values[key], help);
  }
};

Leaf& add_leaf(std::vector<std::unique_ptr<Leaf>>& leaves, CLI::App* parent, const std::string& name,
               const std::string& command, const std::string& help) {
  auto leaf = std::make_unique<Leaf>();
  leaf->app = parent->add_subcommand(name, help);
  leaf->command = command;
  leaves.push_back(std::move(leaf));
  return *leaves.back();
}

void model_options(Leaf& l) {
  l.option("model", "model id: linear, davis-skodje, michaelis-menten, chiavazzo");
  l.app->add_option("--param", l.params, "parameter override name=value (repeatable)");
  l.option("riemann-sign", "")->group("");
}

void output_options(Leaf& l, bool plot = true) {
  l.option("output", "CSV output path");
  if (plot) l.option("plot", "gnuplot script path (needs --output)");
}

void slice_options(Leaf& l) {
  l.app->add_option("--fix", l.fixes, "fixed coordinate name=value (repeatable)");
  l.option("search", "searched coordinate name=lo:hi[:step|:count]");
}

RunConfig to_config(const Leaf& l) {
  RunConfig cfg;
  cfg.set("command", l.command);
  for (const auto& [k, v] : l.values)
    if (l.app->count(k == "suite" ? k : "--" + k) > 0) cfg.set(k, v);
  for (const auto& p : l.params) {
    const auto a = geostretch::cli::parse_assignment("param", p);
    cfg.set("param." + a.name, a.value);
  }
  if (!l.fixes.empty()) {
    std::string joined;
    for (const auto& f : l.fixes) joined += (joined.empty() ? "" : ",") + f;
    cfg.set("fix", joined);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slow invariant manifold location by geodesic stretching and flow curvature"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Leaf>> leaves;

  auto* metric = app.add_subcommand("metric", "f-manifold metric")->require_subcommand(1);
  auto* curvature = app.add_subcommand("curvature", "Christoffel symbols, f-deviation, sectional curvature")
                        ->require_subcommand(1);
  auto* stretch = app.add_subcommand("stretch", "geodesic stretching along a slice")->require_subcommand(1);
  auto* sim = app.add_subcommand("sim", "slow invariant manifold curves")->require_subcommand(1);
  auto* fcm = app.add_subcommand("fcm", "flow curvature zero set")->require_subcommand(1);
  auto* geodesic = app.add_subcommand("geodesic", "trajectories as geodesics")->require_subcommand(1);

  for (auto* parent : {metric, curvature}) {
    Leaf& l = add_leaf(leaves, parent, "eval", parent->get_name() + " eval", "evaluate at one point");
    model_options(l);
    l.option("point", "state coordinates, comma separated");
    l.option("tau", "explicit time coordinate (default 0)");
    output_options(l, false);
  }
  {
    Leaf& l = add_leaf(leaves, stretch, "slice", "stretch slice", "stretching profile and located extremum");
    model_options(l);
    slice_options(l);
    l.option("objective", "tan-min, orth-max or ratio-max (default tan-min)");
    l.option("grid", "coarse grid points for the locator (default 64)");
    l.option("tol", "locator tolerance (default 1e-8)");
    l.option("tau", "explicit time coordinate (default 0)");
    output_options(l);
  }
  {
    Leaf& l = add_leaf(leaves, sim, "sweep", "sim sweep", "locate the manifold over a grid of slow values");
    model_options(l);
    slice_options(l);
    l.option("slow", "slow coordinate name=lo:hi[:step|:count]");
    l.option("objective", "tan-min, orth-max or ratio-max (default tan-min)");
    l.option("grid", "coarse grid points for the locator (default 64)");
    l.option("tol", "locator tolerance (default 1e-8)");
    l.option("tau", "explicit time coordinate (default 0)");
    output_options(l);
  }
  {
    Leaf& l = add_leaf(leaves, fcm, "slice", "fcm slice", "roots of the flow curvature determinant on a slice");
    model_options(l);
    slice_options(l);
    l.option("grid", "sign-change grid points (default 256)");
    l.option("tol", "root tolerance (default 1e-10)");
    output_options(l);
  }
  {
    Leaf& l = add_leaf(leaves, geodesic, "verify", "geodesic verify", "integrate and check the geodesic equation");
    model_options(l);
    l.option("start", "initial state, comma separated");
    l.option("tau", "initial explicit time (default 0)");
    l.option("t-end", "final time (default 5)");
    l.option("tol", "integrator tolerance (default 1e-10)");
    l.option("stride", "output sample spacing (default t-end/100)");
    l.option("bound", "residual bound for a zero exit status (default 1e-6)");
    output_options(l);
  }
  {
    Leaf& l = add_leaf(leaves, &app, "reproduce", "reproduce", "run an acceptance suite");
    l.app->add_option("suite", l.values["suite"], "paper-figures or invariants");
    l.option("seed", "sampling seed (default 7)");
    l.option("riemann-sign", "")->group("");
    output_options(l, false);
  }

  std::string config_path;
  std::vector<std::string> overrides;
  auto* rerun = app.add_subcommand("run", "re-run from a config file or an echoed CSV");
  rerun->add_option("--config", config_path, "config file or CSV with an echo block")->required();
  rerun->add_option("--set", overrides, "override key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  RunConfig cfg;
  try {
    if (rerun->parsed()) {
      cfg = RunConfig::load(config_path);
      for (const auto& o : overrides) {
        const auto a = geostretch::cli::parse_assignment("set", o);
        cfg.set(a.name, a.value);
      }
    } else {
      for (const auto& l : leaves)
        if (l->app->parsed()) cfg = to_config(*l);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  return geostretch::cli::run(cfg, std::cout, std::cerr);
}

// Command-line surface for the multi-channel frame classification workbench:
// dataset generation, room simulation, training, evaluation and plotting.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mvn/driver.hpp"
#include "mvn/errors.hpp"

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  long long seed = -1;  // -1: keep config value
  long long jobs = -1;
  std::vector<std::string> overrides;  // key=value
};

mvn::RunConfig resolve_config(const GlobalOpts& g) {
  mvn::RunConfig cfg = g.config_path.empty() ? mvn::RunConfig::defaults()
                                             : mvn::RunConfig::from_file(g.config_path);
  if (g.seed >= 0) cfg.set("seed", std::to_string(g.seed));
  if (g.jobs >= 0) cfg.set("jobs", std::to_string(g.jobs));
  for (const auto& kv : g.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw mvn::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void add_global_opts(CLI::App* app, GlobalOpts& g) {
  app->add_option("--config", g.config_path, "configuration file (key=value)");
  app->add_option("--out", g.out_dir, "output directory");
  app->add_option("--seed", g.seed, "override the run seed");
  app->add_option("--jobs", g.jobs, "worker threads for evaluation");
  app->add_option("--set", g.overrides, "override one config key (key=value)")
      ->take_all();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-channel frame classification workbench"};
  app.require_subcommand(1);

  GlobalOpts g;
  std::vector<std::string> checkpoints;
  std::vector<std::string> csvs;
  int plot_width = 640, plot_height = 420;

  CLI::App* gen = app.add_subcommand("gen-data", "write a dataset manifest");
  add_global_opts(gen, g);
  CLI::App* sim = app.add_subcommand("simulate", "sample and write room scenes");
  add_global_opts(sim, g);
  CLI::App* trn = app.add_subcommand("train", "train a model, write checkpoint + curve");
  add_global_opts(trn, g);
  CLI::App* evl = app.add_subcommand("eval", "channel sweep evaluation, write report CSVs");
  add_global_opts(evl, g);
  evl->add_option("--checkpoint", checkpoints, "model checkpoint(s) to evaluate")
      ->required()
      ->take_all();
  CLI::App* plt = app.add_subcommand("plot", "render accuracy charts from report CSVs");
  plt->add_option("--report", csvs, "raw report CSV file(s)")->required()->take_all();
  plt->add_option("--out", g.out_dir, "output directory");
  plt->add_option("--width", plot_width, "chart width in px");
  plt->add_option("--height", plot_height, "chart height in px");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      mvn::cmd::gen_data(resolve_config(g), g.out_dir);
    } else if (sim->parsed()) {
      mvn::cmd::simulate(resolve_config(g), g.out_dir);
    } else if (trn->parsed()) {
      mvn::cmd::train_run(resolve_config(g), g.out_dir);
    } else if (evl->parsed()) {
      mvn::cmd::eval_run(resolve_config(g), checkpoints, g.out_dir);
    } else if (plt->parsed()) {
      mvn::cmd::plot(csvs, g.out_dir, plot_width, plot_height);
    }
  } catch (const mvn::Error& e) {
    std::string msg = e.what();
    auto nl = msg.find('\n');
    if (nl != std::string::npos) msg = msg.substr(0, nl) + " ...";
    std::fprintf(stderr, "error:%s: %s\n", e.category().c_str(), msg.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error:internal: %s\n", e.what());
    return 1;
  }
  return 0;
}

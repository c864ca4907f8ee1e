#include "commands.hpp"
#include "run_config.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>

namespace {

using tse::cli::RunConfig;

struct FlagValues {
  std::string config_path;
  std::string method;
  long long detectors = 0;
  std::string detector_rows;
  std::string wave_speeds;
  double beta = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  std::string out_dir;
  std::string input;
  std::string format;
  int lane = 0;
  long long seed = 0;
  std::string counts;
  std::string pairs;
  long long n_x = 0, n_t = 0;
  double dx = 0.0, dt = 0.0, x_min = 0.0, t_min = 0.0;
  double t_start = 0.0, t_end = 0.0;
};

// Shared flags; each subcommand picks the relevant subset. Flags override
// whatever the config file set.
void add_common_flags(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--config", flags.config_path, "key = value config file");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_flag("--trace", "write per-iteration solver trace");
  cmd->add_flag("--heatmap", "write PPM heatmaps");
  cmd->add_option("--seed", flags.seed, "RNG seed");
}

void add_estimation_flags(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--method", flags.method, "asm or admm");
  cmd->add_option("--detectors", flags.detectors, "equally spaced detector count");
  cmd->add_option("--detector-rows", flags.detector_rows, "explicit detector rows, e.g. 1,20,40");
  cmd->add_option("--wave-speeds", flags.wave_speeds, "wave speeds km/h, e.g. 80,-15");
  cmd->add_option("--beta", flags.beta, "ADMM step size");
  cmd->add_option("--sigma", flags.sigma, "kernel space width (m)");
  cmd->add_option("--tau", flags.tau, "kernel time width (s)");
  cmd->add_option("--input", flags.input, "input field file");
  cmd->add_option("--t-start", flags.t_start, "window start (s)");
  cmd->add_option("--t-end", flags.t_end, "window end (s)");
}

void add_grid_flags(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--n-x", flags.n_x, "space cell count");
  cmd->add_option("--n-t", flags.n_t, "time cell count");
  cmd->add_option("--dx", flags.dx, "cell length (m)");
  cmd->add_option("--dt", flags.dt, "cell duration (s)");
  cmd->add_option("--x-min", flags.x_min, "grid origin (m)");
  cmd->add_option("--t-min", flags.t_min, "grid origin (s)");
}

RunConfig build_config(const CLI::App* cmd, const FlagValues& flags) {
  RunConfig config;
  if (cmd->count("--config")) tse::cli::load_config_file(flags.config_path, config);

  const auto set = [cmd](const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (set("--method")) config.method = tse::cli::parse_method(flags.method);
  if (set("--detectors")) config.detector_count = static_cast<tse::Index>(flags.detectors);
  if (set("--detector-rows")) {
    config.detector_rows = tse::cli::parse_index_list(flags.detector_rows);
    config.detector_count.reset();
  }
  if (set("--wave-speeds")) {
    config.pipeline.wave_speeds = tse::cli::parse_double_list(flags.wave_speeds);
  }
  if (set("--beta")) config.pipeline.admm_params.beta = flags.beta;
  if (set("--sigma")) config.pipeline.sigma = flags.sigma;
  if (set("--tau")) config.pipeline.tau = flags.tau;
  if (set("--out")) config.out_dir = flags.out_dir;
  if (set("--trace")) config.trace = true;
  if (set("--heatmap")) config.heatmap = true;
  if (set("--seed")) config.seed = static_cast<std::uint64_t>(flags.seed);
  if (set("--input")) {
    if (cmd->get_name() == "ingest") {
      config.input_trajectories = flags.input;
    } else {
      config.input_field = flags.input;
      config.input_trajectories.reset();
    }
  }
  if (set("--format")) {
    config.traj_format = flags.format == "ngsim" ? tse::TrajectoryFormat::ngsim
                                                 : tse::TrajectoryFormat::native;
  }
  if (set("--lane")) config.lane = flags.lane;
  if (set("--counts")) config.sweep_counts = tse::cli::parse_index_list(flags.counts);
  if (set("--pairs")) config.sweep_pairs = tse::cli::parse_pair_list(flags.pairs);
  if (set("--n-x")) config.grid.n_x = static_cast<tse::Index>(flags.n_x);
  if (set("--n-t")) config.grid.n_t = static_cast<tse::Index>(flags.n_t);
  if (set("--dx")) config.grid.dx = flags.dx;
  if (set("--dt")) config.grid.dt = flags.dt;
  if (set("--x-min")) config.grid.x_min = flags.x_min;
  if (set("--t-min")) config.grid.t_min = flags.t_min;
  if (set("--t-start")) config.window_t_start = flags.t_start;
  if (set("--t-end")) config.window_t_end = flags.t_end;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Macroscopic traffic speed field estimation from sparse detectors"};
  app.require_subcommand(1);
  FlagValues flags;

  CLI::App* ingest = app.add_subcommand("ingest", "convert a trajectory file to a speed field");
  add_common_flags(ingest, flags);
  add_grid_flags(ingest, flags);
  ingest->add_option("--input", flags.input, "trajectory file");
  ingest->add_option("--format", flags.format, "native or ngsim");
  ingest->add_option("--lane", flags.lane, "NGSIM lane filter");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic ground-truth field");
  add_common_flags(synth, flags);
  add_grid_flags(synth, flags);

  CLI::App* estimate = app.add_subcommand("estimate", "reconstruct a field from detector rows");
  add_common_flags(estimate, flags);
  add_estimation_flags(estimate, flags);

  CLI::App* sweep_cov = app.add_subcommand("sweep-coverage", "error vs detector count");
  add_common_flags(sweep_cov, flags);
  add_estimation_flags(sweep_cov, flags);
  sweep_cov->add_option("--counts", flags.counts, "detector counts, e.g. 1,2,3,4,5,6,7");

  CLI::App* sweep_ws = app.add_subcommand("sweep-wavespeeds", "error vs number of wave speeds");
  add_common_flags(sweep_ws, flags);
  add_estimation_flags(sweep_ws, flags);
  sweep_ws->add_option("--pairs", flags.pairs, "c_cong:c_free pairs, e.g. -15:80,-12.5:70");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    const RunConfig config = build_config(cmd, flags);
    if (cmd == ingest) {
      tse::cli::cmd_ingest(config);
    } else if (cmd == synth) {
      tse::cli::cmd_synth(config);
    } else if (cmd == estimate) {
      tse::cli::cmd_estimate(config);
    } else if (cmd == sweep_cov) {
      tse::cli::cmd_sweep_coverage(config);
    } else {
      tse::cli::cmd_sweep_wavespeeds(config);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#include "commands.hpp"

#include "tse/adaptive_smoothing.hpp"
#include "tse/admm.hpp"
#include "tse/evaluation.hpp"
#include "tse/field_io.hpp"
#include "tse/heatmap.hpp"
#include "tse/kernel_smoother.hpp"
#include "tse/synth.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace tse::cli {

namespace fs = std::filesystem;

namespace {

fs::path prepare_out_dir(const RunConfig& config) {
  fs::path dir(config.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

SpeedField load_truth(const RunConfig& config) {
  if (config.input_field && config.input_trajectories) {
    throw std::invalid_argument("set exactly one of input.field / input.trajectories");
  }
  SpeedField truth;
  if (config.input_field) {
    truth = read_field(*config.input_field);
  } else if (config.input_trajectories) {
    config.grid.validate();
    const auto parsed =
        read_trajectories(*config.input_trajectories, {config.traj_format, config.lane});
    truth = aggregate_trajectories(parsed.trajectories, config.grid).field;
  } else {
    throw std::invalid_argument("no input source: set input.field or input.trajectories");
  }
  if (config.window_t_start || config.window_t_end) {
    const double t0 = config.window_t_start.value_or(truth.grid.t_min);
    const double t1 = config.window_t_end.value_or(truth.grid.t_min + truth.grid.t_extent());
    truth = crop_time(truth, t0, t1);
  }
  return truth;
}

std::vector<Index> resolve_detector_rows(const RunConfig& config, const GridSpec& grid) {
  if (config.detector_rows && config.detector_count) {
    throw std::invalid_argument("set only one of detectors.rows / detectors.count");
  }
  if (config.detector_rows) return *config.detector_rows;
  const Index count = config.detector_count.value_or(4);
  return equally_spaced_detectors(grid, count);
}

void write_kv(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << '\t' << value << '\n';
}

void write_heatmaps(const RunConfig& config, const fs::path& dir, const SpeedField& truth,
                    const SpeedField& observed, const SpeedField& estimate) {
  HeatmapOptions opts;
  opts.v_max = config.render_v_max;
  if (!(opts.v_max > 0.0)) {
    // One shared scale so the three images are comparable.
    double v_max = 0.0;
    for (Index j = 0; j < truth.grid.n_x; ++j) {
      for (Index k = 0; k < truth.grid.n_t; ++k) {
        if (std::isfinite(truth.values(j, k))) v_max = std::max(v_max, truth.values(j, k));
      }
    }
    opts.v_max = v_max > 0.0 ? v_max : 1.0;
  }
  write_heatmap_ppm((dir / "truth.ppm").string(), truth, opts);
  write_heatmap_ppm((dir / "observed.ppm").string(), observed, opts);
  write_heatmap_ppm((dir / "estimate.ppm").string(), estimate, opts);
}

}  // namespace

void cmd_ingest(const RunConfig& config) {
  if (!config.input_trajectories) {
    throw std::invalid_argument("ingest needs input.trajectories");
  }
  config.grid.validate();
  const fs::path dir = prepare_out_dir(config);

  const auto parsed =
      read_trajectories(*config.input_trajectories, {config.traj_format, config.lane});
  const AggregationResult agg = aggregate_trajectories(parsed.trajectories, config.grid);

  write_field((dir / "truth.field").string(), agg.field);

  auto report = open_out(dir / "ingest_report.tsv");
  write_kv(report, "vehicles", std::to_string(parsed.trajectories.size()));
  write_kv(report, "dropped_duplicates", std::to_string(parsed.dropped_duplicates));
  write_kv(report, "skipped_samples", std::to_string(agg.skipped_samples));
  write_kv(report, "filled_cells", std::to_string(agg.filled_cells));
  write_kv(report, "n_x", std::to_string(agg.field.grid.n_x));
  write_kv(report, "n_t", std::to_string(agg.field.grid.n_t));

  std::cout << "wrote " << (dir / "truth.field").string() << " (" << agg.field.grid.n_x << "x"
            << agg.field.grid.n_t << ", skipped " << agg.skipped_samples << " samples, filled "
            << agg.filled_cells << " cells)\n";
}

void cmd_synth(const RunConfig& config) {
  const fs::path dir = prepare_out_dir(config);
  SyntheticSpec spec;
  spec.grid = config.grid;
  spec.free_speed = config.synth_free_speed;
  spec.congested_speed = config.synth_congested_speed;
  spec.bands = config.synth_bands;
  spec.noise_std = config.synth_noise_std;
  spec.seed = config.seed;

  const SpeedField field = generate_field(spec);
  write_field((dir / "truth.field").string(), field);
  if (config.heatmap) {
    HeatmapOptions opts;
    opts.v_max = config.render_v_max;
    write_heatmap_ppm((dir / "truth.ppm").string(), field, opts);
  }
  std::cout << "wrote " << (dir / "truth.field").string() << "\n";
}

void cmd_estimate(const RunConfig& config) {
  const fs::path dir = prepare_out_dir(config);
  const SpeedField truth = load_truth(config);
  const std::vector<Index> rows = resolve_detector_rows(config, truth.grid);

  const RunResult run = run_estimation(truth, rows, config.method, config.pipeline);
  const EvalReport eval = evaluate(run.estimate, truth, &run.mask);

  write_field((dir / "estimate.field").string(), run.estimate);
  if (config.method == Method::admm) {
    for (Index i = 0; i < run.bank.size(); ++i) {
      SpeedField w{run.estimate.grid, run.admm->weights.weights[i]};
      write_field((dir / ("weight_" + std::to_string(i) + ".field")).string(), w);
    }
  } else {
    const SpeedField& z_free =
        run.bank.wave_speeds[0] > 0.0 ? run.bank.fields[0] : run.bank.fields[1];
    const SpeedField& z_cong =
        run.bank.wave_speeds[0] > 0.0 ? run.bank.fields[1] : run.bank.fields[0];
    SpeedField w{run.estimate.grid, asm_weight(z_free, z_cong, config.pipeline.asm_params)};
    write_field((dir / "weight_cong.field").string(), w);
  }

  auto report = open_out(dir / "report.tsv");
  write_kv(report, "method", config.method == Method::admm ? "admm" : "asm");
  write_kv(report, "m", std::to_string(run.bank.size()));
  {
    std::string rows_text;
    for (Index r : rows) {
      if (!rows_text.empty()) rows_text += ',';
      rows_text += std::to_string(r);
    }
    write_kv(report, "detector_rows", rows_text);
  }
  write_kv(report, "sigma", format_number(run.kernel.sigma));
  write_kv(report, "tau", format_number(run.kernel.tau));
  write_kv(report, "kernel_shape",
           run.kernel.shape == KernelShape::exponential ? "exponential" : "gaussian");
  write_kv(report, "relative_error", format_number(eval.relative_error));
  for (const auto& [region, err] : eval.per_region_errors) {
    write_kv(report, "relative_error_" + region, format_number(err));
  }
  write_kv(report, "negative_speed_cells", std::to_string(eval.negative_speed_cells));
  write_kv(report, "cell_count", std::to_string(eval.cell_count));
  if (run.admm) {
    write_kv(report, "converged", run.admm->converged ? "true" : "false");
    write_kv(report, "iterations", std::to_string(run.admm->iters));
    write_kv(report, "objective", format_number(run.admm->objective));
    write_kv(report, "final_primal_residual", format_number(run.admm->final_primal));
    write_kv(report, "final_dual_residual", format_number(run.admm->final_dual));
  }

  if (config.trace && run.admm) {
    auto trace = open_out(dir / "trace.tsv");
    trace << "iter\tobjective\tr_primal\tr_dual\n";
    for (std::size_t i = 0; i < run.admm->objective_history.size(); ++i) {
      trace << (i + 1) << '\t' << format_number(run.admm->objective_history[i]) << '\t'
            << format_number(run.admm->primal_history[i]) << '\t'
            << format_number(run.admm->dual_history[i]) << '\n';
    }
  }

  if (config.heatmap) {
    write_heatmaps(config, dir, truth, run.observed, run.estimate);
  }

  std::cout << "relative_error " << format_number(eval.relative_error) << "\n";
}

void cmd_sweep_coverage(const RunConfig& config) {
  if (config.sweep_counts.empty()) {
    throw std::invalid_argument("sweep-coverage needs sweep.counts (or --counts)");
  }
  const fs::path dir = prepare_out_dir(config);
  const SpeedField truth = load_truth(config);
  const auto points = coverage_sweep(truth, config.sweep_counts, config.method, config.pipeline);

  auto table = open_out(dir / "coverage_sweep.tsv");
  table << "detectors\tcoverage\tm_r\n";
  for (const CoveragePoint& p : points) {
    table << p.detectors << '\t' << format_number(p.coverage) << '\t' << format_number(p.m_r)
          << '\n';
  }
  std::cout << "wrote " << (dir / "coverage_sweep.tsv").string() << " (" << points.size()
            << " rows)\n";
}

void cmd_sweep_wavespeeds(const RunConfig& config) {
  if (config.sweep_pairs.empty()) {
    throw std::invalid_argument("sweep-wavespeeds needs sweep.pairs (or --pairs)");
  }
  const fs::path dir = prepare_out_dir(config);
  const SpeedField truth = load_truth(config);
  const std::vector<Index> rows = resolve_detector_rows(config, truth.grid);
  const ObservationMask mask = detector_mask(truth.grid, rows);
  const auto points = wavespeed_sweep(truth, mask, config.sweep_pairs, config.pipeline);

  auto table = open_out(dir / "wavespeed_sweep.tsv");
  table << "pairs\tm\tobjective\tm_r\n";
  for (const WaveSweepPoint& p : points) {
    table << p.n_pairs << '\t' << p.m << '\t' << format_number(p.objective) << '\t'
          << format_number(p.m_r) << '\n';
  }
  std::cout << "wrote " << (dir / "wavespeed_sweep.tsv").string() << " (" << points.size()
            << " rows)\n";
}

}  // namespace tse::cli

#pragma once

#include "tse/evaluation.hpp"
#include "tse/field_io.hpp"
#include "tse/synth.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tse::cli {

/// Declarative run configuration: a key = value file plus flag overrides
/// (flags win). The schema is documented in the README.
struct RunConfig {
  // input
  std::optional<std::string> input_field;
  std::optional<std::string> input_trajectories;
  TrajectoryFormat traj_format = TrajectoryFormat::native;
  std::optional<int> lane;

  // grid, for ingest/synth
  GridSpec grid{0.0, 0.0, 10.0, 1.0, 0, 0};

  // optional time window applied after loading
  std::optional<double> window_t_start;
  std::optional<double> window_t_end;

  // detectors
  std::optional<Index> detector_count;
  std::optional<std::vector<Index>> detector_rows;

  Method method = Method::admm;
  PipelineConfig pipeline;

  // outputs
  std::string out_dir = ".";
  bool heatmap = false;
  bool trace = false;
  double render_v_max = 0.0;

  // synthetic generation
  double synth_free_speed = 80.0;
  double synth_congested_speed = 20.0;
  double synth_noise_std = 0.0;
  std::uint64_t seed = 0;
  std::vector<WaveBand> synth_bands;

  // sweeps
  std::vector<Index> sweep_counts;
  std::vector<std::pair<double, double>> sweep_pairs;
};

/// Parses a config file; throws std::invalid_argument naming the offending
/// key or line.
void load_config_file(const std::string& path, RunConfig& config);

// Parsers shared with flag handling.
std::vector<double> parse_double_list(const std::string& text);
std::vector<Index> parse_index_list(const std::string& text);
std::vector<std::pair<double, double>> parse_pair_list(const std::string& text);
std::vector<WaveBand> parse_band_list(const std::string& text);
Method parse_method(const std::string& text);
KernelShape parse_kernel_shape(const std::string& text);

}  // namespace tse::cli

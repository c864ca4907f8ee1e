#include "run_config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string_view>

namespace tse::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find(sep, start);
    if (end == std::string::npos) {
      const std::string piece = trim(std::string_view(text).substr(start));
      if (!piece.empty()) out.push_back(piece);
      break;
    }
    const std::string piece = trim(std::string_view(text).substr(start, end - start));
    if (!piece.empty()) out.push_back(piece);
    start = end + 1;
  }
  return out;
}

double to_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return v;
}

long long to_int(const std::string& text) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::invalid_argument("not a boolean: '" + text + "'");
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& piece : split(text, ',')) out.push_back(to_double(piece));
  return out;
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  for (const std::string& piece : split(text, ',')) {
    out.push_back(static_cast<Index>(to_int(piece)));
  }
  return out;
}

std::vector<std::pair<double, double>> parse_pair_list(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  for (const std::string& piece : split(text, ',')) {
    const auto parts = split(piece, ':');
    if (parts.size() != 2) {
      throw std::invalid_argument("pair must look like c_cong:c_free, got '" + piece + "'");
    }
    out.emplace_back(to_double(parts[0]), to_double(parts[1]));
  }
  return out;
}

std::vector<WaveBand> parse_band_list(const std::string& text) {
  std::vector<WaveBand> out;
  for (const std::string& piece : split(text, ';')) {
    const auto parts = split(piece, ':');
    if (parts.size() != 4) {
      throw std::invalid_argument(
          "band must look like start_x:start_t:speed:half_width, got '" + piece + "'");
    }
    out.push_back({to_double(parts[0]), to_double(parts[1]), to_double(parts[2]),
                   to_double(parts[3])});
  }
  return out;
}

Method parse_method(const std::string& text) {
  if (text == "asm") return Method::asm_tanh;
  if (text == "admm") return Method::admm;
  throw std::invalid_argument("method must be asm or admm, got '" + text + "'");
}

KernelShape parse_kernel_shape(const std::string& text) {
  if (text == "exponential") return KernelShape::exponential;
  if (text == "gaussian") return KernelShape::gaussian;
  throw std::invalid_argument("kernel shape must be exponential or gaussian, got '" + text + "'");
}

void load_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    try {
      if (key == "input.field") {
        config.input_field = value;
      } else if (key == "input.trajectories") {
        config.input_trajectories = value;
      } else if (key == "input.format") {
        if (value == "native") {
          config.traj_format = TrajectoryFormat::native;
        } else if (value == "ngsim") {
          config.traj_format = TrajectoryFormat::ngsim;
        } else {
          throw std::invalid_argument("input.format must be native or ngsim");
        }
      } else if (key == "input.lane") {
        config.lane = static_cast<int>(to_int(value));
      } else if (key == "grid.n_x") {
        config.grid.n_x = static_cast<Index>(to_int(value));
      } else if (key == "grid.n_t") {
        config.grid.n_t = static_cast<Index>(to_int(value));
      } else if (key == "grid.dx") {
        config.grid.dx = to_double(value);
      } else if (key == "grid.dt") {
        config.grid.dt = to_double(value);
      } else if (key == "grid.x_min") {
        config.grid.x_min = to_double(value);
      } else if (key == "grid.t_min") {
        config.grid.t_min = to_double(value);
      } else if (key == "window.t_start") {
        config.window_t_start = to_double(value);
      } else if (key == "window.t_end") {
        config.window_t_end = to_double(value);
      } else if (key == "detectors.count") {
        config.detector_count = static_cast<Index>(to_int(value));
      } else if (key == "detectors.rows") {
        config.detector_rows = parse_index_list(value);
      } else if (key == "method") {
        config.method = parse_method(value);
      } else if (key == "waves.speeds") {
        config.pipeline.wave_speeds = parse_double_list(value);
      } else if (key == "kernel.sigma") {
        if (value != "auto") config.pipeline.sigma = to_double(value);
      } else if (key == "kernel.tau") {
        if (value != "auto") config.pipeline.tau = to_double(value);
      } else if (key == "kernel.shape") {
        config.pipeline.kernel_shape = parse_kernel_shape(value);
      } else if (key == "kernel.cutoff") {
        config.pipeline.cutoff_radius = to_double(value);
      } else if (key == "asm.v_thr") {
        config.pipeline.asm_params.v_thr = to_double(value);
      } else if (key == "asm.delta_v") {
        config.pipeline.asm_params.delta_v = to_double(value);
      } else if (key == "admm.beta") {
        config.pipeline.admm_params.beta = to_double(value);
      } else if (key == "admm.eps_abs") {
        config.pipeline.admm_params.eps_abs = to_double(value);
      } else if (key == "admm.eps_rel") {
        config.pipeline.admm_params.eps_rel = to_double(value);
      } else if (key == "admm.max_iters") {
        config.pipeline.admm_params.max_iters = static_cast<Index>(to_int(value));
      } else if (key == "out.dir") {
        config.out_dir = value;
      } else if (key == "out.heatmap") {
        config.heatmap = to_bool(value);
      } else if (key == "out.trace") {
        config.trace = to_bool(value);
      } else if (key == "render.v_max") {
        if (value != "auto") config.render_v_max = to_double(value);
      } else if (key == "synth.free_speed") {
        config.synth_free_speed = to_double(value);
      } else if (key == "synth.congested_speed") {
        config.synth_congested_speed = to_double(value);
      } else if (key == "synth.noise_std") {
        config.synth_noise_std = to_double(value);
      } else if (key == "synth.seed") {
        config.seed = static_cast<std::uint64_t>(to_int(value));
      } else if (key == "synth.bands") {
        config.synth_bands = parse_band_list(value);
      } else if (key == "sweep.counts") {
        config.sweep_counts = parse_index_list(value);
      } else if (key == "sweep.pairs") {
        config.sweep_pairs = parse_pair_list(value);
      } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace tse::cli

#include "tse/field_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <system_error>

namespace tse {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ',' ||
                               line[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != ',' &&
           line[j] != '\r') {
      ++j;
    }
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

bool parse_index(std::string_view tok, Index& out) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return false;
  out = static_cast<Index>(v);
  return true;
}

void format_value(std::string& line, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  line.append(buf, ptr);
}

Matrix read_grid_file(const std::string& path, GridSpec& grid) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) fail(path, 1, "missing header line");
  const auto head = split_fields(line);
  if (head.size() != 6) fail(path, 1, "header must be: n_x n_t dx dt x_min t_min");
  if (!parse_index(head[0], grid.n_x) || !parse_index(head[1], grid.n_t) ||
      !parse_double(head[2], grid.dx) || !parse_double(head[3], grid.dt) ||
      !parse_double(head[4], grid.x_min) || !parse_double(head[5], grid.t_min)) {
    fail(path, 1, "unparseable header");
  }
  grid.validate();

  Matrix values(grid.n_x, grid.n_t);
  for (Index j = 0; j < grid.n_x; ++j) {
    if (!std::getline(in, line)) fail(path, 2 + j, "unexpected end of file");
    const auto toks = split_fields(line);
    if (static_cast<Index>(toks.size()) != grid.n_t) {
      fail(path, 2 + j, "expected " + std::to_string(grid.n_t) + " values, got " +
                            std::to_string(toks.size()));
    }
    for (Index k = 0; k < grid.n_t; ++k) {
      double v = 0.0;
      if (!parse_double(toks[k], v)) fail(path, 2 + j, "unparseable value");
      values(j, k) = v;
    }
  }
  return values;
}

void write_grid_file(std::ostream& out, const GridSpec& grid, const Matrix& values) {
  std::string line;
  format_value(line, static_cast<double>(grid.n_x));
  line += ' ';
  format_value(line, static_cast<double>(grid.n_t));
  line += ' ';
  format_value(line, grid.dx);
  line += ' ';
  format_value(line, grid.dt);
  line += ' ';
  format_value(line, grid.x_min);
  line += ' ';
  format_value(line, grid.t_min);
  out << line << '\n';
  for (Index j = 0; j < grid.n_x; ++j) {
    line.clear();
    for (Index k = 0; k < grid.n_t; ++k) {
      if (k > 0) line += ' ';
      format_value(line, values(j, k));
    }
    out << line << '\n';
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

SpeedField read_field(const std::string& path) {
  GridSpec grid;
  Matrix values = read_grid_file(path, grid);
  SpeedField field{grid, std::move(values)};
  field.validate_shape();
  return field;
}

void write_field(std::ostream& out, const SpeedField& field) {
  field.validate_shape();
  write_grid_file(out, field.grid, field.values);
}

void write_field(const std::string& path, const SpeedField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_field(out, field);
}

ObservationMask read_mask(const std::string& path) {
  GridSpec grid;
  Matrix values = read_grid_file(path, grid);
  ObservationMask mask{grid, std::move(values)};
  mask.validate();
  return mask;
}

void write_mask(const std::string& path, const ObservationMask& mask) {
  mask.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_grid_file(out, mask.grid, mask.mask);
}

namespace {

constexpr double kFeetToMeters = 0.3048;
constexpr double kFtPerSecToKmh = 1.09728;

struct ColumnMap {
  std::size_t vehicle, time, position, speed;
  std::optional<std::size_t> lane;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<std::size_t> find_column(const std::vector<std::string_view>& header,
                                       std::string_view name) {
  const std::string want = lower(name);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(header[i]) == want) return i;
  }
  return std::nullopt;
}

ColumnMap map_columns(const std::string& path, const std::vector<std::string_view>& header,
                      TrajectoryFormat format) {
  const bool ngsim = format == TrajectoryFormat::ngsim;
  const auto require = [&](std::string_view name) {
    const auto col = find_column(header, name);
    if (!col) fail(path, 1, "missing column '" + std::string(name) + "'");
    return *col;
  };
  if (ngsim) {
    return {require("Vehicle_ID"), require("Global_Time"), require("Local_Y"),
            require("v_Vel"), find_column(header, "Lane_ID")};
  }
  return {require("vehicle_id"), require("time_s"), require("position_m"),
          require("speed_kmh"), std::nullopt};
}

}  // namespace

TrajectoryReadResult read_trajectories(const std::string& path,
                                       const TrajectoryReadOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  const bool ngsim = options.format == TrajectoryFormat::ngsim;

  std::string line;
  if (!std::getline(in, line)) fail(path, 1, "missing header line");
  const auto header = split_fields(line);
  const ColumnMap cols = map_columns(path, header, options.format);
  if (options.lane && !cols.lane) fail(path, 1, "lane filter requires a Lane_ID column");
  const std::size_t needed =
      std::max({cols.vehicle, cols.time, cols.position, cols.speed,
                cols.lane.value_or(0)}) + 1;

  struct Row {
    double t, x, v;
  };
  std::map<std::string, std::vector<Row>> by_vehicle;
  double min_time = std::numeric_limits<double>::infinity();

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_fields(line);
    if (toks.empty()) continue;
    if (toks.size() < needed) fail(path, line_no, "too few columns");
    double t = 0.0, x = 0.0, v = 0.0;
    if (!parse_double(toks[cols.time], t) || !parse_double(toks[cols.position], x) ||
        !parse_double(toks[cols.speed], v)) {
      fail(path, line_no, "unparseable numeric field");
    }
    if (cols.lane && options.lane) {
      double lane = 0.0;
      if (!parse_double(toks[*cols.lane], lane)) fail(path, line_no, "unparseable lane");
      if (static_cast<int>(lane) != *options.lane) continue;
    }
    if (ngsim) {
      t *= 1e-3;  // Global_Time is in milliseconds
      x *= kFeetToMeters;
      v *= kFtPerSecToKmh;
    }
    min_time = std::min(min_time, t);
    by_vehicle[std::string(toks[cols.vehicle])].push_back({t, x, v});
  }

  TrajectoryReadResult result;
  for (auto& [vehicle, rows] : by_vehicle) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    Trajectory traj;
    traj.vehicle_id = vehicle;
    for (const Row& r : rows) {
      const double t = ngsim ? r.t - min_time : r.t;
      if (!traj.samples.empty() && traj.samples.back().t == t) {
        ++result.dropped_duplicates;
        continue;
      }
      traj.samples.push_back({t, r.x, r.v});
    }
    if (!traj.samples.empty()) result.trajectories.push_back(std::move(traj));
  }
  return result;
}

}  // namespace tse

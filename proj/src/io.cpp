#include "mvlab/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mvlab::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string join_row(const std::vector<double>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += format_double(row[i]);
  }
  return out;
}

void write_table(const fs::path& path, const Table& t) {
  std::string text;
  for (std::size_t i = 0; i < t.header.size(); ++i) text += (i ? "," : "") + t.header[i];
  text += '\n';
  for (const auto& r : t.rows) text += join_row(r) + '\n';
  write_text(path, text);
}

bool close_to(double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * std::max(1.0, scale); }

}  // namespace

Table read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line);
    if (t.header.empty()) {
      for (auto& c : cells) t.header.push_back(trim(c));
      continue;
    }
    if (cells.size() != t.header.size())
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                    " columns, found " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto& c : cells) {
      const std::string s = trim(c);
      if (s.empty()) {
        row.push_back(std::nan(""));
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0')
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": '" + s + "' is not a number");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw IoError(path.string() + ": empty CSV file");
  return t;
}

void write_grid_function_csv(const fs::path& path, const GridFunction& u) {
  const SpatialGrid& g = u.grid();
  Table t;
  t.header = g.dim() == 1 ? std::vector<std::string>{"x", "u"} : std::vector<std::string>{"x", "y", "u"};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point p = g.point(i);
    t.rows.push_back(g.dim() == 1 ? std::vector<double>{p[0], u[i]} : std::vector<double>{p[0], p[1], u[i]});
  }
  write_table(path, t);
}

GridFunction read_grid_function_csv(const fs::path& path, const SpatialGrid& grid) {
  const Table t = read_csv(path);
  const std::size_t cols = std::size_t(grid.dim()) + 1;
  if (t.header.size() != cols || t.rows.size() != grid.size())
    throw IoError(path.string() + ": expected " + std::to_string(grid.size()) + " rows of " + std::to_string(cols) +
                  " columns for this grid");
  GridFunction u(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.point(i);
    for (int d = 0; d < grid.dim(); ++d)
      if (!close_to(t.rows[i][std::size_t(d)], p[std::size_t(d)], grid.half_width()))
        throw IoError(path.string() + ": row " + std::to_string(i + 1) + " coordinates do not match the grid");
    u[i] = t.rows[i][cols - 1];
  }
  require_finite(u, path.string().c_str());
  return u;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
  const std::size_t n = traj.states.front().size();
  std::string text = "t";
  for (std::size_t i = 0; i < n; ++i) text += ",u" + std::to_string(i);
  text += '\n';
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    text += format_double(traj.tgrid.node(int(s)));
    for (double v : traj.states[s].values()) {
      text += ',';
      text += format_double(v);
    }
    text += '\n';
  }
  write_text(path, text);
}

Trajectory read_trajectory_csv(const fs::path& path, const SpatialGrid& grid, const TimeGrid& tgrid) {
  const Table t = read_csv(path);
  if (t.header.size() != grid.size() + 1 || t.rows.size() != std::size_t(tgrid.steps()) + 1)
    throw IoError(path.string() + ": expected " + std::to_string(tgrid.steps() + 1) + " rows of " +
                  std::to_string(grid.size() + 1) + " columns");
  Trajectory traj{tgrid, {}};
  for (std::size_t s = 0; s < t.rows.size(); ++s) {
    if (!close_to(t.rows[s][0], tgrid.node(int(s)), tgrid.horizon()))
      throw IoError(path.string() + ": row " + std::to_string(s + 1) + " time does not match the time grid");
    GridFunction u(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) u[i] = t.rows[s][i + 1];
    require_finite(u, path.string().c_str());
    traj.states.push_back(std::move(u));
  }
  return traj;
}

namespace {

constexpr char kMagic[8] = {'M', 'V', 'L', 'T', 'R', 'A', 'J', '1'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(char((v >> (8 * b)) & 0xff));
}
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw IoError("truncated trajectory blob");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= std::uint64_t(static_cast<unsigned char>(in[pos + std::size_t(b)])) << (8 * b);
  pos += 8;
  return v;
}

}  // namespace

void write_trajectory_binary(const fs::path& path, const Trajectory& traj) {
  std::string out(kMagic, sizeof kMagic);
  const std::size_t n = traj.states.front().size();
  put_u64(out, traj.states.size());
  put_u64(out, n);
  for (std::size_t s = 0; s < traj.states.size(); ++s) put_f64(out, traj.tgrid.node(int(s)));
  for (const auto& u : traj.states)
    for (double v : u.values()) put_f64(out, v);
  write_text(path, out);
}

Trajectory read_trajectory_binary(const fs::path& path, const SpatialGrid& grid, const TimeGrid& tgrid) {
  const std::string in = read_text(path);
  if (in.size() < sizeof kMagic || std::memcmp(in.data(), kMagic, sizeof kMagic) != 0)
    throw IoError(path.string() + ": not a trajectory blob");
  std::size_t pos = sizeof kMagic;
  const std::uint64_t nodes = get_u64(in, pos), n = get_u64(in, pos);
  if (nodes != std::uint64_t(tgrid.steps()) + 1 || n != grid.size())
    throw IoError(path.string() + ": blob shape does not match the configured grids");
  for (std::uint64_t s = 0; s < nodes; ++s)
    if (!close_to(std::bit_cast<double>(get_u64(in, pos)), tgrid.node(int(s)), tgrid.horizon()))
      throw IoError(path.string() + ": node times do not match the time grid");
  Trajectory traj{tgrid, {}};
  for (std::uint64_t s = 0; s < nodes; ++s) {
    GridFunction u(grid);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::bit_cast<double>(get_u64(in, pos));
    require_finite(u, path.string().c_str());
    traj.states.push_back(std::move(u));
  }
  return traj;
}

void write_trajectory(const fs::path& stem, const Trajectory& traj, TrajectoryFormat format) {
  if (format == TrajectoryFormat::csv) {
    fs::path p = stem;
    write_trajectory_csv(p.replace_extension(".csv"), traj);
  } else {
    fs::path p = stem;
    write_trajectory_binary(p.replace_extension(".bin"), traj);
  }
}

void write_control_csv(const fs::path& path, const Control& v, const TimeGrid& tgrid) {
  Table t;
  t.header.push_back("t");
  for (std::size_t k = 0; k < v.modes(); ++k) t.header.push_back("v" + std::to_string(k));
  for (int s = 0; s < v.steps(); ++s) {
    std::vector<double> row{tgrid.node(s)};
    for (double x : v.row(s)) row.push_back(x);
    t.rows.push_back(std::move(row));
  }
  write_table(path, t);
}

Control read_control_csv(const fs::path& path, const TimeGrid& tgrid, std::size_t modes) {
  const Table t = read_csv(path);
  if (t.header.size() != modes + 1 || t.rows.size() != std::size_t(tgrid.steps()))
    throw IoError(path.string() + ": control needs " + std::to_string(tgrid.steps()) + " rows of t plus " +
                  std::to_string(modes) + " mode columns");
  std::vector<double> values;
  values.reserve(std::size_t(tgrid.steps()) * modes);
  for (std::size_t s = 0; s < t.rows.size(); ++s) {
    if (!close_to(t.rows[s][0], tgrid.node(int(s)), tgrid.horizon()))
      throw IoError(path.string() + ": row " + std::to_string(s + 1) + " time does not match the time grid");
    for (std::size_t k = 0; k < modes; ++k) values.push_back(t.rows[s][k + 1]);
  }
  try {
    return Control(tgrid.steps(), modes, std::move(values));
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_picard_report_csv(const fs::path& path, const PicardReport& report) {
  Table t{{"iteration", "distance", "ratio"}, {}};
  for (std::size_t m = 0; m < report.distances.size(); ++m)
    t.rows.push_back({double(m + 1), report.distances[m], report.ratios[m]});
  write_table(path, t);
}

void write_small_noise_csv(const fs::path& path, const SmallNoiseTable& table) {
  Table t{{"eps", "estimate", "stderr"}, {}};
  for (const auto& r : table.rows) t.rows.push_back({r.eps, r.estimate, r.stderr_});
  write_table(path, t);
}

void write_rate_estimate_csv(const fs::path& path, const RateEstimate& est) {
  Table t{{"value", "gap", "relative_gap", "initial_gap", "converged", "evaluations"}, {}};
  t.rows.push_back({est.value, est.gap, est.relative_gap, est.initial_gap, est.converged ? 1.0 : 0.0,
                    double(est.evaluations)});
  write_table(path, t);
}

void write_rate_stages_csv(const fs::path& path, const RateEstimate& est) {
  Table t{{"eta", "value", "gap", "objective", "iterations"}, {}};
  for (const auto& s : est.stages) t.rows.push_back({s.eta, s.value, s.gap, s.objective, double(s.iterations)});
  write_table(path, t);
}

void write_weak_convergence_csv(const fs::path& path, const WeakConvergenceTable& table) {
  Table t{{"i", "sup_h", "l2_v", "lp", "control_norm", "offset_norm", "envelope"}, {}};
  for (const auto& r : table.rows)
    t.rows.push_back({r.frequency, r.sup_h, r.l2_v, r.lp, r.control_norm, r.offset_norm, r.envelope});
  write_table(path, t);
}

void write_series_csv(const fs::path& path, const std::string& name, const std::vector<double>& times,
                      const std::vector<double>& values) {
  if (times.size() != values.size()) throw DomainError("series lengths differ");
  Table t{{"t", name}, {}};
  for (std::size_t i = 0; i < times.size(); ++i) t.rows.push_back({times[i], values[i]});
  write_table(path, t);
}

void write_flow_summary_csv(const fs::path& path, const MeasureFlow& flow) {
  Table t{{"t", "second_moment", "mean_norm"}, {}};
  for (std::size_t s = 0; s < flow.nodes(); ++s) {
    const auto& mu = flow.at(s);
    double mean = 0.0;
    for (double n : mu.norms()) mean += n;
    t.rows.push_back({flow.times()[s], second_moment(mu), mean / double(mu.size())});
  }
  write_table(path, t);
}

}  // namespace mvlab::io

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mvlab/config.hpp"

namespace mvlab::io {

namespace fs = std::filesystem;

/// Shortest text that round-trips the double exactly.
std::string format_double(double x);

void ensure_directory(const fs::path& dir);
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

/// Plain CSV table with a header row; all cells numeric or empty.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
Table read_csv(const fs::path& path);

/// Columns x[,y],u; one row per grid point in row-major order.
void write_grid_function_csv(const fs::path& path, const GridFunction& u);
GridFunction read_grid_function_csv(const fs::path& path, const SpatialGrid& grid);

/// Columns t,u[0],...,u[n-1]; one row per node.
void write_trajectory_csv(const fs::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const fs::path& path, const SpatialGrid& grid, const TimeGrid& tgrid);

/// Binary blob: "MVLTRAJ1", u64 node count, u64 points per node, node times,
/// then node values (little-endian doubles, node-major).
void write_trajectory_binary(const fs::path& path, const Trajectory& traj);
Trajectory read_trajectory_binary(const fs::path& path, const SpatialGrid& grid, const TimeGrid& tgrid);

void write_trajectory(const fs::path& stem, const Trajectory& traj, TrajectoryFormat format);

/// Columns t,v[0],...,v[K-1]; row s holds v on [t_s, t_{s+1}).
void write_control_csv(const fs::path& path, const Control& v, const TimeGrid& tgrid);
Control read_control_csv(const fs::path& path, const TimeGrid& tgrid, std::size_t modes);

void write_picard_report_csv(const fs::path& path, const PicardReport& report);
void write_small_noise_csv(const fs::path& path, const SmallNoiseTable& table);
void write_rate_estimate_csv(const fs::path& path, const RateEstimate& est);
void write_rate_stages_csv(const fs::path& path, const RateEstimate& est);
void write_weak_convergence_csv(const fs::path& path, const WeakConvergenceTable& table);
void write_series_csv(const fs::path& path, const std::string& name, const std::vector<double>& times,
                      const std::vector<double>& values);
/// Per-node summaries of a measure flow: t, second moment, mean norm.
void write_flow_summary_csv(const fs::path& path, const MeasureFlow& flow);

}  // namespace mvlab::io

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mvlab/config.hpp"

namespace mvlab {

/// Process exit codes of the command layer.
enum ExitCode : int {
  exit_success = 0,
  exit_internal = 1,
  exit_validation = 2,
  exit_numerical = 3,
  exit_verification = 4,
};

/// Maps an error category to its exit code.
int exit_code_for(ErrorKind kind) noexcept;

struct CommandResult {
  int exit_code = exit_success;
  std::filesystem::path out_dir;
  std::vector<std::string> messages;  ///< human-readable log lines
  std::vector<std::string> warnings;
};

/// Parsed --target value of the rate command.
struct TargetSpec {
  enum class Kind { deterministic, manufactured, trajectory, terminal };
  Kind kind = Kind::deterministic;
  std::filesystem::path path;
};
/// "deterministic" | "manufactured:PATH" | "trajectory:PATH" | "terminal:PATH"; throws ParameterError otherwise.
TargetSpec parse_target_spec(const std::string& spec);

CommandResult cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_skeleton(const RunConfig& cfg, const std::filesystem::path& out,
                           const std::optional<std::filesystem::path>& control);
CommandResult cmd_rate(const RunConfig& cfg, const std::filesystem::path& out, const std::string& target);
/// Runs a verification suite ("all" for every suite); exit code 4 when any criterion fails.
CommandResult cmd_verify(const RunConfig& cfg, const std::filesystem::path& out, const std::string& suite);

}  // namespace mvlab

#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iontherm/config.hpp"

namespace iontherm {

enum class Command { Trajectory, Energy, DeltaTSweep, SqueezeSweep, Protocol, Threshold };

/// Command names as typed on the command line: trajectory, energy, dt-sweep, squeeze-sweep,
/// protocol, threshold.
const char* to_string(Command c);
std::optional<Command> parse_command(std::string_view name);
const std::vector<Command>& all_commands();

struct ExperimentSpec {
  Command command = Command::Trajectory;
  std::filesystem::path config_path;
  std::filesystem::path output_dir = ".";
  std::vector<std::string> overrides;  // key=value, applied after the file
  std::optional<std::uint64_t> seed;   // wins over the config and overrides
  int threads = 0;
};

struct ExperimentResult {
  std::vector<std::filesystem::path> files;  // data CSVs, then the JSON sidecar
  std::string summary_json;                  // the sidecar's "summary" object
};

ExperimentResult run_experiment(const ExperimentSpec& spec);
ExperimentResult run_experiment(const RunConfig& cfg, Command command,
                                const std::filesystem::path& output_dir, int threads = 0);

/// 0 success, 2 configuration or parse error, 3 numerical failure.
int exit_code_for(const std::exception& e);
/// {"error": {"kind": ..., "message": ...}, "exit_code": ...}
std::string error_json(const std::exception& e);

}  // namespace iontherm

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "iontherm/experiments.hpp"

namespace {

void write_error_file(const std::filesystem::path& dir, const std::string& body) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return;
  std::ofstream out(dir / "error.json");
  if (out) out << body << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tapered-trap ion heat engine: simulations, closed forms and the thermometry protocol"};
  std::string command;
  iontherm::ExperimentSpec spec;
  std::uint64_t seed = 0;
  bool list_keys = false;

  std::vector<std::string> names;
  for (auto c : iontherm::all_commands()) names.emplace_back(iontherm::to_string(c));
  app.add_option("command", command, "Experiment to run")->check(CLI::IsMember(names));
  app.add_option("-c,--config", spec.config_path, "Config file (key = value lines)");
  app.add_option("-o,--out", spec.output_dir, "Output directory")->capture_default_str();
  app.add_option("-s,--set", spec.overrides, "Override a config key, key=value (repeatable)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed, overrides the config");
  app.add_option("-j,--threads", spec.threads, "Worker threads for Monte Carlo (0 = all cores)");
  app.add_flag("--list-keys", list_keys, "Print the accepted config keys and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (list_keys) {
    for (const auto& k : iontherm::config_keys()) std::cout << k << '\n';
    return 0;
  }
  if (command.empty() || spec.config_path.empty()) {
    std::cerr << "a command and --config are required\n" << app.help();
    return 2;
  }
  spec.command = *iontherm::parse_command(command);
  if (*seed_opt) spec.seed = seed;

  try {
    const auto result = iontherm::run_experiment(spec);
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    const std::string body = iontherm::error_json(e);
    std::cerr << body << '\n';
    write_error_file(spec.output_dir, body);
    return iontherm::exit_code_for(e);
  }
}

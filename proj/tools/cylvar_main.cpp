// cylvar {solve|sweep|audit|onedim} --config <path> [--out <dir>] [--seed <int>]

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cylvar/app.hpp"

namespace {

int run_command(const std::string& command, const std::string& config_path, const std::string& out,
                std::optional<std::uint64_t> seed) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "configuration error: cannot read " << config_path << "\n";
    return cylvar::kExitConfig;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  // the subcommand supplies the command when the file leaves it out
  try {
    auto j = nlohmann::json::parse(text);
    if (j.is_object()) {
      if (!j.contains("command")) j["command"] = command;
      if (j["command"] != command) {
        std::cerr << "configuration error: " << config_path << " is a '" << j["command"].dump()
                  << "' configuration, not '" << command << "'\n";
        return cylvar::kExitConfig;
      }
      text = j.dump();
    }
  } catch (const nlohmann::json::parse_error&) {
    // reported by parse_config
  }

  cylvar::RunConfig cfg;
  try {
    cfg = cylvar::parse_config(text);
  } catch (const cylvar::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return cylvar::kExitConfig;
  }
  if (seed) cfg.seed = *seed;
  return cylvar::run(cfg, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimizers of convex integral functionals on long cylinders"};
  app.require_subcommand(1);

  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::string chosen;
  for (const char* name : {"solve", "sweep", "audit", "onedim"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON configuration file")->required();
    sub->add_option("--out", out, "output directory (overrides output.directory)");
    sub->add_option("--seed", seed, "random seed (overrides seed)");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cylvar::kExitConfig;
  }
  return run_command(chosen, config, out, seed);
}

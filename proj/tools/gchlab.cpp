// gchlab <kind> --config path [--out dir] [--seed n] [--threads n]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gchlab/gchlab.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical lab for a generalized Camassa-Holm equation"};
  std::string kind, config_path, out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("kind", kind, "experiment kind")
      ->required()
      ->check(CLI::IsMember(gchlab::experiment_kinds()));
  app.add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path);
  std::stringstream text;
  text << in.rdbuf();
  gchlab::ExperimentConfig cfg;
  try {
    cfg = gchlab::parse_config(text.str());
    if (cfg.kind().empty()) cfg.set("kind", kind);
    if (cfg.kind() != kind)
      throw gchlab::ConfigError("key 'kind': config says '" + cfg.kind() + "' but '" + kind + "' was requested");
    if (*seed_opt) cfg.set("seed", static_cast<std::int64_t>(seed));
  } catch (const gchlab::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    std::filesystem::create_directories(out_dir);
    gchlab::write_json(std::filesystem::path(out_dir) / "report.json",
                       {{"kind", kind}, {"status", "error"}, {"error_type", "config_error"}, {"message", e.what()}});
    return 2;
  }
  const int status = gchlab::run_experiment(cfg, out_dir, threads);
  std::cout << kind << ": " << (status == 0 ? "pass" : status == 1 ? "fail" : "error") << " (" << out_dir
            << "/report.json)\n";
  return status;
}

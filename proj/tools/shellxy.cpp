// shellxy: discrete XY model on triangulated closed surfaces.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "shellxy/error.hpp"
#include "shellxy/experiments.hpp"

using namespace shellxy;

int main(int argc, char** argv) {
  CLI::App app{"Discrete XY model on triangulated closed surfaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;

  struct Command {
    const char* name;
    const char* help;
    nlohmann::json (*run)(const ExperimentConfig&, const RunContext&);
  };
  const Command commands[] = {
      {"mesh", "Generate the configured meshes (OFF files)", run_mesh},
      {"validate", "Check hypotheses H1-H4 across the configured levels", run_validate},
      {"minimize", "Minimise the XY energy and write field, defects, energy and trace",
       run_minimize},
      {"defects", "Recompute defects and energy from an earlier minimize output", run_defects},
      {"scaling", "Minimum energy against |log eps| across levels", run_scaling},
      {"core-energy", "Dirichlet core energy in a ball across levels", run_core_energy},
      {"renorm", "Renormalized-energy partial sums and dyadic shells", run_renormalized},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    sub->add_option("--jobs", jobs, "Concurrent restarts or levels")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed (overrides the config)");
    sub->add_option("--checkpoint-every", checkpoint_every, "Write the field every N iterations")
        ->check(CLI::NonNegativeNumber);
    subs.emplace_back(sub, &c);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [sub, cmd] : subs) {
      if (!sub->parsed()) continue;
      ExperimentConfig cfg = load_config(config_path);
      if (sub->count("--seed")) cfg.set_seed(seed);
      if (!out_dir.empty()) cfg.set_output(out_dir);
      if (cfg.output.empty()) {
        throw Error(ErrorCode::ConfigError, "config field 'output' is required without --out");
      }
      RunContext ctx{cfg.output, jobs, checkpoint_every};
      const nlohmann::json report = cmd->run(cfg, ctx);
      std::cout << json_text(report);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "shellxy: %s\n", e.what());
    return 1;
  }
  return 0;
}

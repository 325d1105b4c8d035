#include <CLI11.hpp>

#include <iostream>

#include "bergman/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bergman kernels and zeros of random sections on the punctured disc"};
  app.require_subcommand(1);

  bergman::RunRequest req;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", req.config_path, "JSON config file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides the config)");
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads (output does not depend on it)")
                          ->check(CLI::NonNegativeNumber);
  auto* out_opt = run->add_option("--out", out, "Output directory for results.csv and summary.json");
  run->add_flag("--check", req.check, "Exit 2 when an acceptance check fails");

  bool as_json = false;
  auto* list = app.add_subcommand("list", "List experiment kinds");
  list->add_flag("--json", as_json, "Machine-readable listing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*list) {
    std::cout << (as_json ? bergman::list_experiments_json() : bergman::list_experiments_text());
    return 0;
  }
  if (*seed_opt) req.seed = seed;
  if (*threads_opt) req.threads = threads;
  if (*out_opt) req.out = out;
  return bergman::run_command(req, std::cout, std::cerr);
}

#include <omp.h>

#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "willis/solver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Willis elastodynamics: assembly, validation and first-order integration"};
  app.require_subcommand(1);
  std::string config;
  std::vector<std::string> suites;
  const char* names[] = {"validate", "assemble", "solve", "verify", "convergence"};
  const char* help[] = {"run tensor and boundary validators", "write assembled matrices at sample points",
                        "integrate a trajectory", "run verification suites", "run the manufactured refinement study"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("config", config, "configuration file")->required()->check(CLI::ExistingFile);
    if (std::string(names[i]) == "verify")
      sub->add_option("-s,--suite", suites, "suite name (repeatable); overrides [verify] suites");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    willis::RunConfig cfg = willis::load_config(config);
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "validate") return willis::cli::run_validate(cfg);
    if (cmd == "assemble") return willis::cli::run_assemble(cfg);
    if (cmd == "solve") return willis::cli::run_solve(cfg);
    if (cmd == "verify") return willis::cli::run_verify(cfg, suites);
    return willis::cli::run_convergence(cfg);
  } catch (const willis::ConfigError& e) {
    for (const auto& i : e.issues())
      std::cerr << "FAIL config: " << (i.line > 0 ? "line " + std::to_string(i.line) + ": " : "") << i.message << "\n";
    return 2;
  } catch (const willis::SingularA0Error& e) {
    std::cerr << "FAIL a0_definiteness: " << e.what() << "\n";
    return 2;
  } catch (const willis::InstabilityError& e) {
    std::cerr << "FAIL stability: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "FAIL error: " << e.what() << "\n";
    return 2;
  }
}

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  using namespace qmlab::cli;

  CLI::App app{"Semiclassical joint quasimode lab.", "qmlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qmlab 0.1.0");

  std::string config_path;
  CommandOptions opts;
  std::string output;
  int threads = 1;
  std::uint64_t seed = 0;

  for (const auto& spec : command_specs()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.summary);
    sub->add_option("-c,--config", config_path, "Config file (TOML subset)")->required();
    sub->add_option("-o,--output", output, "Write CSV / report here instead of stdout");
    sub->add_option("--threads", threads, "Worker threads (sweep)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Override the config seed");
    sub->footer(describe_keys(spec));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERROR " << kUsage << ": " << e.what() << '\n';
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--output") > 0) opts.output = output;
  if (sub->count("--seed") > 0) opts.seed = seed;
  opts.threads = threads;
  return run_cli_command(sub->get_name(), config_path, opts, std::cout, std::cerr);
}

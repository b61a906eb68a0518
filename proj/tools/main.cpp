// Command-line front end: simulate, merge, compare-oracle.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "fermibose/errors.hpp"
#include "fermibose/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 2, kNumerical = 3 };

}  // namespace

int main(int argc, char** argv) {
  using namespace fermibose;

  CLI::App app{"Atom-pair production from a dissociating molecular condensate"};
  app.require_subcommand(1);

  std::string config_path;
  std::string shard_dir;
  std::string oracle = "uniform";
  int threads = 0;
  std::size_t row_start = 0, row_end = 0;

  auto* sim = app.add_subcommand("simulate", "Run a configuration and write tables");
  sim->add_option("config", config_path, "YAML configuration")->required()->check(CLI::ExistingFile);
  auto* threads_opt = sim->add_option("--threads", threads, "Worker threads (0: all cores)");
  auto* start_opt = sim->add_option("--row-start", row_start, "First work row of this shard");
  auto* end_opt = sim->add_option("--row-end", row_end, "One past the last work row of this shard");

  auto* mrg = app.add_subcommand("merge", "Merge shard files in a directory");
  mrg->add_option("dir", shard_dir, "Directory holding shard_*.bin")->required()->check(CLI::ExistingDirectory);

  auto* cmp = app.add_subcommand("compare-oracle", "Compare a run against a closed-form reference");
  cmp->add_option("config", config_path, "YAML configuration")->required()->check(CLI::ExistingFile);
  cmp->add_option("--oracle", oracle, "uniform, golden_rule or cl_asymptote")->required();
  auto* cmp_threads = cmp->add_option("--threads", threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*sim) {
      RunOverrides ov;
      if (*threads_opt) ov.threads = threads;
      if (*start_opt) ov.row_start = row_start;
      if (*end_opt) ov.row_end = row_end;
      const auto s = simulate(config_path, ov);
      std::printf("%s %zu work rows in %.2f s -> %s\n", s.sharded ? "shard:" : "run:", s.work_rows,
                  s.wall_seconds, s.output_dir.string().c_str());
      return kOk;
    }
    if (*mrg) {
      const auto s = merge(shard_dir);
      std::printf("merged %zu work rows -> %s\n", s.work_rows, s.output_dir.string().c_str());
      return kOk;
    }
    if (*cmp) {
      RunOverrides ov;
      if (*cmp_threads) ov.threads = threads;
      const auto report = compare_oracle(config_path, parse_oracle(oracle), ov);
      write_report(std::cout, report);
      return report.pass() ? kOk : kNumerical;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}

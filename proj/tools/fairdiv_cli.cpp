#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fairdiv/acceptance.hpp"
#include "fairdiv/harness.hpp"
#include "fairdiv/instance.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create file: " + path);
  out << content;
  if (!out.good()) throw std::runtime_error("cannot write file: " + path);
}

int cmd_run(const std::string& config_path, int jobs) {
  const fairdiv::ExperimentConfig config =
      fairdiv::ExperimentConfig::from_json(read_file(config_path));
  fairdiv::RunStats stats;
  const std::vector<fairdiv::TrialResult> results =
      fairdiv::run(config, &stats, jobs);
  long long infeasible = 0;
  for (const fairdiv::TrialResult& r : results)
    if (!r.success) ++infeasible;
  std::cout << results.size() << " trial results (" << stats.executed
            << " computed, " << stats.cache_hits << " from cache, "
            << infeasible << " infeasible); cache at " << config.output_dir
            << "\n";
  return 0;
}

int cmd_verify(const std::string& scratch) {
  const std::vector<fairdiv::CriterionResult> results =
      fairdiv::run_acceptance(scratch);
  int passed = 0;
  for (const fairdiv::CriterionResult& r : results) {
    if (r.passed) ++passed;
    std::printf("criterion %2d %s (%.1fs) %s: %s\n", r.index,
                r.passed ? "PASS" : "FAIL", r.seconds, r.name.c_str(),
                r.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", passed, results.size());
  return passed == static_cast<int>(results.size()) ? 0 : 2;
}

int cmd_plotdata(const std::string& config_path, const std::string& metric,
                 const std::string& out_path) {
  const fairdiv::ExperimentConfig config =
      fairdiv::ExperimentConfig::from_json(read_file(config_path));
  const std::vector<fairdiv::TrialResult> results = fairdiv::run(config);
  fairdiv::emit_plot_data(results, metric, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_gen(int n, int m, const std::string& mode_name,
            const std::string& mixture_name, std::uint64_t seed,
            const std::string& out_path) {
  const fairdiv::Mode mode = fairdiv::parse_mode(mode_name);
  const auto name = fairdiv::FamilyMixture::parse_name(mixture_name);
  if (!name)
    throw std::invalid_argument("unknown mixture '" + mixture_name + "'");
  const fairdiv::Instance instance = fairdiv::Instance::generate(
      n, m, mode, fairdiv::FamilyMixture::preset(*name), seed);
  write_file(out_path, instance.to_json());
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair-division simulation engine"};
  app.require_subcommand(1);

  std::string run_config;
  int jobs = 1;
  CLI::App* run_cmd =
      app.add_subcommand("run", "Execute an experiment config, using the cache");
  run_cmd->add_option("--config", run_config, "experiment config (JSON)")
      ->required();
  run_cmd->add_option("--jobs", jobs, "worker threads over (m, trial) groups")
      ->check(CLI::PositiveNumber);

  std::string scratch =
      (std::filesystem::temp_directory_path() / "fairdiv-verify").string();
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the acceptance suite");
  verify_cmd->add_option("--scratch", scratch,
                         "scratch directory (wiped on start)");

  std::string plot_config, metric, out_csv;
  CLI::App* plot_cmd = app.add_subcommand(
      "plotdata", "Run (or reload) an experiment and aggregate one metric to CSV");
  plot_cmd->add_option("--config", plot_config, "experiment config (JSON)")
      ->required();
  plot_cmd->add_option("--metric", metric, "metric to aggregate")
      ->required()
      ->check(CLI::IsMember({"worst_envy_ratio", "fraction_envious",
                             "welfare_ratio", "success_rate"}));
  plot_cmd->add_option("--out", out_csv, "output CSV path")->required();

  int gen_n = 0, gen_m = 0;
  std::string gen_mode = "goods", gen_mixture = "uniform_only", gen_out;
  std::uint64_t gen_seed = 0;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Dump a single instance file");
  gen_cmd->add_option("--n", gen_n, "number of agents")->required();
  gen_cmd->add_option("--m", gen_m, "number of items")->required();
  gen_cmd->add_option("--mode", gen_mode, "goods or chores");
  gen_cmd->add_option("--mixture", gen_mixture, "distribution mixture name");
  gen_cmd->add_option("--seed", gen_seed, "generation seed");
  gen_cmd->add_option("--out", gen_out, "output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_config, jobs);
    if (verify_cmd->parsed()) return cmd_verify(scratch);
    if (plot_cmd->parsed()) return cmd_plotdata(plot_config, metric, out_csv);
    if (gen_cmd->parsed())
      return cmd_gen(gen_n, gen_m, gen_mode, gen_mixture, gen_seed, gen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

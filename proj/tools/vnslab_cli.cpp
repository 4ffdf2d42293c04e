#include <cstdio>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "vnslab/config.hpp"
#include "vnslab/errors.hpp"
#include "vnslab/harness.hpp"

using namespace vnslab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

void print_failures(const StudyResult& r) {
  for (const auto& f : r.failures) std::cerr << "failed: " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vnslab: particle / kinetic Navier-Stokes convergence experiments"};
  app.footer("Exit codes: 0 success, 2 config rejected, 3 solver failure.\n\nCSV columns\n" + csv_column_help());
  app.require_subcommand(1);

  std::string config_path, out_dir, mode = "plain";
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::uint64_t seed_offset = 0;
  long N = 0;
  std::uint64_t seed = 0;
  bool recompute = false, quiet = false;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output_dir in the config)");
    sub->add_option("--workers", workers, "worker threads for study cells")->check(CLI::PositiveNumber);
    sub->add_option("--seed-offset", seed_offset, "added to every configured seed");
    sub->add_flag("--quiet", quiet, "no progress lines");
  };

  auto* validate_cmd = app.add_subcommand("validate", "check a config against the modelling constraints");
  common(validate_cmd, true);
  auto* coupled_cmd = app.add_subcommand("run-coupled", "one particle run (N, seed)");
  common(coupled_cmd, true);
  coupled_cmd->add_option("--N", N, "particle count (default: first of N_schedule)");
  auto* seed_opt = coupled_cmd->add_option("--seed", seed, "seed before the offset (default: first configured seed)");
  auto* limit_cmd = app.add_subcommand("run-limit", "limit or auxiliary kinetic run");
  common(limit_cmd, true);
  limit_cmd->add_option("--mode", mode, "plain | auxiliary")->check(CLI::IsMember({"plain", "auxiliary"}));
  limit_cmd->add_option("--N", N, "N selecting sigma_N in auxiliary mode (default: first of N_schedule)");
  auto* conv_cmd = app.add_subcommand("convergence-study", "limit, auxiliary and particle runs over N_schedule x seeds, then errors and rates");
  common(conv_cmd, true);
  auto* chaos_cmd = app.add_subcommand("chaos-study", "particle runs with coupled limit particles, chaos errors only");
  common(chaos_cmd, true);
  auto* replot_cmd = app.add_subcommand("replot", "redraw plots of a study directory");
  common(replot_cmd, false);
  replot_cmd->add_flag("--recompute", recompute, "rebuild the CSVs from the stored snapshots first");

  CLI11_PARSE(app, argc, argv);

  Logger log;
  if (!quiet) log = [](const std::string& s) { std::cerr << s << "\n"; };

  try {
    if (replot_cmd->parsed()) {
      if (out_dir.empty()) throw ConfigError("replot needs --out DIR");
      const auto r = replot(out_dir, recompute, log);
      std::cout << "replotted " << out_dir << " (" << r.records.size() << " rows)\n";
      return 0;
    }

    auto cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    if (validate_cmd->parsed()) {
      const auto report = validate(cfg);
      std::cout << report.text();
      std::cout << (report.ok() ? "config ok\n" : "config rejected\n");
      return report.ok() ? 0 : kExitConfig;
    }
    require_valid(cfg);
    RunOptions opt{workers, seed_offset, cfg.output_dir, log};

    if (coupled_cmd->parsed()) {
      const long n = N > 0 ? N : cfg.N_schedule.front();
      const std::uint64_t s = (seed_opt->count() > 0 ? seed : cfg.seeds.front()) + seed_offset;
      const auto run = run_coupled(cfg, n, s, cfg.output_dir);
      std::cout << "run-coupled N=" << n << " seed=" << s << " sigma_N=" << run.sigma_N << " steps=" << run.fluid.u.size() - 1
                << " wall=" << run.wall_seconds << "s -> " << cfg.output_dir << "\n";
      return 0;
    }
    if (limit_cmd->parsed()) {
      const long n = N > 0 ? N : cfg.N_schedule.front();
      const auto m = mode == "plain" ? LimitMode::Plain : LimitMode::Auxiliary;
      const auto run = run_limit(cfg, m, n, cfg.output_dir, false);
      for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "run-limit " << mode << " steps=" << run.fluid.u.size() - 1 << " wall=" << run.wall_seconds << "s -> "
                << cfg.output_dir << "\n";
      return 0;
    }
    if (conv_cmd->parsed()) {
      const auto r = convergence_study(cfg, opt);
      print_failures(r);
      std::cout << r.summary_csv << "\n" << r.rates_csv;
      return r.failures.empty() ? 0 : kExitSolver;
    }
    if (chaos_cmd->parsed()) {
      const auto r = chaos_study(cfg, opt);
      print_failures(r);
      std::cout << r.chaos_csv;
      return r.failures.empty() ? 0 : kExitSolver;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const MetricError& e) {
    std::cerr << "metric error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

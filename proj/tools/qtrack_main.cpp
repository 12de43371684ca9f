// qtrack: queueing-trace transaction-tracking simulator and
// instrumentation-allocation planner.
//
// Subcommands: simulate, accuracy, allocate, verify, experiment {fig5|fig6}.
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qtrack/errors.hpp"
#include "qtrack/experiment.hpp"
#include "qtrack/version.hpp"

namespace {

struct GlobalFlags {
  std::string config_path;
  std::string out_dir;
  std::string format = "csv";
  long long seed = -1;  // -1: keep the config's seed
  int jobs = 0;         // 0: keep the config's jobs
};

void add_common_flags(CLI::App* cmd, GlobalFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config_path,
                              "JSON experiment configuration");
  if (config_required) opt->required();
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "master seed (overrides the config)");
  cmd->add_option("--jobs", flags.jobs, "worker threads");
  cmd->add_option("--format", flags.format, "output format")
      ->check(CLI::IsMember({"csv"}));
}

qtrack::ExperimentConfig effective_config(const GlobalFlags& flags,
                                          qtrack::ExperimentKind fallback) {
  qtrack::ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = qtrack::load_config(flags.config_path);
  } else {
    cfg.kind = fallback;
    qtrack::refresh_config_identity(cfg);
  }
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.jobs > 0) cfg.jobs = flags.jobs;
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  qtrack::refresh_config_identity(cfg);
  return cfg;
}

void require_kind(const qtrack::ExperimentConfig& cfg,
                  qtrack::ExperimentKind kind) {
  if (cfg.kind != kind)
    throw qtrack::ConfigError(
        std::string("this subcommand needs a '") +
            qtrack::experiment_kind_name(kind) + "' config, got '" +
            qtrack::experiment_kind_name(cfg.kind) + "'",
        "/kind");
}

void report_outputs(const std::vector<std::string>& outputs) {
  for (const std::string& path : outputs) std::cout << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"queueing transaction-tracking simulator and "
               "instrumentation-allocation planner"};
  app.set_version_flag("--version", qtrack::kVersion);
  app.require_subcommand(1);

  GlobalFlags sim_flags, acc_flags, alloc_flags, verify_flags, exp_flags;

  auto* sim = app.add_subcommand("simulate", "generate a trace with ground truth");
  add_common_flags(sim, sim_flags, true);

  auto* acc = app.add_subcommand("accuracy", "estimate tracking accuracy");
  add_common_flags(acc, acc_flags, true);

  auto* alloc = app.add_subcommand("allocate",
                                   "compare instrumentation strategies");
  add_common_flags(alloc, alloc_flags, true);

  auto* verify = app.add_subcommand(
      "verify", "check stochastic-order optimality certificates");
  add_common_flags(verify, verify_flags, false);

  auto* exp = app.add_subcommand("experiment", "run an experiment suite");
  std::string which;
  exp->add_option("suite", which, "fig5 or fig6")
      ->required()
      ->check(CLI::IsMember({"fig5", "fig6"}));
  add_common_flags(exp, exp_flags, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      auto cfg = effective_config(sim_flags, qtrack::ExperimentKind::Custom);
      require_kind(cfg, qtrack::ExperimentKind::Custom);
      report_outputs(qtrack::run_simulate(cfg));
    } else if (*acc) {
      auto cfg = effective_config(acc_flags, qtrack::ExperimentKind::Custom);
      require_kind(cfg, qtrack::ExperimentKind::Custom);
      report_outputs(qtrack::run_accuracy(cfg));
    } else if (*alloc) {
      auto cfg = effective_config(alloc_flags, qtrack::ExperimentKind::Custom);
      require_kind(cfg, qtrack::ExperimentKind::Custom);
      report_outputs(qtrack::run_allocate(cfg));
    } else if (*verify) {
      auto cfg =
          effective_config(verify_flags, qtrack::ExperimentKind::VerifyOrder);
      require_kind(cfg, qtrack::ExperimentKind::VerifyOrder);
      const auto result = qtrack::run_verify(cfg);
      for (const auto& entry : result.entries)
        std::cout << qtrack::format_certification_report(entry.report);
      report_outputs(result.outputs);
    } else if (*exp) {
      const auto kind = which == "fig5" ? qtrack::ExperimentKind::Fig5
                                        : qtrack::ExperimentKind::Fig6;
      auto cfg = effective_config(exp_flags, kind);
      require_kind(cfg, kind);
      if (kind == qtrack::ExperimentKind::Fig5)
        report_outputs(qtrack::run_fig5(cfg).outputs);
      else
        report_outputs(qtrack::run_fig6(cfg).outputs);
    }
  } catch (const qtrack::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

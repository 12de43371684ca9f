#include "qtrack/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "qtrack/csv.hpp"
#include "qtrack/errors.hpp"
#include "qtrack/parallel.hpp"
#include "qtrack/version.hpp"

namespace qtrack {

namespace fs = std::filesystem;

double weibull_scale_for_rate(double shape, double rate) {
  return 1.0 / (rate * std::tgamma(1.0 + 1.0 / shape));
}

Distribution fig5_service(double shape, double rate) {
  if (shape == 1.0) return Distribution::exponential(rate);
  return Distribution::weibull(shape, weibull_scale_for_rate(shape, rate));
}

namespace {

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

void write_manifest(const ExperimentConfig& cfg, const std::string& kind,
                    const std::vector<std::string>& outputs,
                    double wall_seconds, const std::string& notes) {
  nlohmann::json j;
  j["kind"] = kind;
  j["config_hash"] = cfg.config_hash;
  j["seed"] = cfg.seed;
  j["version"] = kVersion;
  j["wall_time_s"] = wall_seconds;
  j["outputs"] = outputs;
  j["config"] = nlohmann::json::parse(cfg.canonical);
  if (!notes.empty()) j["notes"] = notes;
  std::ofstream out(out_path(cfg, kind + "_manifest.json"));
  out << j.dump(2) << "\n";
}

Fig5Result run_fig5(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Fig5Config& f = cfg.fig5;
  const long n_shapes = static_cast<long>(f.shapes.size());
  const long n_rates = static_cast<long>(f.service_rates.size());

  Fig5Result result;
  result.cells.resize(n_shapes * n_rates);
  parallel_for(n_shapes * n_rates, cfg.jobs, [&](long t) {
    const long si = t / n_rates;
    const long ri = t % n_rates;
    Fig5Cell& cell = result.cells[t];
    cell.shape = f.shapes[si];
    cell.service_rate = f.service_rates[ri];
    const QueueSpec q =
        make_queue(Distribution::exponential(f.arrival_rate),
                   fig5_service(cell.shape, cell.service_rate));
    cell.estimates = evaluate_policies(q, f.policies, f.transactions, f.runs,
                                       derive_seed(cfg.seed, si, ri));
    cell.unit_batch = unit_batch_prob(q);
  });

  const std::string acc_path = out_path(cfg, "fig5_accuracy.csv");
  {
    CsvWriter csv(acc_path);
    csv.row("config_hash", "seed", "shape", "service_rate", "policy",
            "estimate", "stderr", "periods", "oversized", "unit_batch",
            "unit_batch_method");
    for (const Fig5Cell& cell : result.cells) {
      for (const AccuracyEstimate& est : cell.estimates) {
        csv.row(cfg.config_hash, cfg.seed, cell.shape, cell.service_rate,
                policy_name(est.policy), est.point, est.standard_error,
                est.periods, est.oversized, cell.unit_batch.value,
                cell.unit_batch.method_name());
      }
    }
  }

  const std::string plot_path = out_path(cfg, "fig5_plot.csv");
  {
    CsvWriter csv(plot_path);
    csv.row("config_hash", "seed", "shape", "service_rate", "fifo",
            "fifo_stderr", "random", "random_stderr", "ml", "ml_stderr",
            "unit_batch");
    for (const Fig5Cell& cell : result.cells) {
      std::string col[6];
      for (const AccuracyEstimate& est : cell.estimates) {
        const int base = est.policy == Policy::Fifo     ? 0
                         : est.policy == Policy::Random ? 2
                                                        : 4;
        col[base] = format_double(est.point);
        col[base + 1] = format_double(est.standard_error);
      }
      csv.row(cfg.config_hash, cfg.seed, cell.shape, cell.service_rate,
              col[0], col[1], col[2], col[3], col[4], col[5],
              cell.unit_batch.value);
    }
  }

  result.outputs = {acc_path, plot_path};
  write_manifest(cfg, "fig5", result.outputs, elapsed_seconds(start),
                 "service-rate grid default 0.5..5.0 step 0.5; scale chosen "
                 "so the mean service time is 1/rate at fixed shape");
  return result;
}

Fig6Result run_fig6(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Fig6Config& f = cfg.fig6;
  const long n_tmax = static_cast<long>(f.t_max.size());
  const long n_cells = n_tmax * f.configurations;

  Fig6Result result;
  result.cells.resize(n_cells);
  parallel_for(n_cells, cfg.jobs, [&](long t) {
    const long ti = t / f.configurations;
    const long ci = t % f.configurations;
    Fig6Cell& cell = result.cells[t];
    cell.tmax_index = static_cast<int>(ti);
    cell.config_index = static_cast<int>(ci);

    const std::uint64_t cfg_seed = derive_seed(cfg.seed, ti, ci);
    RandomSource roster_rng(cfg_seed);

    AllocationProblem problem;
    problem.budget = f.budget;
    std::vector<AccuracyEstimate> accuracies;
    for (int k = 0; k < f.n_queues; ++k) {
      const double mu = f.service_rate_min +
                        (f.t_max[ti] - f.service_rate_min) *
                            roster_rng.uniform01();
      const double w =
          f.shape_min + (f.shape_max - f.shape_min) * roster_rng.uniform01();
      QueueEntry entry;
      entry.id = "q" + std::to_string(k + 1);
      entry.spec = make_queue(
          Distribution::exponential(f.arrival_rate),
          Distribution::weibull(w, weibull_scale_for_rate(w, mu)));
      problem.queues.push_back(std::move(entry));
    }
    for (int k = 0; k < f.n_queues; ++k) {
      accuracies.push_back(estimate_accuracy(problem.queues[k].spec, f.policy,
                                             f.transactions, f.runs,
                                             derive_seed(cfg_seed, 50, k)));
    }
    problem.accuracies = std::move(accuracies);

    const AllocationResult optimal = optimal_allocation(problem);
    const AllocationResult unit_batch = unit_batch_allocation(problem);
    const AllocationResult load_factor = load_factor_allocation(problem);
    const AllocationResult random =
        random_allocation(problem, derive_seed(cfg_seed, 99));

    for (const AllocationResult* r :
         {&optimal, &unit_batch, &load_factor, &random}) {
      Fig6StrategyOutcome o;
      o.name = r->strategy;
      o.objective = r->objective;
      o.ratio_to_optimal = r->objective / optimal.objective;
      o.overlap_with_optimal = overlap_fraction(*r, optimal);
      o.selected = r->selected_indices();
      cell.strategies.push_back(std::move(o));
    }
  });

  const std::string cfg_path = out_path(cfg, "fig6_configs.csv");
  {
    CsvWriter csv(cfg_path);
    csv.row("config_hash", "seed", "t_max", "config_index", "strategy",
            "objective", "ratio_to_optimal", "overlap_with_optimal",
            "selected");
    for (const Fig6Cell& cell : result.cells) {
      for (const Fig6StrategyOutcome& s : cell.strategies) {
        std::string sel;
        for (int k : s.selected) {
          if (!sel.empty()) sel += ';';
          sel += std::to_string(k + 1);
        }
        csv.row(cfg.config_hash, cfg.seed, f.t_max[cell.tmax_index],
                cell.config_index, s.name, s.objective, s.ratio_to_optimal,
                s.overlap_with_optimal, sel);
      }
    }
  }

  const std::string sum_path = out_path(cfg, "fig6_summary.csv");
  {
    CsvWriter csv(sum_path);
    csv.row("config_hash", "seed", "t_max", "strategy", "mean_objective",
            "stderr_objective", "mean_ratio", "mean_overlap");
    const std::vector<std::string> names{"optimal", "unit-batch",
                                         "load-factor", "random"};
    for (long ti = 0; ti < n_tmax; ++ti) {
      for (std::size_t s = 0; s < names.size(); ++s) {
        double sum = 0, ssq = 0, ratio = 0, overlap = 0;
        long n = 0;
        for (const Fig6Cell& cell : result.cells) {
          if (cell.tmax_index != ti) continue;
          const double v = cell.strategies[s].objective;
          sum += v;
          ssq += v * v;
          ratio += cell.strategies[s].ratio_to_optimal;
          overlap += cell.strategies[s].overlap_with_optimal;
          ++n;
        }
        const double mean = sum / n;
        const double var = std::max(0.0, ssq / n - mean * mean);
        csv.row(cfg.config_hash, cfg.seed, f.t_max[ti], names[s], mean,
                std::sqrt(var / n), ratio / n, overlap / n);
      }
    }
  }

  result.outputs = {cfg_path, sum_path};
  write_manifest(cfg, "fig6", result.outputs, elapsed_seconds(start), "");
  return result;
}

std::vector<PairDef> default_verify_roster() {
  const auto poisson1 = Distribution::exponential(1.0);
  std::vector<PairDef> pairs;

  // Same-family exponential services with separated rates (Corollary 1).
  pairs.push_back({{"mm-mu1", make_queue(poisson1, Distribution::exponential(1.0))},
                   {"mm-mu2", make_queue(poisson1, Distribution::exponential(2.0))},
                   Policy::Fifo});
  // Deterministic vs uniform with a violated support condition: the
  // counterexample where the load-factor ranking points the wrong way.
  pairs.push_back(
      {{"det-1.2", make_queue(poisson1, Distribution::deterministic(1.2))},
       {"unif-0-2", make_queue(poisson1, Distribution::uniform(0.0, 2.0))},
       Policy::Random});
  // Deterministic vs exponential at equal mean: convex-order instance.
  pairs.push_back(
      {{"det-1", make_queue(poisson1, Distribution::deterministic(1.0))},
       {"exp-1", make_queue(poisson1, Distribution::exponential(1.0))},
       Policy::Fifo});
  // Same-scale Weibulls with shapes 2 and 8: the ccdfs cross at the scale,
  // so no usual stochastic order holds; surfaced honestly.
  pairs.push_back(
      {{"weib-2", make_queue(poisson1, Distribution::weibull(2.0, 1.0))},
       {"weib-8", make_queue(poisson1, Distribution::weibull(8.0, 1.0))},
       Policy::Fifo});
  // Identical queues: orderings degenerate to equality.
  pairs.push_back({{"mm-a", make_queue(poisson1, Distribution::exponential(1.0))},
                   {"mm-b", make_queue(poisson1, Distribution::exponential(1.0))},
                   Policy::Fifo});
  // Processor-sharing pair with stochastically ordered job lengths.
  pairs.push_back(
      {{"ps-0.8",
        make_queue(poisson1, Distribution::exponential(1.0 / 0.8),
                   Discipline::ProcessorSharing)},
       {"ps-0.4",
        make_queue(poisson1, Distribution::exponential(1.0 / 0.4),
                   Discipline::ProcessorSharing)},
       Policy::Random});
  // Product-form pair: processor sharing vs infinite server.
  pairs.push_back(
      {{"ps-0.8b",
        make_queue(poisson1, Distribution::exponential(1.0 / 0.8),
                   Discipline::ProcessorSharing)},
       {"is-0.4", make_queue(poisson1, Distribution::exponential(1.0 / 0.4))},
       Policy::Random});
  return pairs;
}

VerifyResult run_verify(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<PairDef> pairs =
      cfg.verify.pairs.empty() ? default_verify_roster() : cfg.verify.pairs;

  VerifyResult result;
  result.entries.resize(pairs.size());
  OrderingOptions opt;
  opt.order_samples = cfg.verify.order_samples;
  opt.transactions = cfg.verify.transactions;
  opt.runs = cfg.verify.runs;
  parallel_for(static_cast<long>(pairs.size()), cfg.jobs, [&](long i) {
    const PairDef& p = pairs[i];
    VerifyEntry& entry = result.entries[i];
    entry.pair_id = p.a.id + "|" + p.b.id;
    entry.report = certify_heuristic_optimality(
        p.a.spec, p.b.spec, p.policy, derive_seed(cfg.seed, 900, i), opt);
  });

  const std::string cert_path = out_path(cfg, "verify_certificates.csv");
  {
    CsvWriter csv(cert_path);
    csv.row("config_hash", "seed", "pair", "policy", "theorem",
            "preconditions", "certified", "prediction", "acc_a", "acc_b",
            "stderr_joint", "confirmation");
    for (const VerifyEntry& entry : result.entries) {
      const CertificationReport& r = entry.report;
      for (const TheoremCertificate& c : r.certificates) {
        std::string pre;
        for (const PreconditionCheck& pc : c.preconditions) {
          if (!pre.empty()) pre += "; ";
          pre += pc.name + "=" + pc.verdict;
        }
        std::string confirmation = "not-measured";
        if (r.measured.available && c.certified && c.policy == r.policy) {
          const double diff = r.measured.acc_a - r.measured.acc_b;
          const double slack = 2.0 * r.measured.stderr_joint;
          const bool ok = c.predicted_sign < 0   ? diff <= slack
                          : c.predicted_sign > 0 ? diff >= -slack
                                                 : std::fabs(diff) <= slack;
          confirmation = ok ? "consistent" : "contradicted";
        }
        csv.row(cfg.config_hash, cfg.seed, entry.pair_id,
                policy_name(r.policy), c.theorem, pre, c.certified ? 1 : 0,
                c.prediction, r.measured.acc_a, r.measured.acc_b,
                r.measured.stderr_joint, confirmation);
      }
    }
  }

  result.outputs = {cert_path};
  write_manifest(cfg, "verify", result.outputs, elapsed_seconds(start), "");
  return result;
}

std::vector<std::string> run_simulate(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.custom.queues.empty())
    throw ConfigError("simulate requires a custom config with queues", "");
  const QueueDef& q = cfg.custom.queues.front();
  const Trace trace =
      simulate(q.spec, cfg.custom.transactions, derive_seed(cfg.seed, 0));
  const std::string path = out_path(cfg, "trace.csv");
  write_trace_csv(trace, path, cfg.config_hash, cfg.seed);
  write_manifest(cfg, "simulate", {path}, elapsed_seconds(start), "");
  return {path};
}

std::vector<std::string> run_accuracy(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.custom.queues.empty())
    throw ConfigError("accuracy requires a custom config with queues", "");
  std::vector<std::pair<std::string, AccuracyEstimate>> entries;
  const long n_tasks = static_cast<long>(cfg.custom.queues.size());
  std::vector<std::vector<AccuracyEstimate>> per_queue(n_tasks);
  parallel_for(n_tasks, cfg.jobs, [&](long i) {
    per_queue[i] = evaluate_policies(
        cfg.custom.queues[i].spec, cfg.custom.policies,
        cfg.custom.transactions, cfg.custom.runs, derive_seed(cfg.seed, i));
  });
  for (long i = 0; i < n_tasks; ++i)
    for (const AccuracyEstimate& est : per_queue[i])
      entries.emplace_back(cfg.custom.queues[i].id, est);
  const std::string path = out_path(cfg, "accuracy.csv");
  write_accuracy_csv(path, cfg.config_hash, cfg.seed, entries);
  write_manifest(cfg, "accuracy", {path}, elapsed_seconds(start),
                 "pooling: period-weighted across runs; stderr from "
                 "between-run variance");
  return {path};
}

std::vector<std::string> run_allocate(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.custom.queues.empty())
    throw ConfigError("allocate requires a custom config with queues", "");
  const Policy policy = cfg.custom.policies.front();

  AllocationProblem problem;
  problem.budget = cfg.custom.budget;
  for (const QueueDef& q : cfg.custom.queues) problem.queues.push_back({q.id, q.spec});
  const long n_tasks = static_cast<long>(cfg.custom.queues.size());
  std::vector<AccuracyEstimate> accuracies(n_tasks);
  parallel_for(n_tasks, cfg.jobs, [&](long i) {
    accuracies[i] =
        estimate_accuracy(cfg.custom.queues[i].spec, policy,
                          cfg.custom.transactions, cfg.custom.runs,
                          derive_seed(cfg.seed, i));
  });
  problem.accuracies = std::move(accuracies);

  const AllocationResult optimal = optimal_allocation(problem);
  std::vector<AllocationResult> results{
      optimal, unit_batch_allocation(problem), load_factor_allocation(problem),
      random_allocation(problem, derive_seed(cfg.seed, 99))};
  const std::string path = out_path(cfg, "allocation.csv");
  write_allocation_csv(path, cfg.config_hash, cfg.seed, problem, results,
                       optimal);
  write_manifest(cfg, "allocate", {path}, elapsed_seconds(start), "");
  return {path};
}

}  // namespace qtrack

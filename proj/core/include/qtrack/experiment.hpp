#ifndef QTRACK_EXPERIMENT_HPP
#define QTRACK_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "qtrack/allocation.hpp"
#include "qtrack/config.hpp"
#include "qtrack/ordering.hpp"

namespace qtrack {

// One grid point of the single-queue policy comparison.
struct Fig5Cell {
  double shape = 0.0;
  double service_rate = 0.0;
  std::vector<AccuracyEstimate> estimates;  // aligned with config policies
  UnitBatchProb unit_batch;
};

struct Fig5Result {
  std::vector<Fig5Cell> cells;  // shapes-major, rates-minor
  std::vector<std::string> outputs;
};

// One sampled roster under one maximum service rate.
struct Fig6StrategyOutcome {
  std::string name;
  double objective = 0.0;
  double ratio_to_optimal = 0.0;
  double overlap_with_optimal = 0.0;
  std::vector<int> selected;
};

struct Fig6Cell {
  int tmax_index = 0;
  int config_index = 0;
  // optimal, unit-batch, load-factor, random (fixed order)
  std::vector<Fig6StrategyOutcome> strategies;
};

struct Fig6Result {
  std::vector<Fig6Cell> cells;
  std::vector<std::string> outputs;
};

struct VerifyEntry {
  std::string pair_id;
  CertificationReport report;
};

struct VerifyResult {
  std::vector<VerifyEntry> entries;
  std::vector<std::string> outputs;
};

Fig5Result run_fig5(const ExperimentConfig& cfg);
Fig6Result run_fig6(const ExperimentConfig& cfg);
VerifyResult run_verify(const ExperimentConfig& cfg);

// Trace/accuracy/allocation runs driven by a `custom` config.
std::vector<std::string> run_simulate(const ExperimentConfig& cfg);
std::vector<std::string> run_accuracy(const ExperimentConfig& cfg);
std::vector<std::string> run_allocate(const ExperimentConfig& cfg);

// The paper instances exercised by the `verify` subcommand when the config
// names no pairs.
std::vector<PairDef> default_verify_roster();

// Weibull scale such that the mean service time is 1/rate at the given
// shape.
double weibull_scale_for_rate(double shape, double rate);

// Builds the fig5 service law for one panel/grid point (shape 1 is the
// exponential distribution).
Distribution fig5_service(double shape, double rate);

void write_manifest(const ExperimentConfig& cfg, const std::string& kind,
                    const std::vector<std::string>& outputs,
                    double wall_seconds, const std::string& notes);

}  // namespace qtrack

#endif  // QTRACK_EXPERIMENT_HPP

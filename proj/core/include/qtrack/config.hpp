#ifndef QTRACK_CONFIG_HPP
#define QTRACK_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qtrack/accuracy.hpp"
#include "qtrack/queue_sim.hpp"

namespace qtrack {

enum class ExperimentKind { Fig5, Fig6, VerifyOrder, Custom };

const char* experiment_kind_name(ExperimentKind k);

struct QueueDef {
  std::string id;
  QueueSpec spec;
};

struct PairDef {
  QueueDef a;
  QueueDef b;
  Policy policy = Policy::Fifo;
};

// Single-queue policy comparison over a service-rate sweep (three Weibull
// shape panels by default).
struct Fig5Config {
  std::vector<double> shapes{1.0, 1.5, 0.5};
  double arrival_rate = 1.0;
  std::vector<double> service_rates{0.5, 1.0, 1.5, 2.0, 2.5,
                                    3.0, 3.5, 4.0, 4.5, 5.0};
  long transactions = 1000;
  int runs = 10;
  std::vector<Policy> policies{Policy::Fifo, Policy::Random, Policy::Ml};
};

// Allocation-strategy comparison over random queue rosters.
struct Fig6Config {
  int n_queues = 10;
  int budget = 2;
  int configurations = 200;  // desk-scale default
  std::vector<double> t_max{1.0, 2.0, 4.0, 8.0};
  double service_rate_min = 0.5;
  double shape_min = 0.1;
  double shape_max = 2.0;
  double arrival_rate = 1.0;
  long transactions = 1000;
  int runs = 10;
  Policy policy = Policy::Fifo;
};

struct VerifyConfig {
  std::vector<PairDef> pairs;  // empty -> built-in roster
  long transactions = 1000;
  int runs = 10;
  long order_samples = 100000;
};

struct CustomConfig {
  std::vector<QueueDef> queues;
  long transactions = 1000;
  int runs = 10;
  std::vector<Policy> policies{Policy::Fifo};
  int budget = 0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Fig5;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out_dir = "out";

  Fig5Config fig5;
  Fig6Config fig6;
  VerifyConfig verify;
  CustomConfig custom;

  // Canonical serialized form of the effective config (defaults applied),
  // and its FNV-1a hash; stamped on every emitted CSV row.
  std::string canonical;
  std::string config_hash;
};

// Parses and validates a JSON config file. Unknown keys are rejected;
// errors carry a JSON-pointer-style location.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Recomputes the canonical form and hash (after CLI overrides).
void refresh_config_identity(ExperimentConfig& cfg);

std::string config_hash_hex(const std::string& canonical);

// Distribution literal form used in config files, e.g.
// {"kind":"weibull","shape":1.5,"scale":1.0}.
std::string distribution_to_json_text(const Distribution& d);

}  // namespace qtrack

#endif  // QTRACK_CONFIG_HPP

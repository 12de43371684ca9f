#ifndef QTRACK_QUEUE_SIM_HPP
#define QTRACK_QUEUE_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qtrack/distribution.hpp"

namespace qtrack {

enum class Discipline { InfiniteServer, ProcessorSharing };

// A single queue: renewal arrivals plus either infinite-server service or
// egalitarian processor sharing (total rate 1 split over residents).
struct QueueSpec {
  Distribution arrival;  // inter-arrival law
  Distribution service;  // service times (IS) or job lengths (PS)
  Discipline discipline = Discipline::InfiniteServer;

  double arrival_rate() const { return 1.0 / arrival.mean(); }
  double service_rate() const { return 1.0 / service.mean(); }
  double load_factor() const { return service.mean() / arrival.mean(); }
};

// Validates the spec; processor sharing requires load factor < 1.
QueueSpec make_queue(Distribution arrival, Distribution service,
                     Discipline discipline = Discipline::InfiniteServer);

// Timestamped trace with ground truth. Arrival and departure epochs are
// sorted; true_matching[i] is the rank (0-based) of transaction i's
// departure, so departures[true_matching[i]] - arrivals[i] == durations[i].
struct Trace {
  std::vector<double> arrivals;
  std::vector<double> departures;
  std::vector<std::int32_t> true_matching;
  std::vector<double> durations;    // realized service (IS) / sojourn (PS)
  std::vector<double> job_lengths;  // sampled requirement; == durations for IS
  Discipline discipline = Discipline::InfiniteServer;

  std::size_t size() const { return arrivals.size(); }
};

// A maximal trace segment between empty-system epochs, re-indexed locally.
struct BusyPeriod {
  std::vector<double> arrivals;
  std::vector<double> departures;
  std::vector<std::int32_t> true_matching;
  int first_index = 0;       // global index of the first arrival
  double next_arrival = std::numeric_limits<double>::infinity();

  int size() const { return static_cast<int>(arrivals.size()); }
};

Trace simulate_infinite_server(const QueueSpec& spec, long transactions,
                               std::uint64_t seed);
Trace simulate_processor_sharing(const QueueSpec& spec, long transactions,
                                 std::uint64_t seed);
Trace simulate(const QueueSpec& spec, long transactions, std::uint64_t seed);

// Egalitarian processor-sharing event loop on explicit arrivals and job
// lengths: between events each of the k resident jobs depletes at rate 1/k.
// Returns per-job departure epochs.
std::vector<double> processor_sharing_departures(
    const std::vector<double>& arrivals, const std::vector<double>& lengths);

// Decomposes a trace by exact occupancy counting. Departures are processed
// before arrivals at equal timestamps, so a queue that empties exactly when
// the next transaction arrives ends its busy period there.
std::vector<BusyPeriod> busy_periods(const Trace& trace);

// Busy-period sizes of a simulated run; the trailing (possibly incomplete)
// period is dropped when requested.
std::vector<int> busy_period_sizes(const Trace& trace, bool drop_trailing);

// CSV export: index, arrival_time, departure_rank, departure_time, duration,
// busy_period_id (1-based ranks/ids).
void write_trace_csv(const Trace& trace, const std::string& path,
                     const std::string& config_hash, std::uint64_t seed);

}  // namespace qtrack

#endif  // QTRACK_QUEUE_SIM_HPP

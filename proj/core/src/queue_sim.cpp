#include "qtrack/queue_sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qtrack/csv.hpp"
#include "qtrack/errors.hpp"

namespace qtrack {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> draw_arrival_times(const Distribution& arrival, long n,
                                       RandomSource& rng) {
  std::vector<double> times(n);
  double t = 0.0;
  for (long i = 0; i < n; ++i) {
    t += arrival.sample(rng);
    times[i] = t;
  }
  return times;
}

// Sorts departure epochs and derives the true matching. Ties (measure zero
// under continuous laws, possible with deterministic services) are broken
// by arrival index so the ground truth is well-defined.
void finalize_departures(Trace& trace, const std::vector<double>& depart_epochs) {
  const long n = static_cast<long>(depart_epochs.size());
  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    if (depart_epochs[a] != depart_epochs[b])
      return depart_epochs[a] < depart_epochs[b];
    return a < b;
  });
  trace.departures.resize(n);
  trace.true_matching.resize(n);
  for (long r = 0; r < n; ++r) {
    trace.departures[r] = depart_epochs[order[r]];
    trace.true_matching[order[r]] = static_cast<std::int32_t>(r);
  }
}
}  // namespace

QueueSpec make_queue(Distribution arrival, Distribution service,
                     Discipline discipline) {
  QueueSpec q{std::move(arrival), std::move(service), discipline};
  if (!(q.load_factor() > 0))
    throw std::invalid_argument("queue: load factor must be positive");
  if (discipline == Discipline::ProcessorSharing && !(q.load_factor() < 1.0))
    throw std::invalid_argument(
        "processor sharing requires load factor < 1 for stability");
  return q;
}

Trace simulate_infinite_server(const QueueSpec& spec, long transactions,
                               std::uint64_t seed) {
  if (spec.discipline != Discipline::InfiniteServer)
    throw std::invalid_argument("simulate_infinite_server: wrong discipline");
  if (transactions < 1)
    throw std::invalid_argument("simulate: need at least one transaction");

  RandomSource rng(seed);
  Trace trace;
  trace.discipline = Discipline::InfiniteServer;
  trace.arrivals = draw_arrival_times(spec.arrival, transactions, rng);
  trace.job_lengths.resize(transactions);
  std::vector<double> depart(transactions);
  for (long i = 0; i < transactions; ++i) {
    trace.job_lengths[i] = spec.service.sample(rng);
    depart[i] = trace.arrivals[i] + trace.job_lengths[i];
  }
  finalize_departures(trace, depart);
  trace.durations = trace.job_lengths;  // realized service == sampled draw
  return trace;
}

std::vector<double> processor_sharing_departures(
    const std::vector<double>& arrivals, const std::vector<double>& lengths) {
  const long n = static_cast<long>(arrivals.size());
  if (lengths.size() != arrivals.size())
    throw std::invalid_argument("processor sharing: size mismatch");
  std::vector<double> depart(n);

  // Virtual-time formulation: v advances at rate 1/k, and a job departs
  // when v reaches its arrival value plus its length. One accumulator per
  // busy period keeps the rounding drift independent of the trace length.
  struct Resident {
    long index;
    double target;  // v value at which the job completes
  };
  std::vector<Resident> resident;
  double now = 0.0, v = 0.0;
  long next = 0;
  while (next < n || !resident.empty()) {
    if (resident.empty()) {
      now = arrivals[next];
      v = 0.0;
      resident.push_back({next, lengths[next]});
      ++next;
      continue;
    }
    std::size_t m = 0;
    for (std::size_t i = 1; i < resident.size(); ++i) {
      if (resident[i].target < resident[m].target ||
          (resident[i].target == resident[m].target &&
           resident[i].index < resident[m].index))
        m = i;
    }
    const double k = static_cast<double>(resident.size());
    const double t_complete = now + (resident[m].target - v) * k;
    const double t_arrival =
        next < n ? arrivals[next] : kInf;
    if (t_arrival <= t_complete) {
      v += (t_arrival - now) / k;
      now = t_arrival;
      resident.push_back({next, v + lengths[next]});
      ++next;
    } else {
      now = t_complete;
      v = resident[m].target;
      depart[resident[m].index] = now;
      resident.erase(resident.begin() + m);
    }
  }
  return depart;
}

Trace simulate_processor_sharing(const QueueSpec& spec, long transactions,
                                 std::uint64_t seed) {
  if (spec.discipline != Discipline::ProcessorSharing)
    throw std::invalid_argument("simulate_processor_sharing: wrong discipline");
  if (transactions < 1)
    throw std::invalid_argument("simulate: need at least one transaction");

  RandomSource rng(seed);
  Trace trace;
  trace.discipline = Discipline::ProcessorSharing;
  trace.arrivals = draw_arrival_times(spec.arrival, transactions, rng);
  trace.job_lengths.resize(transactions);
  for (long i = 0; i < transactions; ++i)
    trace.job_lengths[i] = spec.service.sample(rng);

  const std::vector<double> depart =
      processor_sharing_departures(trace.arrivals, trace.job_lengths);
  finalize_departures(trace, depart);
  trace.durations.resize(transactions);
  for (long i = 0; i < transactions; ++i)
    trace.durations[i] =
        trace.departures[trace.true_matching[i]] - trace.arrivals[i];
  return trace;
}

Trace simulate(const QueueSpec& spec, long transactions, std::uint64_t seed) {
  return spec.discipline == Discipline::InfiniteServer
             ? simulate_infinite_server(spec, transactions, seed)
             : simulate_processor_sharing(spec, transactions, seed);
}

std::vector<BusyPeriod> busy_periods(const Trace& trace) {
  const long n = static_cast<long>(trace.size());
  std::vector<BusyPeriod> periods;
  if (n == 0) return periods;

  long i = 0, j = 0;  // next arrival / next departure
  long start_arrival = 0, start_departure = 0;
  int occupancy = 0;
  while (j < n) {
    // Departures first on ties: the system empties before a simultaneous
    // arrival opens the next period.
    if (i < n && trace.arrivals[i] < trace.departures[j]) {
      ++occupancy;
      ++i;
    } else {
      --occupancy;
      ++j;
      if (occupancy == 0) {
        BusyPeriod bp;
        bp.first_index = static_cast<int>(start_arrival);
        bp.arrivals.assign(trace.arrivals.begin() + start_arrival,
                           trace.arrivals.begin() + i);
        bp.departures.assign(trace.departures.begin() + start_departure,
                             trace.departures.begin() + j);
        bp.true_matching.resize(i - start_arrival);
        for (long g = start_arrival; g < i; ++g) {
          const std::int32_t local =
              trace.true_matching[g] - static_cast<std::int32_t>(start_departure);
          assert(local >= 0 && local < bp.size());
          bp.true_matching[g - start_arrival] = local;
        }
        bp.next_arrival = i < n ? trace.arrivals[i] : kInf;
        periods.push_back(std::move(bp));
        start_arrival = i;
        start_departure = j;
      }
    }
  }
  assert(occupancy == 0 && i == n);
  return periods;
}

std::vector<int> busy_period_sizes(const Trace& trace, bool drop_trailing) {
  auto periods = busy_periods(trace);
  if (drop_trailing && !periods.empty()) periods.pop_back();
  std::vector<int> sizes(periods.size());
  for (std::size_t p = 0; p < periods.size(); ++p) sizes[p] = periods[p].size();
  return sizes;
}

void write_trace_csv(const Trace& trace, const std::string& path,
                     const std::string& config_hash, std::uint64_t seed) {
  const auto periods = busy_periods(trace);
  std::vector<long> period_id(trace.size(), 0);
  for (std::size_t p = 0; p < periods.size(); ++p) {
    for (int k = 0; k < periods[p].size(); ++k)
      period_id[periods[p].first_index + k] = static_cast<long>(p) + 1;
  }
  CsvWriter csv(path);
  csv.row("config_hash", "seed", "index", "arrival_time", "departure_rank",
          "departure_time", "duration", "busy_period_id");
  for (std::size_t idx = 0; idx < trace.size(); ++idx) {
    csv.row(config_hash, seed, static_cast<long>(idx) + 1, trace.arrivals[idx],
            static_cast<long>(trace.true_matching[idx]) + 1,
            trace.departures[trace.true_matching[idx]], trace.durations[idx],
            period_id[idx]);
  }
}

}  // namespace qtrack

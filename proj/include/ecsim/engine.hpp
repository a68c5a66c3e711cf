#pragma once

// Drives W_{n+1} = (W_n + c_n s_n - mu tau_n 1)^+ for one or more policies and
// records the delay each arrival sees.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecsim/core.hpp"
#include "ecsim/policies.hpp"

namespace ecsim {

struct ArrivalEvent {
  double tau = 0;      // time since the previous arrival
  int k = 0;           // chunk count
  PlacementVector a;   // empty when k == 0
  double chunk = 0;    // bits per block for this file
};

struct DelayRecord {
  std::int64_t n = 0;
  int k = 0;
  double delay = 0;  // seconds
  PolicyKind policy = PolicyKind::BR;
};

struct ExperimentConfig {
  SystemParams params;
  FileSizeDistribution dist = FileSizeDistribution::delta(1);
  std::vector<PolicyKind> policies{PolicyKind::BR};
  std::int64_t iterations = 100000;
  std::int64_t warmup = -1;  // negative: iterations / 10
  std::uint64_t seed = 0;
  /// Share arrivals, sizes, placements and tie-break draws across policies.
  bool coupling = true;
  /// Keep per-arrival total workload and one server's workload.
  bool record_workload = false;
  int watched_server = 0;

  std::int64_t effective_warmup() const { return warmup < 0 ? iterations / 10 : warmup; }
  void validate() const;
};

struct PolicyTrace {
  PolicyKind policy = PolicyKind::BR;
  std::vector<DelayRecord> records;
  std::vector<double> total_workload;    // sum of W_n, bits
  std::vector<double> watched_workload;  // W_n at watched_server, bits
};

struct RunResult {
  std::vector<PolicyTrace> traces;
  double rho = 0;
  bool stable = true;
  std::vector<std::string> warnings;

  const PolicyTrace& trace(PolicyKind p) const;
  std::vector<double> delays(PolicyKind p) const;
};

/// One recursion step: max(w + chunk * s - mu * tau, 0) entrywise.
WorkloadVector step(std::span<const double> w, const RoutingVector& s, double chunk, double tau,
                    double mu);

/// Time until the slowest requested block finishes:
/// max over {i : s[i] > 0} of (w[i] + chunk * s[i]) / mu.
double delay_of(std::span<const double> w, const RoutingVector& s, double chunk, double mu);

RunResult run(const ExperimentConfig& config);

struct StratumStat {
  double mean = 0;
  double ci_half_width = 0;
  std::size_t count = 0;
};

/// Mean delay over records with chunk count k; nullopt when none match.
std::optional<StratumStat> conditional_mean_delay(std::span<const DelayRecord> records, int k);

/// Conditional means for every k present, ascending.
std::map<int, StratumStat> delay_strata(std::span<const DelayRecord> records);

/// Delays of the records with chunk count k.
std::vector<double> stratum_delays(std::span<const DelayRecord> records, int k);

/// Workload found by each post-warmup arrival at one server under BR.
/// With stride > 1 the chain runs stride times longer and keeps every
/// stride-th value, so the sample count stays iterations - warmup.
std::vector<double> marginal_workload_samples(const ExperimentConfig& config, int server_index,
                                              int stride = 1);

}  // namespace ecsim

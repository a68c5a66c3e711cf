#include "ecsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ecsim/kernels.hpp"
#include "ecsim/placement.hpp"
#include "ecsim/stats.hpp"

namespace ecsim {

void ExperimentConfig::validate() const {
  params.validate();
  if (iterations < 1) throw std::invalid_argument("iterations must be positive");
  if (effective_warmup() >= iterations) {
    throw std::invalid_argument("warmup must be smaller than iterations");
  }
  if (policies.empty()) throw std::invalid_argument("at least one policy is required");
  if (std::set<PolicyKind>(policies.begin(), policies.end()).size() != policies.size()) {
    throw std::invalid_argument("policies must be distinct");
  }
  if (watched_server < 0 || watched_server >= params.m) {
    throw std::invalid_argument("watched server index out of range");
  }
}

const PolicyTrace& RunResult::trace(PolicyKind p) const {
  for (const auto& t : traces) {
    if (t.policy == p) return t;
  }
  throw std::out_of_range("policy " + std::string(to_string(p)) + " was not simulated");
}

std::vector<double> RunResult::delays(PolicyKind p) const {
  const auto& recs = trace(p).records;
  std::vector<double> d;
  d.reserve(recs.size());
  for (const auto& r : recs) d.push_back(r.delay);
  return d;
}

WorkloadVector step(std::span<const double> w, const RoutingVector& s, double chunk, double tau,
                    double mu) {
  if (w.size() != s.size()) throw std::invalid_argument("workload and routing differ in length");
  WorkloadVector next(w.begin(), w.end());
  kernels::active().advance(next, s.blocks, chunk, mu * tau);
  return next;
}

double delay_of(std::span<const double> w, const RoutingVector& s, double chunk, double mu) {
  if (w.size() != s.size()) throw std::invalid_argument("workload and routing differ in length");
  const double bits = kernels::active().request_max(w, s.blocks, chunk);
  if (std::isinf(bits)) throw std::invalid_argument("routing vector requests no blocks");
  return bits / mu;
}

namespace {

struct Chain {
  PolicyKind policy;
  WorkloadVector w;
  PolicyTrace trace;
};

// One sample path. All chains see the same arrivals; each arrival's tie-break
// generator is reseeded from the shared tie stream, so every chain draws the
// same tie-break numbers.
void simulate(const ExperimentConfig& cfg, std::vector<Chain>& chains, std::uint64_t env_seed,
              std::uint64_t tie_seed) {
  const auto& p = cfg.params;
  const auto& k_table = kernels::active();
  const std::int64_t warmup = cfg.effective_warmup();
  const auto kept = static_cast<std::size_t>(cfg.iterations - warmup);
  for (auto& c : chains) {
    c.w.assign(p.m, 0.0);
    c.trace.policy = c.policy;
    c.trace.records.reserve(kept);
    if (cfg.record_workload) {
      c.trace.total_workload.reserve(kept);
      c.trace.watched_workload.reserve(kept);
    }
  }

  Rng env(env_seed);
  Rng ties(tie_seed);
  Rng tie_rng;
  std::exponential_distribution<double> inter_arrival(p.lambda);

  for (std::int64_t n = 0; n < cfg.iterations; ++n) {
    const double tau = inter_arrival(env);
    const int k = cfg.dist.sample(env);
    PlacementVector a;
    double chunk = p.chunk.mean;
    if (k > 0) {
      a = sample_placement(k, cfg.dist.coding().alpha(k), p.m, env);
      chunk = p.chunk.draw(env);
    }
    const std::uint64_t tie_seed_n = ties();
    const bool keep = n >= warmup;
    const double drain = p.mu * tau;

    for (auto& c : chains) {
      if (keep && cfg.record_workload) {
        c.trace.total_workload.push_back(k_table.total(c.w));
        c.trace.watched_workload.push_back(c.w[cfg.watched_server]);
      }
      if (k == 0) {
        k_table.drain(c.w, drain);
        continue;
      }
      tie_rng.seed(tie_seed_n);
      const RoutingVector s = route(c.policy, a, k, c.w, chunk, tie_rng);
      if (keep) {
        const double bits = k_table.request_max(c.w, s.blocks, chunk);
        c.trace.records.push_back({n, k, bits / p.mu, c.policy});
      }
      k_table.advance(c.w, s.blocks, chunk, drain);
    }
  }
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  config.validate();
  RunResult result;
  result.rho = config.params.rho(config.dist);
  result.stable = result.rho < config.params.mu;
  if (!result.stable) {
    std::ostringstream os;
    os << "per-server load rho=" << result.rho << " >= mu=" << config.params.mu
       << ": workloads are not stationary";
    result.warnings.push_back(os.str());
  }

  if (config.coupling) {
    std::vector<Chain> chains;
    for (auto pk : config.policies) chains.push_back({pk, {}, {}});
    simulate(config, chains, stats::mix_seed(config.seed, 0), stats::mix_seed(config.seed, 1));
    for (auto& c : chains) result.traces.push_back(std::move(c.trace));
  } else {
    for (std::size_t j = 0; j < config.policies.size(); ++j) {
      std::vector<Chain> chains{{config.policies[j], {}, {}}};
      simulate(config, chains, stats::mix_seed(config.seed, 2 * j + 2),
               stats::mix_seed(config.seed, 2 * j + 3));
      result.traces.push_back(std::move(chains.front().trace));
    }
  }
  return result;
}

std::optional<StratumStat> conditional_mean_delay(std::span<const DelayRecord> records, int k) {
  const auto d = stratum_delays(records, k);
  if (d.empty()) return std::nullopt;
  const auto ci = stats::mean_ci(d);
  return StratumStat{ci.mean, ci.half_width, ci.count};
}

std::map<int, StratumStat> delay_strata(std::span<const DelayRecord> records) {
  std::map<int, std::vector<double>> by_k;
  for (const auto& r : records) by_k[r.k].push_back(r.delay);
  std::map<int, StratumStat> out;
  for (const auto& [k, d] : by_k) {
    const auto ci = stats::mean_ci(d);
    out[k] = StratumStat{ci.mean, ci.half_width, ci.count};
  }
  return out;
}

std::vector<double> stratum_delays(std::span<const DelayRecord> records, int k) {
  std::vector<double> d;
  for (const auto& r : records) {
    if (r.k == k) d.push_back(r.delay);
  }
  return d;
}

std::vector<double> marginal_workload_samples(const ExperimentConfig& config, int server_index,
                                              int stride) {
  if (config.policies.size() != 1 || config.policies.front() != PolicyKind::BR) {
    throw std::invalid_argument("marginal workload samples are defined for BR only");
  }
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  ExperimentConfig cfg = config;
  const std::int64_t warmup = config.effective_warmup();
  cfg.warmup = warmup * stride;
  cfg.iterations = cfg.warmup + (config.iterations - warmup) * stride;
  cfg.record_workload = true;
  cfg.watched_server = server_index;
  cfg.validate();

  std::vector<Chain> chains{{PolicyKind::BR, {}, {}}};
  simulate(cfg, chains, stats::mix_seed(cfg.seed, 0), stats::mix_seed(cfg.seed, 1));
  const auto& all = chains.front().trace.watched_workload;
  std::vector<double> out;
  out.reserve(all.size() / stride + 1);
  for (std::size_t i = 0; i < all.size(); i += stride) out.push_back(all[i]);
  return out;
}

}  // namespace ecsim

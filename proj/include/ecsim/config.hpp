#pragma once

// Key-value run configuration.
//
//   # comment
//   m        = 200
//   mu       = 1
//   c        = 10              # or: chunk_dist = exp(10) | const(10)
//   rho      = 0.7             # or: lambda = 0.35 (total request rate)
//   pi       = binomial(0.1)   # binomial(p[,n]) | geometric(p) | delta(k) | explicit(k:p,...)
//   alpha    = k+2             # k | k+r
//   policies = WF,BS,BR        # or: policy = BR
//   iters    = 100000
//   warmup   = 10000           # default iters/10
//   seed     = 1               # required (here or on the command line)
//   mode     = fixed           # fixed | random (exponential chunks of mean c)
//   coupling = true
//
// Sweep and output keys: preset, out, k_grid, m_grid, a_grid,
// redundancy_grid (lists are comma separated), min_samples, threads.
// Unknown or repeated keys are rejected.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ecsim/engine.hpp"

namespace ecsim {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::runtime_error(key.empty() ? message : "config key '" + key + "': " + message),
        key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// File-size law before it is bound to a server count (binomial without an
/// explicit n uses m).
struct PiSpec {
  std::string family = "binomial";
  double p = 0.1;
  std::optional<int> n;
  int k0 = 1;
  std::vector<std::pair<int, double>> entries;

  FileSizeDistribution bind(int m, CodingRule rule) const;
  std::string describe() const;
};

struct RunSpec {
  std::optional<int> m;
  std::optional<double> mu;
  std::optional<double> c;
  std::optional<ChunkSize> chunk_dist;
  std::optional<double> lambda;
  std::optional<double> rho;
  std::optional<PiSpec> pi;
  std::optional<int> redundancy;
  std::optional<std::vector<PolicyKind>> policies;
  std::optional<std::int64_t> iters;
  std::optional<std::int64_t> warmup;
  std::uint64_t seed = 0;
  std::optional<std::string> mode;
  std::optional<bool> coupling;

  std::optional<std::string> preset;
  std::optional<std::string> out;
  std::optional<std::vector<int>> k_grid;
  std::optional<std::vector<int>> m_grid;
  std::optional<std::vector<int>> a_grid;
  std::optional<std::vector<int>> redundancy_grid;
  std::optional<int> min_samples;
  std::optional<int> threads;

  /// Builds the experiment with defaults for anything unset: m=200, mu=1,
  /// c=10, binomial(0.1), alpha=k+2, rho=0.7, BR, 1e5 iterations.
  /// m_override replaces m (used by sweeps).
  ExperimentConfig experiment(std::optional<int> m_override = std::nullopt) const;
};

/// Parses the documented key-value format. A seed must come from the
/// document or from seed_override.
RunSpec parse_config(std::string_view text, std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace ecsim

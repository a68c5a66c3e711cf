#pragma once

// Analytic companions to the simulator: the single-server cavity queue that
// matches one server's marginal under BR, Pollaczek-Khinchine, the M/D/1 tail
// exponent, and the delay bounds built from them. Delays are in seconds
// (bits / mu) throughout, matching the engine.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ecsim/core.hpp"

namespace ecsim {

/// Service pmf of the cavity queue: probs[l] = P(service = l * chunk bits).
/// Arrivals are Poisson at the system's total request rate; most of them
/// bring zero work to the tagged server.
struct CavityPmf {
  std::vector<double> probs;
  double arrival_rate = 0;
  double chunk = 0;

  double mean_service_bits() const;
  double second_moment_bits() const;
  /// E[exp(-s * service / mu)], service time in seconds.
  double service_time_lst(double s, double mu) const;
};

CavityPmf cavity_pmf(const FileSizeDistribution& pi, int m, double c, double lambda);

/// Steady-state workload transform E[exp(-s W)] of an M/G/1 queue.
double pk_workload_transform(double arrival_rate, const std::function<double(double)>& service_lst,
                             double mean_service, double s);

/// Mean steady-state M/G/1 workload, arrival_rate * E[S^2] / (2 (1 - arrival_rate * E[S])).
double pk_mean_workload(double arrival_rate, double mean_service, double second_moment);

/// Principal branch W0 on [-1/e, inf).
double lambert_w_principal(double x);

/// Lower branch W_{-1} on [-1/e, 0).
double lambert_w_lower(double x);

/// Decay rate q of the M/D/1 stationary workload tail, arrival rate lambda and
/// service time sigma: the magnitude of the non-zero root of
/// s = lambda (1 - exp(-s sigma)). Checked against bisection; throws
/// std::logic_error if the two disagree beyond 1e-8.
double md1_tail_exponent(double lambda, double sigma);

/// Same root by bisection only.
double md1_tail_exponent_bisection(double lambda, double sigma);

enum class BoundRegime { log, harmonic, chunk_scaled };
std::string_view to_string(BoundRegime r);

struct BoundReport {
  int k = 0;
  double value = 0;      // seconds
  BoundRegime regime = BoundRegime::log;
  double rho = 0;
  double mu = 0;
  double chunk = 0;
  double rate = 0;       // tail exponent or exponential rate used
  /// Alternative form: harmonic regime: the literal mu/(mu-rho) H(k) + c form;
  /// chunk-scaled regime: the large-a approximation.
  std::optional<double> alt_value;
  /// chunk-scaled regime: |alt - value| / value on the log coefficient.
  std::optional<double> relative_gap;
};

/// c/mu + log(k) / q(rho/c, c/mu).
BoundReport log_bound(int k, double rho, double c, double mu);

/// Exponential chunks with mean cbar: cbar/mu + cbar/(mu - rho) * H(k).
BoundReport harmonic_bound(int k, double rho, double mu, double mean_chunk);

/// Chunks split a-fold (size c/a, mu = 1). value uses the exact tail exponent
/// q(lambda_p a, c/a); alt_value uses the large-a root
/// (1 - lambda_p c) 2a / (c^2 lambda_p). Both add the c/a own-block term.
BoundReport chunk_scaling_bound(int k, int a, double lambda_p, double c);

/// E[max of k iid Exp(rate)] = H(k) / rate.
double expected_max_exponential(std::int64_t k, double rate);

struct CavitySimOptions {
  std::int64_t warmup = -1;  // negative: n / 10
  int stride = 1;            // keep every stride-th post-warmup arrival
  /// Random chunk sizes: service = l * Z with Z drawn from this law.
  std::optional<ChunkSize> chunk_law;
};

/// Lindley recursion w' = max(w + x - mu tau, 0); returns n workload values
/// (bits) seen by arrivals after warmup.
std::vector<double> simulate_cavity_queue(const CavityPmf& pmf, double mu, std::int64_t n,
                                          std::uint64_t seed, const CavitySimOptions& opts = {});

/// Independent-version delay oracle for a request of k blocks: each draw
/// routes k blocks as BR would (floor(k/m) everywhere, the rest on random
/// servers), gives each involved server an independent workload picked from
/// `workloads`, and returns max_i (W_i + chunk * s_i) / mu. chunk_law, when
/// set, draws one chunk size per request.
std::vector<double> cavity_max_delays(std::span<const double> workloads, int k, int m,
                                      double chunk, double mu, std::size_t count,
                                      std::uint64_t seed,
                                      std::optional<ChunkSize> chunk_law = std::nullopt);

}  // namespace ecsim

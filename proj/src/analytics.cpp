#include "ecsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "ecsim/stats.hpp"

namespace ecsim {

double CavityPmf::mean_service_bits() const {
  double s = 0;
  for (std::size_t l = 0; l < probs.size(); ++l) s += probs[l] * static_cast<double>(l) * chunk;
  return s;
}

double CavityPmf::second_moment_bits() const {
  double s = 0;
  for (std::size_t l = 0; l < probs.size(); ++l) {
    const double x = static_cast<double>(l) * chunk;
    s += probs[l] * x * x;
  }
  return s;
}

double CavityPmf::service_time_lst(double s, double mu) const {
  double v = 0;
  for (std::size_t l = 0; l < probs.size(); ++l) {
    v += probs[l] * std::exp(-s * static_cast<double>(l) * chunk / mu);
  }
  return v;
}

CavityPmf cavity_pmf(const FileSizeDistribution& pi, int m, double c, double lambda) {
  if (m < 1 || !(c > 0) || !(lambda > 0)) {
    throw std::invalid_argument("cavity pmf needs m >= 1, c > 0, lambda > 0");
  }
  const auto probs = pi.probs();
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("file-size pmf is not normalized");

  // A file of k chunks gives the tagged server floor(k/m) + 1 blocks with
  // probability (k mod m)/m and floor(k/m) otherwise.
  CavityPmf out;
  out.arrival_rate = lambda;
  out.chunk = c;
  out.probs.assign(pi.max_k() / m + 2, 0.0);
  for (int k = 0; k <= pi.max_k(); ++k) {
    const double p = probs[k];
    if (p == 0.0) continue;
    const int base = k / m;
    const double frac = static_cast<double>(k - base * m) / m;
    out.probs[base] += (1.0 - frac) * p;
    out.probs[base + 1] += frac * p;
  }
  while (out.probs.size() > 1 && out.probs.back() == 0.0) out.probs.pop_back();
  return out;
}

double pk_workload_transform(double arrival_rate, const std::function<double(double)>& service_lst,
                             double mean_service, double s) {
  const double load = arrival_rate * mean_service;
  if (load >= 1.0) throw std::domain_error("M/G/1 queue is unstable (load >= 1)");
  if (s < 0) throw std::invalid_argument("transform argument must be positive");
  if (arrival_rate == 0.0) return 1.0;
  // Below this the ratio is 0/0 in floating point; the limit is 1.
  if (s * mean_service < 1e-12) return 1.0;
  return (1.0 - load) * s / (s - arrival_rate * (1.0 - service_lst(s)));
}

double pk_mean_workload(double arrival_rate, double mean_service, double second_moment) {
  const double load = arrival_rate * mean_service;
  if (load >= 1.0) throw std::domain_error("M/G/1 queue is unstable (load >= 1)");
  return arrival_rate * second_moment / (2.0 * (1.0 - load));
}

// ---------------------------------------------------------------------------
// Lambert W by Halley iteration.

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

double halley_w(double x, double w) {
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (f == 0.0) break;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

// Series about the branch point in p = +-sqrt(2(e x + 1)).
double branch_series(double p) { return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p; }

double check_branch_domain(double x) {
  if (x < -kInvE) {
    if (x < -kInvE - 1e-15) throw std::domain_error("Lambert W undefined below -1/e");
    x = -kInvE;
  }
  return x;
}

}  // namespace

double lambert_w_principal(double x) {
  x = check_branch_domain(x);
  if (x == 0.0) return 0.0;
  if (x == -kInvE) return -1.0;
  double w;
  if (x < -0.25) {
    w = branch_series(std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0))));
  } else if (x < 3.0) {
    w = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  } else {
    const double l1 = std::log(x), l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley_w(x, w);
}

double lambert_w_lower(double x) {
  x = check_branch_domain(x);
  if (x >= 0.0) throw std::domain_error("lower Lambert W branch needs x in [-1/e, 0)");
  if (x == -kInvE) return -1.0;
  double w;
  if (x < -0.25) {
    w = branch_series(-std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0))));
  } else {
    const double l1 = std::log(-x), l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley_w(x, w);
}

// ---------------------------------------------------------------------------

namespace {

void check_md1(double lambda, double sigma) {
  if (!(lambda > 0) || !(sigma > 0)) {
    throw std::domain_error("tail exponent needs positive arrival rate and service time");
  }
  if (lambda * sigma >= 1.0) throw std::domain_error("M/D/1 queue is unstable (lambda*sigma >= 1)");
}

}  // namespace

double md1_tail_exponent_bisection(double lambda, double sigma) {
  check_md1(lambda, sigma);
  // theta = lambda (exp(theta sigma) - 1) with theta = -s > 0. Since
  // expm1(x) >= x + x^2/2, the root lies below 2(1 - lambda sigma)/(lambda sigma^2).
  const double ls = lambda * sigma;
  auto g = [&](double th) { return lambda * std::expm1(th * sigma) - th; };
  double hi = 2.0 * (1.0 - ls) / (lambda * sigma * sigma);
  double lo = hi * 1e-9;
  for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double md1_tail_exponent(double lambda, double sigma) {
  check_md1(lambda, sigma);
  const double ls = lambda * sigma;
  // (s - lambda) sigma solves y e^y = -ls e^{-ls}. W0 returns y = -ls, the
  // trivial root s = 0; the decay rate comes from the lower branch.
  const double y = lambert_w_lower(-ls * std::exp(-ls));
  const double q = std::abs(lambda + y / sigma);
  const double q_bisect = md1_tail_exponent_bisection(lambda, sigma);
  if (std::abs(q - q_bisect) > 1e-8 * std::max(1.0, q)) {
    throw std::logic_error("M/D/1 tail exponent: Lambert W and bisection disagree");
  }
  return q;
}

// ---------------------------------------------------------------------------

std::string_view to_string(BoundRegime r) {
  switch (r) {
    case BoundRegime::log: return "log";
    case BoundRegime::harmonic: return "harmonic";
    case BoundRegime::chunk_scaled: return "chunk_scaled";
  }
  return "?";
}

BoundReport log_bound(int k, double rho, double c, double mu) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(c > 0) || !(mu > 0) || !(rho > 0)) throw std::invalid_argument("rho, c, mu must be positive");
  if (rho >= mu) throw std::domain_error("log bound needs rho < mu");
  BoundReport r;
  r.k = k;
  r.regime = BoundRegime::log;
  r.rho = rho;
  r.mu = mu;
  r.chunk = c;
  r.rate = md1_tail_exponent(rho / c, c / mu);
  r.value = c / mu + std::log(static_cast<double>(k)) / r.rate;
  return r;
}

BoundReport harmonic_bound(int k, double rho, double mu, double mean_chunk) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(mean_chunk > 0) || !(mu > 0) || !(rho >= 0)) {
    throw std::invalid_argument("rho, mu, mean chunk must be positive");
  }
  if (rho >= mu) throw std::domain_error("harmonic bound needs rho < mu");
  // Stationary M/M/1 workload (in seconds) is dominated by Exp((mu - rho)/cbar).
  const double h = stats::harmonic(k);
  BoundReport r;
  r.k = k;
  r.regime = BoundRegime::harmonic;
  r.rho = rho;
  r.mu = mu;
  r.chunk = mean_chunk;
  r.rate = (mu - rho) / mean_chunk;
  r.value = mean_chunk / mu + h / r.rate;
  r.alt_value = mean_chunk + mu / (mu - rho) * h;
  return r;
}

BoundReport chunk_scaling_bound(int k, int a, double lambda_p, double c) {
  if (k < 1 || a < 1) throw std::invalid_argument("k and a must be >= 1");
  if (!(lambda_p > 0) || !(c > 0)) throw std::invalid_argument("lambda_p and c must be positive");
  if (lambda_p * c >= 1.0) throw std::domain_error("chunk scaling needs lambda_p * c < 1");
  const double ad = a;
  const double q = md1_tail_exponent(lambda_p * ad, c / ad);
  const double q_approx = (1.0 - lambda_p * c) * 2.0 * ad / (c * c * lambda_p);
  const double log_ak = std::log(ad * k);
  BoundReport r;
  r.k = k;
  r.regime = BoundRegime::chunk_scaled;
  r.rho = lambda_p * c;
  r.mu = 1.0;
  r.chunk = c / ad;
  r.rate = q;
  r.value = c / ad + log_ak / q;
  r.alt_value = c / ad + log_ak / q_approx;
  r.relative_gap = std::abs(q / q_approx - 1.0);
  return r;
}

double expected_max_exponential(std::int64_t k, double rate) {
  if (k < 1 || !(rate > 0)) throw std::invalid_argument("need k >= 1 and rate > 0");
  return stats::harmonic(k) / rate;
}

std::vector<double> simulate_cavity_queue(const CavityPmf& pmf, double mu, std::int64_t n,
                                          std::uint64_t seed, const CavitySimOptions& opts) {
  if (n < 1 || !(mu > 0) || opts.stride < 1) throw std::invalid_argument("bad cavity simulation size");
  if (pmf.probs.empty() || !(pmf.arrival_rate > 0)) throw std::invalid_argument("empty cavity pmf");
  const double mean_chunk = opts.chunk_law ? opts.chunk_law->mean : pmf.chunk;
  const double load_bits = pmf.arrival_rate * (pmf.mean_service_bits() / pmf.chunk) * mean_chunk;
  if (load_bits >= mu) throw std::domain_error("cavity queue is unstable");

  std::vector<double> cdf(pmf.probs.size());
  std::partial_sum(pmf.probs.begin(), pmf.probs.end(), cdf.begin());
  cdf.back() = std::max(cdf.back(), 1.0);

  const std::int64_t warmup = (opts.warmup < 0 ? n / 10 : opts.warmup) * opts.stride;
  const std::int64_t total = warmup + n * opts.stride;
  Rng rng(stats::mix_seed(seed, 7));
  std::exponential_distribution<double> inter_arrival(pmf.arrival_rate);

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  double w = 0;
  for (std::int64_t i = 0; i < total; ++i) {
    if (i >= warmup && (i - warmup) % opts.stride == 0) out.push_back(w);
    const double u = std::generate_canonical<double, 53>(rng);
    const auto l = static_cast<double>(
        std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(),
                              pmf.probs.size() - 1));
    double x = 0;
    if (l > 0) x = l * (opts.chunk_law ? opts.chunk_law->draw(rng) : pmf.chunk);
    const double v = w + x - mu * inter_arrival(rng);
    w = v > 0.0 ? v : 0.0;
  }
  return out;
}

std::vector<double> cavity_max_delays(std::span<const double> workloads, int k, int m,
                                      double chunk, double mu, std::size_t count,
                                      std::uint64_t seed, std::optional<ChunkSize> chunk_law) {
  if (workloads.empty() || k < 1 || m < 1) throw std::invalid_argument("bad cavity oracle input");
  Rng rng(stats::mix_seed(seed, 11));
  std::uniform_int_distribution<std::size_t> pick(0, workloads.size() - 1);
  const int base = k / m;
  const int extra = k - base * m;
  const int involved = base > 0 ? m : extra;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t d = 0; d < count; ++d) {
    const double cn = chunk_law ? chunk_law->draw(rng) : chunk;
    double best = 0;
    // Servers are exchangeable, so the ones carrying an extra block can be
    // taken as the first `extra`.
    for (int i = 0; i < involved; ++i) {
      const int blocks = base + (i < extra ? 1 : 0);
      best = std::max(best, workloads[pick(rng)] + cn * blocks);
    }
    out.push_back(best / mu);
  }
  return out;
}

}  // namespace ecsim

#include "ecsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ecsim/stats.hpp"

namespace ecsim {

namespace {

constexpr double kTailMass = 1e-12;

double order_tolerance(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0;
  for (double v : x) sx += std::abs(v);
  for (double v : y) sy += std::abs(v);
  return kOrderTolerance * std::max({1.0, sx, sy});
}

void require_same_length(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("vectors differ in length: " + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()));
  }
  if (x.empty()) throw std::invalid_argument("vectors must be non-empty");
}

}  // namespace

int PlacementVector::total() const { return std::accumulate(blocks.begin(), blocks.end(), 0); }
int RoutingVector::total() const { return std::accumulate(blocks.begin(), blocks.end(), 0); }

// ---------------------------------------------------------------------------

FileSizeDistribution::FileSizeDistribution(Kind kind, std::vector<double> probs, CodingRule rule,
                                           std::string label)
    : kind_(kind), probs_(std::move(probs)), coding_(rule), label_(std::move(label)) {
  if (coding_.redundancy < 0) {
    throw std::invalid_argument("coding rule must satisfy alpha_k >= k (redundancy >= 0)");
  }
  double total = 0;
  for (double p : probs_) {
    if (!(p >= 0)) throw std::invalid_argument("pmf entries must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("pmf does not sum to 1 (sum = " + std::to_string(total) + ")");
  }
  cdf_.resize(probs_.size());
  std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
  cdf_.back() = 1.0;
}

FileSizeDistribution FileSizeDistribution::binomial(double p, int trials, CodingRule rule) {
  if (trials < 1 || !(p >= 0 && p <= 1)) {
    throw std::invalid_argument("binomial requires p in [0,1] and trials >= 1");
  }
  std::vector<double> probs(trials + 1, 0.0);
  if (p == 0.0) {
    probs[0] = 1.0;
  } else if (p == 1.0) {
    probs[trials] = 1.0;
  } else {
    const double lp = std::log(p), lq = std::log1p(-p);
    for (int k = 0; k <= trials; ++k) {
      const double lc = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) -
                        std::lgamma(trials - k + 1.0);
      probs[k] = std::exp(lc + k * lp + (trials - k) * lq);
    }
    const double s = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double& v : probs) v /= s;
  }
  std::ostringstream os;
  os << "binomial(" << p << "," << trials << ")";
  return FileSizeDistribution(Kind::binomial, std::move(probs), rule, os.str());
}

FileSizeDistribution FileSizeDistribution::geometric(double p, CodingRule rule) {
  if (!(p > 0 && p <= 1)) throw std::invalid_argument("geometric requires p in (0,1]");
  std::vector<double> probs{0.0};
  double tail = 1.0;  // P(K > k)
  for (int k = 1; tail >= kTailMass; ++k) {
    probs.push_back(tail * p);
    tail *= (1.0 - p);
  }
  const double s = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& v : probs) v /= s;
  std::ostringstream os;
  os << "geometric(" << p << ")";
  return FileSizeDistribution(Kind::geometric, std::move(probs), rule, os.str());
}

FileSizeDistribution FileSizeDistribution::delta(int k0, CodingRule rule) {
  if (k0 < 1) throw std::invalid_argument("delta requires k0 >= 1");
  std::vector<double> probs(k0 + 1, 0.0);
  probs[k0] = 1.0;
  return FileSizeDistribution(Kind::delta, std::move(probs), rule,
                              "delta(" + std::to_string(k0) + ")");
}

FileSizeDistribution FileSizeDistribution::explicit_pmf(std::vector<std::pair<int, double>> entries,
                                                        CodingRule rule) {
  if (entries.empty()) throw std::invalid_argument("explicit pmf needs at least one entry");
  int kmax = 0;
  for (auto [k, p] : entries) {
    if (k < 0) throw std::invalid_argument("chunk counts must be non-negative");
    kmax = std::max(kmax, k);
  }
  std::vector<double> probs(kmax + 1, 0.0);
  std::ostringstream os;
  os << "explicit(";
  bool first = true;
  for (auto [k, p] : entries) {
    probs[k] += p;
    os << (first ? "" : ",") << k << ":" << p;
    first = false;
  }
  os << ")";
  return FileSizeDistribution(Kind::explicit_pmf, std::move(probs), rule, os.str());
}

double FileSizeDistribution::prob(int k) const {
  if (k < 0 || k > max_k()) return 0.0;
  return probs_[k];
}

double FileSizeDistribution::mean_chunks() const {
  double s = 0;
  for (std::size_t k = 0; k < probs_.size(); ++k) s += static_cast<double>(k) * probs_[k];
  return s;
}

int FileSizeDistribution::sample(Rng& rng) const {
  const double u = std::generate_canonical<double, 53>(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  // Skip zero-probability entries that share the cdf value.
  auto k = static_cast<int>(it - cdf_.begin());
  while (probs_[k] == 0.0 && k < max_k()) ++k;
  return k;
}

std::string FileSizeDistribution::describe() const { return label_; }

double ChunkSize::draw(Rng& rng) const {
  if (kind == Kind::constant) return mean;
  return std::exponential_distribution<double>(1.0 / mean)(rng);
}

double SystemParams::rho(const FileSizeDistribution& dist) const {
  return lambda * chunk.mean * dist.mean_chunks() / m;
}

double SystemParams::lambda_for_load(double rho, int m, double mean_chunk,
                                     const FileSizeDistribution& dist) {
  const double nu = mean_chunk * dist.mean_chunks();
  if (!(nu > 0)) throw std::invalid_argument("mean file size must be positive");
  return rho * m / nu;
}

void SystemParams::validate() const {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (!(mu > 0)) throw std::invalid_argument("mu must be positive");
  if (!(chunk.mean > 0)) throw std::invalid_argument("chunk size must be positive");
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
}

// ---------------------------------------------------------------------------

bool majorizes(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  const double tol = order_tolerance(x, y);
  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double px = 0, py = 0;
  for (std::size_t l = 0; l + 1 < xs.size(); ++l) {
    px += xs[l];
    py += ys[l];
    if (px < py - tol) return false;
  }
  px += xs.back();
  py += ys.back();
  return std::abs(px - py) <= tol;
}

bool submajorizes(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  const double tol = order_tolerance(x, y);
  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end(), std::greater<>());
  std::sort(ys.begin(), ys.end(), std::greater<>());
  double px = 0, py = 0;
  for (std::size_t l = 0; l < xs.size(); ++l) {
    px += xs[l];
    py += ys[l];
    if (px > py + tol) return false;
  }
  return true;
}

std::vector<double> apply_balancing_transfer(std::span<const double> x, std::size_t i,
                                             std::size_t j, double delta) {
  if (i >= x.size() || j >= x.size()) throw std::invalid_argument("transfer index out of range");
  if (x[i] > x[j]) throw std::invalid_argument("transfer requires x[i] <= x[j]");
  if (delta < 0 || delta > x[j] - x[i]) {
    throw std::invalid_argument("transfer amount must lie in [0, x[j] - x[i]]");
  }
  std::vector<double> y(x.begin(), x.end());
  y[i] += delta;
  y[j] -= delta;
  return y;
}

// ---------------------------------------------------------------------------

double IcxReport::worst_excess() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) worst = std::max(worst, p.gap() - p.half_width);
  return worst;
}

IcxReport empirical_icx_leq(std::span<const double> samples_x, std::span<const double> samples_y,
                            std::span<const double> t_grid) {
  if (samples_x.empty() || samples_y.empty() || t_grid.empty()) {
    throw std::invalid_argument("icx check needs non-empty samples and grid");
  }
  auto moments = [](std::span<const double> s, double t) {
    double sum = 0, sq = 0;
    for (double v : s) {
      const double e = v > t ? v - t : 0.0;
      sum += e;
      sq += e * e;
    }
    const double n = static_cast<double>(s.size());
    const double mean = sum / n;
    const double var = s.size() > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1)) : 0.0;
    return std::pair{mean, var / n};
  };

  IcxReport report;
  for (double t : t_grid) {
    auto [mx, vx] = moments(samples_x, t);
    auto [my, vy] = moments(samples_y, t);
    IcxPoint p;
    p.t = t;
    p.mean_x = mx;
    p.mean_y = my;
    p.half_width = stats::kZ95 * std::sqrt(vx + vy);
    p.flagged = mx - my > p.half_width;
    report.consistent = report.consistent && !p.flagged;
    report.points.push_back(p);
  }
  return report;
}

}  // namespace ecsim

#pragma once

// Domain types shared by the simulator, plus majorization predicates and an
// empirical increasing-convex-order check.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ecsim {

using Rng = std::mt19937_64;

/// Unfinished work per server, in bits.
using WorkloadVector = std::vector<double>;

/// Coded blocks of one file held by each server.
struct PlacementVector {
  std::vector<int> blocks;

  std::size_t size() const { return blocks.size(); }
  int operator[](std::size_t i) const { return blocks[i]; }
  int total() const;
};

/// Blocks requested from each server for one arrival.
struct RoutingVector {
  std::vector<int> blocks;

  std::size_t size() const { return blocks.size(); }
  int operator[](std::size_t i) const { return blocks[i]; }
  int total() const;
};

/// (alpha_k, k) MDS rule with alpha_k = k + redundancy.
struct CodingRule {
  int redundancy = 0;

  int alpha(int k) const { return k + redundancy; }
};

/// pmf over chunk counts k, truncated where the remaining tail mass is below
/// 1e-12.
class FileSizeDistribution {
 public:
  enum class Kind { binomial, geometric, delta, explicit_pmf };

  static FileSizeDistribution binomial(double p, int trials, CodingRule rule = {});
  static FileSizeDistribution geometric(double p, CodingRule rule = {});
  static FileSizeDistribution delta(int k0, CodingRule rule = {});
  static FileSizeDistribution explicit_pmf(std::vector<std::pair<int, double>> entries,
                                           CodingRule rule = {});

  Kind kind() const { return kind_; }
  const CodingRule& coding() const { return coding_; }
  void set_coding(CodingRule rule) { coding_ = rule; }

  /// probs()[k] = pi_k for k = 0..max_k().
  std::span<const double> probs() const { return probs_; }
  double prob(int k) const;
  int max_k() const { return static_cast<int>(probs_.size()) - 1; }

  /// Sum of k * pi_k (mean chunk count; nu = c * mean_chunks()).
  double mean_chunks() const;

  /// Membership in the class of pmfs under which BR routing is associated.
  /// Only asserted for binomial, geometric and point masses.
  bool association_assumed() const { return kind_ != Kind::explicit_pmf; }

  /// Inverse-cdf draw.
  int sample(Rng& rng) const;

  std::string describe() const;

 private:
  FileSizeDistribution(Kind kind, std::vector<double> probs, CodingRule rule,
                       std::string label);

  Kind kind_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  CodingRule coding_;
  std::string label_;
};

/// Chunk size in bits: a constant, or exponential with the given mean.
struct ChunkSize {
  enum class Kind { constant, exponential };
  Kind kind = Kind::constant;
  double mean = 1.0;

  static ChunkSize constant(double c) { return {Kind::constant, c}; }
  static ChunkSize exponential(double mean) { return {Kind::exponential, mean}; }
  bool random() const { return kind == Kind::exponential; }
  double draw(Rng& rng) const;
};

struct SystemParams {
  int m = 1;
  double mu = 1.0;          // bits/sec per server
  ChunkSize chunk;          // bits
  double lambda = 1.0;      // total request rate

  /// Per-server load in bits/sec, lambda * nu / m.
  double rho(const FileSizeDistribution& dist) const;
  bool stable(const FileSizeDistribution& dist) const { return rho(dist) < mu; }
  /// Total arrival rate that yields the requested per-server load.
  static double lambda_for_load(double rho, int m, double mean_chunk,
                                const FileSizeDistribution& dist);
  void validate() const;
};

// ---------------------------------------------------------------------------
// Majorization

inline constexpr double kOrderTolerance = 1e-9;

/// True iff x is majorized by y (x is the more balanced vector).
bool majorizes(std::span<const double> x, std::span<const double> y);

/// True iff x is weakly submajorized by y: every top-l sum of x is at most
/// the corresponding top-l sum of y.
bool submajorizes(std::span<const double> x, std::span<const double> y);

/// x + delta e_i - delta e_j, a transfer from a larger entry to a smaller one.
/// Requires x[i] <= x[j] and 0 <= delta <= x[j] - x[i]. Indices are 0-based.
std::vector<double> apply_balancing_transfer(std::span<const double> x, std::size_t i,
                                             std::size_t j, double delta);

// ---------------------------------------------------------------------------
// Increasing convex order, tested on the family g_t(x) = (x - t)^+.

struct IcxPoint {
  double t = 0;
  double mean_x = 0;
  double mean_y = 0;
  double half_width = 0;  // combined 95% normal half-width
  bool flagged = false;   // mean_x - mean_y > half_width

  double gap() const { return mean_x - mean_y; }
};

struct IcxReport {
  std::vector<IcxPoint> points;
  bool consistent = true;

  /// Largest value of (mean_x - mean_y) - half_width over the grid.
  double worst_excess() const;
};

IcxReport empirical_icx_leq(std::span<const double> samples_x, std::span<const double> samples_y,
                            std::span<const double> t_grid);

}  // namespace ecsim

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "ecsim/analytics.hpp"
#include "ecsim/placement.hpp"
#include "ecsim/policies.hpp"
#include "ecsim/stats.hpp"

using namespace ecsim;

TEST_CASE("cavity pmf examples") {
  auto all = cavity_pmf(FileSizeDistribution::delta(4), 4, 10, 0.3);
  REQUIRE(all.probs.size() >= 2);
  CHECK(all.probs[0] == doctest::Approx(0));
  CHECK(all.probs[1] == doctest::Approx(1));
  CHECK(all.arrival_rate == 0.3);

  auto one = cavity_pmf(FileSizeDistribution::delta(1), 4, 10, 0.3);
  CHECK(one.probs[0] == doctest::Approx(0.75));
  CHECK(one.probs[1] == doctest::Approx(0.25));
  CHECK(one.mean_service_bits() == doctest::Approx(2.5));
  CHECK(one.second_moment_bits() == doctest::Approx(25));
}

TEST_CASE("cavity pmf matches routing a tagged server") {
  const int m = 6;
  auto dist = FileSizeDistribution::binomial(0.4, 15, CodingRule{2});
  const auto pmf = cavity_pmf(dist, m, 1, 1);

  // Double sum over k and the tagged server's share.
  std::vector<double> literal(pmf.probs.size() + 1, 0.0);
  for (int k = 1; k <= dist.max_k(); ++k) {
    const double extra = static_cast<double>(k % m) / m;
    literal[k / m] += dist.prob(k) * (1 - extra);
    literal[k / m + 1] += dist.prob(k) * extra;
  }
  literal[0] += dist.prob(0);
  for (std::size_t l = 0; l < pmf.probs.size(); ++l)
    CHECK(pmf.probs[l] == doctest::Approx(literal[l]).epsilon(1e-12));

  // Monte Carlo through the actual placement and BR routing.
  Rng rng(21);
  std::vector<double> mc(pmf.probs.size() + 2, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const int k = sample_chunk_count(dist, rng);
    if (k == 0) {
      mc[0] += 1;
      continue;
    }
    auto a = sample_placement(k, dist.coding().alpha(k), m, rng);
    mc[route_br(a, k, rng)[0]] += 1;
  }
  for (std::size_t l = 0; l < pmf.probs.size(); ++l)
    CHECK(std::abs(mc[l] / n - pmf.probs[l]) < 0.005);
}

TEST_CASE("P-K transform") {
  // lambda = 0 gives an empty queue.
  auto lst = [](double s) { return 1.0 / (1.0 + s); };
  for (double s : {0.0, 0.1, 2.0}) CHECK(pk_workload_transform(0.0, lst, 1.0, s) == 1.0);

  // M/M/1: E[exp(-sW)] = (1 - rho)(nu + s)/(nu + s - lambda).
  const double lam = 0.6, nu = 1.0, rho = lam / nu;
  auto exp_lst = [&](double s) { return nu / (nu + s); };
  for (double s : {1e-6, 0.05, 0.3, 1.0, 4.0}) {
    const double expect = (1 - rho) * (nu + s) / (nu + s - lam);
    CHECK(pk_workload_transform(lam, exp_lst, 1 / nu, s) == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK(pk_workload_transform(lam, exp_lst, 1 / nu, 0.0) == 1.0);
  CHECK_THROWS_AS(pk_workload_transform(1.2, exp_lst, 1.0, 0.5), std::domain_error);

  // -G'(0) is the mean workload.
  const auto pmf = cavity_pmf(FileSizeDistribution::binomial(0.2, 20, CodingRule{2}), 20, 10, 0.3);
  auto cav_lst = [&](double s) { return pmf.service_time_lst(s, 1.0); };
  const double es = pmf.mean_service_bits();
  const double h = 1e-5;
  const double deriv = (pk_workload_transform(0.3, cav_lst, es, h) -
                        pk_workload_transform(0.3, cav_lst, es, 2 * h)) / h;
  const double mean = pk_mean_workload(0.3, es, pmf.second_moment_bits());
  CHECK(deriv == doctest::Approx(mean).epsilon(1e-3));
}

TEST_CASE("Lambert W") {
  CHECK(lambert_w_principal(0.0) == 0.0);
  CHECK(lambert_w_principal(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lambert_w_principal(-0.2 * std::exp(-0.2)) == doctest::Approx(-0.2).epsilon(1e-13));
  CHECK(lambert_w_principal(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(lambert_w_lower(-0.2 * std::exp(-0.2)) ==
        doctest::Approx(-2.8603990584636847).epsilon(1e-12));
  CHECK(lambert_w_lower(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK_THROWS_AS(lambert_w_principal(-0.5), std::domain_error);
  CHECK_THROWS_AS(lambert_w_lower(0.1), std::domain_error);
  for (double x : {-0.36, -0.3, -0.1, -1e-3, -1e-8}) {
    const double w = lambert_w_lower(x);
    CHECK(w <= -1.0);
    CHECK(w * std::exp(w) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("M/D/1 tail exponent") {
  const double q = md1_tail_exponent(0.07, 10);
  CHECK(q > 0);
  CHECK(q == doctest::Approx(md1_tail_exponent_bisection(0.07, 10)).epsilon(1e-10));
  // Root of theta = lambda (exp(theta sigma) - 1).
  CHECK(q == doctest::Approx(0.07 * (std::exp(q * 10) - 1)).epsilon(1e-10));
  for (double alpha : {0.5, 2.0, 7.0})
    CHECK(md1_tail_exponent(0.07 * alpha, 10 / alpha) == doctest::Approx(alpha * q).epsilon(1e-9));
  CHECK_THROWS_AS(md1_tail_exponent(0.1, 10), std::domain_error);
  // Heavy-traffic limit 2(1 - rho)/(rho sigma).
  const double rho = 0.999, sigma = 2;
  CHECK(md1_tail_exponent(rho / sigma, sigma) ==
        doctest::Approx(2 * (1 - rho) / (rho * sigma)).epsilon(2e-3));
}

TEST_CASE("bounds") {
  const auto b1 = log_bound(1, 0.7, 10, 1);
  CHECK(b1.value == 10.0);
  const auto b20 = log_bound(20, 0.7, 10, 1);
  CHECK(b20.value == doctest::Approx(10 + std::log(20.0) / md1_tail_exponent(0.07, 10)));
  CHECK(b20.value > b1.value);
  CHECK_THROWS_AS(log_bound(3, 1.0, 10, 1), std::domain_error);
  CHECK_THROWS_AS(log_bound(0, 0.5, 10, 1), std::invalid_argument);

  // With unit mean chunks the harmonic bound is 1/mu + H(k)/(mu - rho).
  CHECK(harmonic_bound(1, 0.7, 1, 1).value == doctest::Approx(1 + 1 / 0.3));
  const auto h5 = harmonic_bound(5, 0.7, 1, 10);
  CHECK(h5.value == doctest::Approx(10 + 10 / 0.3 * stats::harmonic(5)));
  CHECK(*h5.alt_value == doctest::Approx(10 + stats::harmonic(5) / 0.3));
  CHECK_THROWS_AS(harmonic_bound(2, 1.5, 1, 10), std::domain_error);

  CHECK(expected_max_exponential(1, 0.5) == 2.0);
  CHECK(expected_max_exponential(2, 0.5) == 3.0);
}

TEST_CASE("chunk-scaling bound") {
  const double lp = 0.05, c = 10;  // lambda_p c = 0.5
  double first_gap = -1;
  double prev = INFINITY;
  for (int a : {1, 2, 4, 8, 16}) {
    const auto r = chunk_scaling_bound(20, a, lp, c);
    CHECK(r.rate == doctest::Approx(a * md1_tail_exponent(lp, c)).epsilon(1e-9));
    CHECK(r.value == doctest::Approx(c / a + std::log(20.0 * a) / r.rate));
    CHECK(r.value < prev);
    prev = r.value;
    // Both roots scale linearly in a, so their ratio does not move.
    if (first_gap < 0) first_gap = *r.relative_gap;
    CHECK(*r.relative_gap == doctest::Approx(first_gap).epsilon(1e-9));
  }
  CHECK_THROWS_AS(chunk_scaling_bound(5, 2, 0.2, 10), std::domain_error);
}

TEST_CASE("expected max of exponentials against Monte Carlo") {
  std::mt19937_64 rng(31);
  std::exponential_distribution<double> e(2.0);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    double mx = 0;
    for (int j = 0; j < 100; ++j) mx = std::max(mx, e(rng));
    sum += mx;
  }
  CHECK(std::abs(sum / n / expected_max_exponential(100, 2.0) - 1) < 0.01);
}

TEST_CASE("cavity queue simulation") {
  CavityPmf idle{{1.0}, 0.5, 10};
  for (double w : simulate_cavity_queue(idle, 1, 1000, 1)) REQUIRE(w == 0.0);

  const auto pmf = cavity_pmf(FileSizeDistribution::binomial(0.2, 20, CodingRule{2}), 20, 10, 0.3);
  const auto w = simulate_cavity_queue(pmf, 1, 200000, 2);
  CHECK(w.size() == 200000);
  const double pk = pk_mean_workload(0.3, pmf.mean_service_bits(), pmf.second_moment_bits());
  CHECK(std::abs(stats::mean_ci(w).mean / pk - 1) < 0.03);

  CavitySimOptions opt;
  opt.chunk_law = ChunkSize::exponential(10);
  const auto wr = simulate_cavity_queue(pmf, 1, 200000, 3, opt);
  // Random chunks double E[X^2] given the count: E[(lZ)^2] = 2 c^2 E[l^2].
  const double pk_r = pk_mean_workload(0.3, pmf.mean_service_bits(), 2 * pmf.second_moment_bits());
  CHECK(std::abs(stats::mean_ci(wr).mean / pk_r - 1) < 0.05);

  CavityPmf heavy{{0.0, 1.0}, 0.2, 10};
  CHECK_THROWS_AS(simulate_cavity_queue(heavy, 1, 100, 1), std::domain_error);
}

TEST_CASE("cavity max delays") {
  const std::vector<double> zeros(100, 0.0);
  for (double d : cavity_max_delays(zeros, 3, 10, 10, 1, 200, 4)) REQUIRE(d == 10.0);
  for (double d : cavity_max_delays(zeros, 25, 10, 10, 2, 200, 4)) REQUIRE(d == 15.0);
  const std::vector<double> pool{0, 5, 20};
  for (double d : cavity_max_delays(pool, 1, 10, 10, 1, 500, 5)) {
    const bool ok = d == 10.0 || d == 15.0 || d == 30.0;
    REQUIRE(ok);
  }
}

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   ecsim_acceptance [--only N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ecsim/analytics.hpp"
#include "ecsim/config.hpp"
#include "ecsim/engine.hpp"
#include "ecsim/placement.hpp"
#include "ecsim/policies.hpp"
#include "ecsim/presets.hpp"
#include "ecsim/stats.hpp"

using namespace ecsim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> icx_grid(std::span<const double> y) {
  const double hi = stats::quantile(y, 0.99);
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(hi * i / 19.0);
  return grid;
}

bool mean_leq(const std::vector<double>& a, const std::vector<double>& b, std::string& note) {
  const auto ma = stats::mean_ci(a), mb = stats::mean_ci(b);
  const double slack = std::hypot(ma.half_width, mb.half_width);
  note += fmt(" %.3f<=%.3f(+%.3f)", ma.mean, mb.mean, slack);
  return ma.mean <= mb.mean + slack;
}

ExperimentConfig fixed_chunk_run(int m, double p, std::vector<PolicyKind> policies,
                                 std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.params.m = m;
  cfg.params.mu = 1;
  cfg.params.chunk = ChunkSize::constant(10);
  cfg.dist = FileSizeDistribution::binomial(p, m, CodingRule{2});
  cfg.params.lambda = SystemParams::lambda_for_load(0.7, m, 10, cfg.dist);
  cfg.policies = std::move(policies);
  cfg.iterations = 100000;
  cfg.seed = seed;
  return cfg;
}

// -------------------------------------------------------------------------

Outcome sample_path_majorization() {
  Rng rng(stats::mix_seed(2024, 1));
  std::uniform_real_distribution<double> u(0, 100);
  const auto dist = FileSizeDistribution::binomial(0.3, 16, CodingRule{2});
  const int m = 16, instances = 1000;
  const double c = 10;
  int wf_bs = 0, wf_br = 0, bs_br = 0, used = 0;
  while (used < instances) {
    const int k = dist.sample(rng);
    if (k == 0) continue;
    ++used;
    const auto a = sample_placement(k, k + 2, m, rng);
    std::vector<double> w(m);
    for (auto& x : w) x = u(rng);
    const std::uint64_t tie = rng();
    Rng t1(tie), t2(tie), t3(tie);
    const auto s_wf = route_wf(a, k, w, c, t1);
    const auto s_bs = route_bs(a, k, w, t2);
    const auto s_br = route_br(a, k, t3);
    auto load = [&](const RoutingVector& s) {
      std::vector<double> out(w);
      for (int i = 0; i < m; ++i) out[i] += c * s[i];
      return out;
    };
    wf_bs += majorizes(load(s_wf), load(s_bs));
    wf_br += majorizes(load(s_wf), load(s_br));
    bs_br += submajorizes(load(s_bs), load(s_br));
  }
  return {wf_bs == instances && wf_br == instances && bs_br == instances,
          fmt("wf<bs %d/%d, wf<br %d/%d, bs<w br %d/%d", wf_bs, instances, wf_br, instances,
              bs_br, instances)};
}

Outcome delay_icx_ordering() {
  const auto res = run(fixed_chunk_run(50, 0.1, {PolicyKind::WF, PolicyKind::BS, PolicyKind::BR}, 2));
  const auto wf = res.delays(PolicyKind::WF), bs = res.delays(PolicyKind::BS),
             br = res.delays(PolicyKind::BR);
  const auto grid = icx_grid(br);
  const auto r1 = empirical_icx_leq(wf, br, grid);
  const auto r2 = empirical_icx_leq(bs, br, grid);
  std::string note;
  const bool m1 = mean_leq(wf, bs, note);
  const bool m2 = mean_leq(bs, br, note);
  return {r1.consistent && r2.consistent && m1 && m2,
          fmt("icx wf/br excess %.4f, bs/br excess %.4f; means", r1.worst_excess(),
              r2.worst_excess()) + note};
}

Outcome cavity_marginal() {
  auto cfg = fixed_chunk_run(20, 0.2, {PolicyKind::BR}, 3);
  cfg.warmup = 10000;
  cfg.iterations = 110000;
  // Every 10th arrival, so that both samples are close to independent draws.
  const auto engine = marginal_workload_samples(cfg, 0, 10);
  const auto pmf = cavity_pmf(cfg.dist, cfg.params.m, 10, cfg.params.lambda);
  CavitySimOptions opt;
  opt.stride = 10;
  const auto cavity = simulate_cavity_queue(pmf, 1, 100000, stats::mix_seed(3, 77), opt);
  const double ks = stats::ks_distance(engine, cavity);
  return {ks < 0.02, fmt("n=%zu/%zu KS=%.4f (<0.02), means %.2f vs %.2f", engine.size(),
                         cavity.size(), ks, stats::mean_ci(engine).mean,
                         stats::mean_ci(cavity).mean)};
}

// Criteria 4 and 5 share one run.
struct BrRun {
  ExperimentConfig cfg;
  RunResult res;
  std::map<int, StratumStat> strata;
};

const BrRun& br_run_m200() {
  static const BrRun cached = [] {
    BrRun r;
    r.cfg = fixed_chunk_run(200, 0.1, {PolicyKind::BR}, 4);
    r.res = run(r.cfg);
    r.strata = delay_strata(r.res.trace(PolicyKind::BR).records);
    return r;
  }();
  return cached;
}

Outcome association_bound() {
  const auto& br = br_run_m200();
  const auto& p = br.cfg.params;
  const auto& records = br.res.trace(PolicyKind::BR).records;
  const auto cav = cavity_pmf(br.cfg.dist, p.m, 10, p.lambda);
  CavitySimOptions opt;
  opt.stride = 10;
  const auto pool = simulate_cavity_queue(cav, p.mu, 1000000, stats::mix_seed(4, 5), opt);

  double worst_bound = -INFINITY, worst_small = -INFINITY, worst_icx = -INFINITY;
  int worst_k = 0, strata = 0;
  double oracle_at_worst = 0;
  bool icx_ok = true;
  for (const auto& [k, st] : br.strata) {
    if (st.count < 1000) continue;
    ++strata;
    const double bound = log_bound(k, 0.7, 10, 1).value;
    const auto d = stratum_delays(records, k);
    const auto oracle = cavity_max_delays(pool, k, p.m, 10, p.mu, 100000,
                                          stats::mix_seed(4, 100 + static_cast<std::uint64_t>(k)));
    const auto rep = empirical_icx_leq(d, oracle, icx_grid(oracle));
    icx_ok = icx_ok && rep.consistent;
    worst_icx = std::max(worst_icx, rep.worst_excess());
    if (k < 5) {
      worst_small = std::max(worst_small, st.mean - bound);
      continue;
    }
    if (st.mean - bound > worst_bound) {
      worst_bound = st.mean - bound;
      worst_k = k;
      oracle_at_worst = stats::mean_ci(oracle).mean;
    }
  }
  const bool bound_ok = worst_bound <= 0;
  std::string note = fmt("%d strata; mean-log_bound worst %+.3f at k=%d (cavity-oracle mean %.2f "
                         "vs bound %.2f) %s; icx vs cavity oracle excess %.4f %s",
                         strata, worst_bound, worst_k, oracle_at_worst,
                         log_bound(worst_k, 0.7, 10, 1).value, bound_ok ? "ok" : "VIOLATED",
                         worst_icx, icx_ok ? "ok" : "VIOLATED");
  if (worst_small > 0) note += fmt("; flag: k<5 excess %+.3f", worst_small);
  return {bound_ok && icx_ok, note};
}

Outcome logarithmic_regime() {
  const auto& br = br_run_m200();
  std::vector<double> x, y;
  for (const auto& [k, st] : br.strata) {
    if (st.count < 1000) continue;
    x.push_back(std::log(static_cast<double>(k)));
    y.push_back(st.mean);
  }
  const auto fit = stats::least_squares(x, y);
  return {fit.r_squared >= 0.95,
          fmt("%zu strata, slope %.3f, R^2=%.4f (>=0.95)", x.size(), fit.slope, fit.r_squared)};
}

Outcome harmonic_regime() {
  ExperimentConfig cfg;
  cfg.params.m = 200;
  cfg.params.mu = 1;
  cfg.params.chunk = ChunkSize::exponential(10);
  cfg.dist = FileSizeDistribution::geometric(0.25, CodingRule{2});
  cfg.params.lambda = SystemParams::lambda_for_load(0.7, 200, 10, cfg.dist);
  cfg.policies = {PolicyKind::WF, PolicyKind::BS, PolicyKind::BR};
  cfg.iterations = 100000;
  cfg.seed = 6;
  const auto res = run(cfg);
  const std::size_t min_count = 100;
  bool ok = true;
  std::string note;
  for (auto policy : cfg.policies) {
    double worst = -INFINITY, thin_worst = -INFINITY;
    int worst_k = 0, used = 0, thin = 0;
    for (const auto& [k, st] : delay_strata(res.trace(policy).records)) {
      const double excess = st.mean - harmonic_bound(k, 0.7, 1, 10).value;
      if (st.count < min_count) {
        ++thin;
        thin_worst = std::max(thin_worst, excess);
        continue;
      }
      ++used;
      if (excess > worst) worst = excess, worst_k = k;
    }
    ok = ok && worst <= 0;
    note += fmt("%s: %d strata worst %+.2f (k=%d); ", std::string(to_string(policy)).c_str(), used,
                worst, worst_k);
    if (thin > 0) note += fmt("[%d strata n<%zu, max %+.1f] ", thin, min_count, thin_worst);
  }
  return {ok, note};
}

Outcome numerics() {
  // Lambert W residual over [-1/e, 1e6].
  double worst_w = 0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  const double branch = -std::exp(-1.0);
  for (int i = 0; i < 10000; ++i) {
    double x;
    if (i % 2 == 0) {
      x = branch + (0 - branch) * u(rng);
    } else {
      x = std::pow(10.0, -8 + 14 * u(rng));
    }
    if (x == 0) continue;
    const double w = lambert_w_principal(x);
    worst_w = std::max(worst_w, std::abs(w * std::exp(w) - x) / std::abs(x));
  }
  double worst_q = 0;
  for (int i = 1; i <= 19; ++i) {
    const double ls = 0.05 * i, sigma = 10;
    const double a = md1_tail_exponent(ls / sigma, sigma);
    const double b = md1_tail_exponent_bisection(ls / sigma, sigma);
    worst_q = std::max(worst_q, std::abs(a - b) / std::max(1.0, a));
  }
  // M/D/1 at load 0.5 through the engine: one server, one block per file.
  ExperimentConfig cfg;
  cfg.params.m = 1;
  cfg.params.mu = 1;
  cfg.params.chunk = ChunkSize::constant(10);
  cfg.dist = FileSizeDistribution::delta(1);
  cfg.params.lambda = 0.05;
  cfg.iterations = 100000;
  cfg.seed = 7;
  cfg.record_workload = true;
  const double sim = stats::mean_ci(run(cfg).trace(PolicyKind::BR).watched_workload).mean;
  const double pk = pk_mean_workload(0.05, 10, 100);
  const double rel = std::abs(sim - pk) / pk;
  return {worst_w <= 1e-12 && worst_q <= 1e-8 && rel <= 0.02,
          fmt("W residual %.2e (<=1e-12), q vs bisection %.2e (<=1e-8), P-K %.4f vs sim %.4f "
              "rel %.4f (<=0.02)",
              worst_w, worst_q, pk, sim, rel)};
}

Outcome reproducibility() {
  const auto fs = parse_config("m=50\npi=binomial(0.2)\niters=20000\nmin_samples=100\nseed=8\n");
  const auto cr = parse_config("iters=5000\nm_grid=25,50\nseed=8\nthreads=2\n");
  const auto cs = parse_config("seed=8\n");
  int same = 0;
  same += preset_fig_filesize(fs) == preset_fig_filesize(fs);
  same += preset_fig_codingrate(cr) == preset_fig_codingrate(cr);
  same += preset_chunk_scaling(cs) == preset_chunk_scaling(cs);
  return {same == 3, fmt("%d/3 presets byte-identical across two runs", same)};
}

Outcome mutation_power() {
  const auto spec = parse_config("iters=20000\nseed=9\n");
  AuditOptions opts;
  opts.wf_slot = PolicyKind::BR;
  opts.path_instances = 1000;
  const auto report = preset_policy_audit(spec, opts);
  const auto* check = report.find("path.majorization.wf_bs");
  if (!check) return {false, "audit has no path.majorization.wf_bs check"};
  const double failed = 1.0 - check->statistic;
  return {check->verdict == Verdict::fail && failed >= 0.5,
          fmt("mislabelled audit: majorization fails in %.1f%% of instances (>=50%%)",
              100 * failed)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);

  const std::vector<Criterion> criteria{
      {1, "sample-path egalitarianism", 5, sample_path_majorization},
      {2, "delay icx ordering", 60, delay_icx_ordering},
      {3, "cavity-queue marginal", 30, cavity_marginal},
      {4, "association bound dominance", 180, association_bound},
      {5, "logarithmic regime", 180, logarithmic_regime},
      {6, "random-chunk harmonic bound", 120, harmonic_regime},
      {7, "numerics", 10, numerics},
      {8, "deterministic reproducibility", 120, reproducibility},
      {9, "mutation power", 60, mutation_power},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s criterion %d (%s): %s [%.1fs / %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id,
                c.name, o.detail.c_str(), secs, c.limit_s, in_time ? "" : " over limit");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

#pragma once

// Experiment presets. Each returns its CSV as a string so that callers decide
// where it goes; identical spec and seed give byte-identical output.

#include <string>
#include <vector>

#include "ecsim/config.hpp"

namespace ecsim {

/// Coupled BS/BR run over file-size strata.
/// Columns: k,policy,mean_delay,ci,bound_log
std::string preset_fig_filesize(const RunSpec& spec);

/// BS mean delay over a grid of server counts and redundancies alpha_k - k.
/// Defaults: lambda=0.1, binomial(0.5, m), c=14, mu=1, m in {25,50,100,200},
/// redundancy in {0,1,2,4}.
/// Columns: m,redundancy,mean_delay,ci
std::string preset_fig_codingrate(const RunSpec& spec);

/// Analytic bound when chunks are split a-fold.
/// Columns: a,k,bound_exact,bound_approx,relative_gap
std::string preset_chunk_scaling(const RunSpec& spec);

/// Rows of the per-record stream written by `run`.
/// Columns: n,k,policy,delay
std::string records_csv(const RunResult& result);

enum class Verdict { pass, fail, warn, skipped };

struct AuditCheck {
  std::string name;
  Verdict verdict = Verdict::pass;
  double statistic = 0;
  double threshold = 0;
};

struct AuditReport {
  std::vector<AuditCheck> checks;

  bool passed() const;
  const AuditCheck* find(const std::string& name) const;
  /// One line per check: name verdict statistic threshold.
  std::string to_text() const;
};

struct AuditOptions {
  /// Routing used in the WF slot of the sample-path checks; BR here is the
  /// mutation that must be caught.
  PolicyKind wf_slot = PolicyKind::WF;
  int path_instances = 1000;
};

/// Sample-path majorization checks on random instances (m=16, W uniform on
/// [0,100]^m, k ~ binomial(0.3,16), alpha=k+2, c=10, shared tie-break draws),
/// then a coupled WF/BS/BR run from the spec (defaults m=50, binomial(0.1),
/// alpha=k+2, rho=0.7, c=10, mu=1) for icx and bound checks. Bound checks are
/// skipped when rho >= mu.
AuditReport preset_policy_audit(const RunSpec& spec, const AuditOptions& opts = {});

}  // namespace ecsim

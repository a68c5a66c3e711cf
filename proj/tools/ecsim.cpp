// ecsim: workload-recursion simulator for erasure-coded file delivery.
//
//   ecsim run    --config run.cfg [--out records.csv]
//   ecsim preset fig_filesize --config p.cfg --out fig2.csv
//   ecsim audit  --seed 7

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ecsim/config.hpp"
#include "ecsim/kernels.hpp"
#include "ecsim/presets.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> iters;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Key-value config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output path (default: config 'out', else stdout)");
  cmd->add_option("--seed", f.seed, "Base seed (overrides the config)");
  cmd->add_option("--iters", f.iters, "Recursion iterates per run")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
}

ecsim::RunSpec load_spec(const CommonFlags& f) {
  std::string text;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  ecsim::RunSpec spec = ecsim::parse_config(text, f.seed);
  if (f.iters) {
    spec.iters = *f.iters;
    if (spec.warmup && *spec.warmup >= *f.iters) spec.warmup.reset();
  }
  if (f.threads) spec.threads = *f.threads;
  if (!f.out.empty()) spec.out = f.out;
  return spec;
}

void emit(const ecsim::RunSpec& spec, const std::string& body) {
  if (!spec.out || *spec.out == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(*spec.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + *spec.out);
  out << body;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay simulator for erasure-coded file delivery (BR, BS, WF policies)"};
  app.require_subcommand(1);

  CommonFlags run_flags, preset_flags, audit_flags;
  std::string preset_name;
  bool mislabel = false;

  auto* run_cmd = app.add_subcommand("run", "Run the recursion and write per-arrival delays");
  add_common(run_cmd, run_flags);

  auto* preset_cmd = app.add_subcommand("preset", "Run a named experiment preset");
  preset_cmd->add_option("name", preset_name, "fig_filesize | fig_codingrate | chunk_scaling")
      ->required();
  add_common(preset_cmd, preset_flags);

  auto* audit_cmd = app.add_subcommand("audit", "Ordering and bound checks, one line per check");
  add_common(audit_cmd, audit_flags);
  audit_cmd->add_flag("--mislabel-br-as-wf", mislabel,
                      "Route the WF slot with BR (the audit should then fail)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto spec = load_spec(run_flags);
      const auto result = ecsim::run(spec.experiment());
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      emit(spec, ecsim::records_csv(result));
    } else if (*preset_cmd) {
      auto spec = load_spec(preset_flags);
      if (spec.preset && *spec.preset != preset_name) {
        std::cerr << "warning: config names preset '" << *spec.preset << "', running '"
                  << preset_name << "'\n";
      }
      std::string body;
      if (preset_name == "fig_filesize") {
        body = ecsim::preset_fig_filesize(spec);
      } else if (preset_name == "fig_codingrate") {
        body = ecsim::preset_fig_codingrate(spec);
      } else if (preset_name == "chunk_scaling") {
        body = ecsim::preset_chunk_scaling(spec);
      } else {
        std::cerr << "unknown preset '" << preset_name << "'\n";
        return 2;
      }
      emit(spec, body);
    } else if (*audit_cmd) {
      const auto spec = load_spec(audit_flags);
      ecsim::AuditOptions opts;
      if (mislabel) opts.wf_slot = ecsim::PolicyKind::BR;
      const auto report = ecsim::preset_policy_audit(spec, opts);
      emit(spec, report.to_text());
      return report.passed() ? 0 : 1;
    }
  } catch (const ecsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "ecsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace ecsim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

double to_real(const std::string& key, std::string_view v) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

template <typename Int>
Int to_int(const std::string& key, std::string_view v) {
  Int out = 0;
  double as_real = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && ptr == v.data() + v.size()) return out;
  // Accept integral reals such as 1e5.
  auto [p2, e2] = std::from_chars(v.data(), v.data() + v.size(), as_real);
  if (e2 == std::errc() && p2 == v.data() + v.size() && as_real == static_cast<double>(static_cast<Int>(as_real))) {
    return static_cast<Int>(as_real);
  }
  throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
}

double positive(const std::string& key, double v) {
  if (!(v > 0)) throw ConfigError(key, "must be positive");
  return v;
}

std::vector<int> int_list(const std::string& key, std::string_view v) {
  std::vector<int> out;
  for (auto part : split(v, ',')) out.push_back(to_int<int>(key, part));
  if (out.empty()) throw ConfigError(key, "list is empty");
  return out;
}

// "name(args)" -> {name, args}
std::pair<std::string_view, std::string_view> call_form(const std::string& key, std::string_view v) {
  const auto open = v.find('(');
  if (open == std::string_view::npos || v.back() != ')') {
    throw ConfigError(key, "expected name(args), got '" + std::string(v) + "'");
  }
  return {trim(v.substr(0, open)), trim(v.substr(open + 1, v.size() - open - 2))};
}

PiSpec parse_pi(const std::string& key, std::string_view v) {
  auto [name, args] = call_form(key, v);
  PiSpec pi;
  pi.family = std::string(name);
  const auto parts = split(args, ',');
  if (name == "binomial") {
    if (parts.empty() || parts.size() > 2) throw ConfigError(key, "binomial(p[,n])");
    pi.p = to_real(key, parts[0]);
    if (parts.size() == 2) pi.n = to_int<int>(key, parts[1]);
  } else if (name == "geometric") {
    if (parts.size() != 1) throw ConfigError(key, "geometric(p)");
    pi.p = to_real(key, parts[0]);
  } else if (name == "delta") {
    if (parts.size() != 1) throw ConfigError(key, "delta(k)");
    pi.k0 = to_int<int>(key, parts[0]);
  } else if (name == "explicit") {
    for (auto part : parts) {
      const auto colon = part.find(':');
      if (colon == std::string_view::npos) throw ConfigError(key, "explicit(k:p,...)");
      pi.entries.emplace_back(to_int<int>(key, trim(part.substr(0, colon))),
                              to_real(key, trim(part.substr(colon + 1))));
    }
  } else {
    throw ConfigError(key, "unknown distribution '" + std::string(name) + "'");
  }
  // Validate eagerly so errors name the key.
  try {
    (void)pi.bind(pi.n.value_or(std::max(1, pi.k0)), CodingRule{});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
  return pi;
}

int parse_alpha(const std::string& key, std::string_view v) {
  std::string s;
  for (char ch : v) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  if (s == "k") return 0;
  if (s.rfind("k+", 0) == 0) {
    const int r = to_int<int>(key, std::string_view(s).substr(2));
    if (r < 0) throw ConfigError(key, "redundancy must be non-negative");
    return r;
  }
  throw ConfigError(key, "expected 'k' or 'k+r', got '" + std::string(v) + "'");
}

ChunkSize parse_chunk_dist(const std::string& key, std::string_view v) {
  auto [name, args] = call_form(key, v);
  const double x = positive(key, to_real(key, args));
  if (name == "exp" || name == "exponential") return ChunkSize::exponential(x);
  if (name == "const" || name == "constant") return ChunkSize::constant(x);
  throw ConfigError(key, "expected exp(mean) or const(c)");
}

std::vector<PolicyKind> parse_policies(const std::string& key, std::string_view v) {
  std::vector<PolicyKind> out;
  for (auto part : split(v, ',')) {
    auto p = parse_policy(part);
    if (!p) throw ConfigError(key, "unknown policy '" + std::string(part) + "'");
    if (std::find(out.begin(), out.end(), *p) != out.end()) {
      throw ConfigError(key, "policy listed twice");
    }
    out.push_back(*p);
  }
  return out;
}

bool parse_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(key, "expected true or false");
}

}  // namespace

FileSizeDistribution PiSpec::bind(int m, CodingRule rule) const {
  if (family == "binomial") return FileSizeDistribution::binomial(p, n.value_or(m), rule);
  if (family == "geometric") return FileSizeDistribution::geometric(p, rule);
  if (family == "delta") return FileSizeDistribution::delta(k0, rule);
  return FileSizeDistribution::explicit_pmf(entries, rule);
}

std::string PiSpec::describe() const { return bind(n.value_or(1), {}).describe(); }

RunSpec parse_config(std::string_view text, std::optional<std::uint64_t> seed_override) {
  RunSpec spec;
  std::set<std::string> seen;
  bool have_seed = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": missing key");
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
    if (value.empty()) throw ConfigError(key, "missing value");

    if (key == "m") {
      spec.m = to_int<int>(key, value);
      if (*spec.m < 1) throw ConfigError(key, "must be >= 1");
    } else if (key == "mu") {
      spec.mu = positive(key, to_real(key, value));
    } else if (key == "c") {
      spec.c = positive(key, to_real(key, value));
    } else if (key == "chunk_dist") {
      spec.chunk_dist = parse_chunk_dist(key, value);
    } else if (key == "lambda") {
      spec.lambda = positive(key, to_real(key, value));
    } else if (key == "rho") {
      spec.rho = positive(key, to_real(key, value));
    } else if (key == "pi") {
      spec.pi = parse_pi(key, value);
    } else if (key == "alpha") {
      spec.redundancy = parse_alpha(key, value);
    } else if (key == "policy" || key == "policies") {
      spec.policies = parse_policies(key, value);
      if (key == "policy" && spec.policies->size() != 1) {
        throw ConfigError(key, "use 'policies' for more than one policy");
      }
    } else if (key == "iters") {
      spec.iters = to_int<std::int64_t>(key, value);
      if (*spec.iters < 1) throw ConfigError(key, "must be positive");
    } else if (key == "warmup") {
      spec.warmup = to_int<std::int64_t>(key, value);
      if (*spec.warmup < 0) throw ConfigError(key, "must be non-negative");
    } else if (key == "seed") {
      spec.seed = to_int<std::uint64_t>(key, value);
      have_seed = true;
    } else if (key == "mode") {
      if (value != "fixed" && value != "random") throw ConfigError(key, "expected fixed or random");
      spec.mode = std::string(value);
    } else if (key == "coupling") {
      spec.coupling = parse_bool(key, value);
    } else if (key == "preset") {
      spec.preset = std::string(value);
    } else if (key == "out") {
      spec.out = std::string(value);
    } else if (key == "k_grid") {
      spec.k_grid = int_list(key, value);
    } else if (key == "m_grid") {
      spec.m_grid = int_list(key, value);
    } else if (key == "a_grid") {
      spec.a_grid = int_list(key, value);
    } else if (key == "redundancy_grid") {
      spec.redundancy_grid = int_list(key, value);
    } else if (key == "min_samples") {
      spec.min_samples = to_int<int>(key, value);
    } else if (key == "threads") {
      spec.threads = to_int<int>(key, value);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }

  if (seen.count("policy") && seen.count("policies")) {
    throw ConfigError("policies", "give either 'policy' or 'policies'");
  }
  if (spec.rho && spec.lambda) {
    throw ConfigError("lambda", "rho and lambda both given; the load is over-determined");
  }
  if (spec.c && spec.chunk_dist) {
    throw ConfigError("chunk_dist", "c and chunk_dist both given");
  }
  if (spec.mode == "fixed" && spec.chunk_dist && spec.chunk_dist->random()) {
    throw ConfigError("mode", "fixed mode conflicts with a random chunk_dist");
  }
  if (spec.mode == "random" && spec.chunk_dist && !spec.chunk_dist->random()) {
    throw ConfigError("mode", "random mode conflicts with a constant chunk_dist");
  }
  if (spec.iters && spec.warmup && *spec.warmup >= *spec.iters) {
    throw ConfigError("warmup", "must be smaller than iters");
  }
  if (seed_override) {
    spec.seed = *seed_override;
    have_seed = true;
  }
  if (!have_seed) throw ConfigError("seed", "a seed is required for reproducible runs");
  return spec;
}

ExperimentConfig RunSpec::experiment(std::optional<int> m_override) const {
  ExperimentConfig cfg;
  auto& p = cfg.params;
  p.m = m_override.value_or(m.value_or(200));
  p.mu = mu.value_or(1.0);
  if (chunk_dist) {
    p.chunk = *chunk_dist;
  } else {
    const double cc = c.value_or(10.0);
    p.chunk = mode == "random" ? ChunkSize::exponential(cc) : ChunkSize::constant(cc);
  }
  cfg.dist = pi.value_or(PiSpec{}).bind(p.m, CodingRule{redundancy.value_or(2)});
  if (lambda) {
    p.lambda = *lambda;
  } else {
    p.lambda = SystemParams::lambda_for_load(rho.value_or(0.7), p.m, p.chunk.mean, cfg.dist);
  }
  cfg.policies = policies.value_or(std::vector<PolicyKind>{PolicyKind::BR});
  cfg.iterations = iters.value_or(100000);
  cfg.warmup = warmup.value_or(-1);
  cfg.seed = seed;
  cfg.coupling = coupling.value_or(true);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }
  return cfg;
}

}  // namespace ecsim

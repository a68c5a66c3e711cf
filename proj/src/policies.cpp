#include "ecsim/policies.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace ecsim {

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::BR: return "BR";
    case PolicyKind::BS: return "BS";
    case PolicyKind::WF: return "WF";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  if (name == "BR" || name == "br") return PolicyKind::BR;
  if (name == "BS" || name == "bs") return PolicyKind::BS;
  if (name == "WF" || name == "wf") return PolicyKind::WF;
  return std::nullopt;
}

namespace {

struct Balanced {
  int base = 0;
  int extra = 0;
  std::vector<int> eligible;  // servers with a[i] > base, ascending index
};

Balanced balanced_split(const PlacementVector& a, int k) {
  if (k < 0) throw std::invalid_argument("k must be non-negative");
  if (a.total() < k) throw std::invalid_argument("placement holds fewer than k blocks");
  const int m = static_cast<int>(a.size());
  Balanced b;
  b.base = k / m;
  b.extra = k - m * b.base;
  for (int i = 0; i < m; ++i) {
    if (a[i] < b.base) throw std::invalid_argument("placement cannot supply floor(k/m) per server");
    if (a[i] > b.base) b.eligible.push_back(i);
  }
  if (static_cast<int>(b.eligible.size()) < b.extra) {
    throw std::invalid_argument("too few servers with spare blocks for a balanced request");
  }
  return b;
}

// Moves a uniform `count`-subset of v to its front.
void partial_shuffle(std::vector<int>& v, int count, Rng& rng) {
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < count; ++i) {
    const int j = std::uniform_int_distribution<int>(i, n - 1)(rng);
    std::swap(v[i], v[j]);
  }
}

void require_workload(const PlacementVector& a, std::span<const double> w) {
  if (w.size() != a.size()) throw std::invalid_argument("workload and placement differ in length");
}

}  // namespace

RoutingVector route_br(const PlacementVector& a, int k, Rng& rng) {
  Balanced b = balanced_split(a, k);
  RoutingVector s{std::vector<int>(a.size(), b.base)};
  partial_shuffle(b.eligible, b.extra, rng);
  for (int i = 0; i < b.extra; ++i) s.blocks[b.eligible[i]] += 1;
  return s;
}

RoutingVector route_bs(const PlacementVector& a, int k, std::span<const double> w, Rng& rng,
                       OpCounter* ops) {
  require_workload(a, w);
  Balanced b = balanced_split(a, k);
  RoutingVector s{std::vector<int>(a.size(), b.base)};
  if (b.extra == 0) return s;

  // Value of the extra-th smallest eligible workload.
  std::vector<int> order = b.eligible;
  std::uint64_t cmp = 0;
  std::nth_element(order.begin(), order.begin() + (b.extra - 1), order.end(),
                   [&](int x, int y) {
                     ++cmp;
                     return w[x] < w[y];
                   });
  const double cut = w[order[b.extra - 1]];

  std::vector<int> ties;
  int taken = 0;
  for (int i : b.eligible) {
    if (w[i] < cut) {
      s.blocks[i] += 1;
      ++taken;
    } else if (w[i] == cut) {
      ties.push_back(i);
    }
  }
  if (ops) ops->comparisons += cmp + 2 * b.eligible.size();
  const int need = b.extra - taken;
  partial_shuffle(ties, need, rng);
  for (int i = 0; i < need; ++i) s.blocks[ties[i]] += 1;
  return s;
}

RoutingVector route_wf(const PlacementVector& a, int k, std::span<const double> w, double c,
                       Rng& rng, OpCounter* ops) {
  require_workload(a, w);
  if (!(c > 0)) throw std::invalid_argument("chunk size must be positive");
  if (k < 0) throw std::invalid_argument("k must be non-negative");
  if (a.total() < k) throw std::invalid_argument("placement holds fewer than k blocks");

  // (effective load, random key, server); a fresh key per insertion keeps
  // ties uniform.
  using Entry = std::tuple<double, std::uint64_t, int>;
  std::uint64_t cmp = 0;
  auto later = [&cmp](const Entry& x, const Entry& y) {
    ++cmp;
    return x > y;
  };
  std::vector<Entry> storage;
  storage.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0) storage.emplace_back(w[i], rng(), static_cast<int>(i));
  }
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> heap(later, std::move(storage));

  RoutingVector s{std::vector<int>(a.size(), 0)};
  for (int step = 0; step < k; ++step) {
    const int i = std::get<2>(heap.top());
    heap.pop();
    const int t = ++s.blocks[i];
    if (t < a[i]) heap.emplace(w[i] + c * t, rng(), i);
  }
  if (ops) ops->comparisons += cmp;
  return s;
}

RoutingVector route(PolicyKind policy, const PlacementVector& a, int k,
                    std::span<const double> w, double c, Rng& rng) {
  switch (policy) {
    case PolicyKind::BR: return route_br(a, k, rng);
    case PolicyKind::BS: return route_bs(a, k, w, rng);
    case PolicyKind::WF: return route_wf(a, k, w, c, rng);
  }
  throw std::invalid_argument("unknown policy");
}

}  // namespace ecsim

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "ecsim/core.hpp"

namespace ecsim {

enum class PolicyKind { BR, BS, WF };

std::string_view to_string(PolicyKind p);
std::optional<PolicyKind> parse_policy(std::string_view name);

/// Comparison counter for complexity checks.
struct OpCounter {
  std::uint64_t comparisons = 0;
};

/// Balanced Random: floor(k/m) blocks from every server, the remaining
/// k mod m from a uniformly random subset of servers that still hold a block.
/// Ignores workload.
RoutingVector route_br(const PlacementVector& a, int k, Rng& rng);

/// Batch Sampling: balanced like BR, but the remaining blocks go to the
/// eligible servers with the least workload. Ties at the cut are broken
/// uniformly, with the same draws BR would make, so a flat workload gives
/// BR's choice exactly.
RoutingVector route_bs(const PlacementVector& a, int k, std::span<const double> w, Rng& rng,
                       OpCounter* ops = nullptr);

/// Water-Filling: k sequential picks of the server minimizing
/// w[i] + c * taken[i] among servers with blocks left, ties uniform.
RoutingVector route_wf(const PlacementVector& a, int k, std::span<const double> w, double c,
                       Rng& rng, OpCounter* ops = nullptr);

RoutingVector route(PolicyKind policy, const PlacementVector& a, int k,
                    std::span<const double> w, double c, Rng& rng);

}  // namespace ecsim

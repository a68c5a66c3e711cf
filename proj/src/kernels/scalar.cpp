#include <algorithm>
#include <limits>

#include "ecsim/kernels.hpp"

namespace ecsim::kernels {

namespace {

void advance_scalar(std::span<double> w, std::span<const int> s, double chunk, double drain) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = w[i] + chunk * static_cast<double>(s[i]) - drain;
    w[i] = v > 0.0 ? v : 0.0;
  }
}

void drain_scalar(std::span<double> w, double drain) {
  for (double& x : w) {
    const double v = x - drain;
    x = v > 0.0 ? v : 0.0;
  }
}

double request_max_scalar(std::span<const double> w, std::span<const int> s, double chunk) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (s[i] > 0) best = std::max(best, w[i] + chunk * static_cast<double>(s[i]));
  }
  return best;
}

double total_scalar(std::span<const double> w) {
  double t = 0;
  for (double x : w) t += x;
  return t;
}

constexpr KernelTable kScalar{"scalar", advance_scalar, drain_scalar, request_max_scalar,
                              total_scalar};

}  // namespace

const KernelTable& scalar() { return kScalar; }

}  // namespace ecsim::kernels

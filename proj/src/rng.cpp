#include "metaet/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace metaet {

double Rng::next_normal() {
  // Box-Muller; u1 is kept away from 0 so the log stays finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<int> Rng::sample_indices(int n, int k) {
  if (k < 0 || n < 0 || k > n) {
    throw std::invalid_argument("sample_indices: need 0 <= k <= n");
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    const int j =
        i + static_cast<int>(next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace metaet

#include "qdc/rng.hpp"

#include <cmath>

namespace qdc {

double Xoshiro256::next_gaussian() {
  // Box-Muller; discards the second value to keep the stream layout simple.
  for (;;) {
    const double u1 = next_double();
    const double u2 = next_double();
    if (u1 <= 0.0) continue;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
}

std::vector<std::size_t> random_permutation(std::size_t n, Xoshiro256& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

}  // namespace qdc

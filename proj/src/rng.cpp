#include "adjrobust/rng.hpp"

#include <cmath>

namespace adjrobust {

double CounterRng::normal(std::uint64_t i) const {
  const double u1 = uniform(2 * i);
  const double u2 = uniform(2 * i + 1);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace adjrobust

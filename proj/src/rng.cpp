// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/rng.hpp"

#include <cmath>

namespace nly::rng {

double EventRng::gauss() {
  const double u1 = uniform_pos();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace nly::rng

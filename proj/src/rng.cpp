#include "spectraph/rng.hpp"

#include <cmath>
#include <numbers>

namespace spectraph {

std::uint64_t cell_seed(std::uint64_t user_seed, std::string_view dataset, std::uint64_t sigma_index,
                        std::uint64_t repetition) {
  std::uint64_t s = derive_seed(user_seed, hash_name(dataset));
  s = derive_seed(s, sigma_index);
  return derive_seed(s, repetition);
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace spectraph

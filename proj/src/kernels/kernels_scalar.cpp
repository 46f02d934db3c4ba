#include "spectraph/kernels.hpp"

namespace spectraph::kernels::scalar {

double squared_l2(const double* a, const double* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

double dot(const double* a, const double* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t k = 0; k < dim; ++k) acc += a[k] * b[k];
  return acc;
}

void squared_l2_many(const double* x, const double* rows, std::size_t count, std::size_t dim, double* out) {
  for (std::size_t r = 0; r < count; ++r) out[r] = squared_l2(x, rows + r * dim, dim);
}

}  // namespace spectraph::kernels::scalar

#pragma once

// Inner-loop kernels with a portable scalar reference and an AVX2/FMA variant.
// The variant is chosen once at startup from CPUID; SPECTRAPH_FORCE_SCALAR=1 in
// the environment pins the scalar path.

#include <cstddef>
#include <string_view>

namespace spectraph::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  double (*squared_l2)(const double* a, const double* b, std::size_t dim);
  double (*dot)(const double* a, const double* b, std::size_t dim);
  /// out[r] = ||x - rows[r]||^2 for `count` row-major rows of length dim.
  void (*squared_l2_many)(const double* x, const double* rows, std::size_t count, std::size_t dim, double* out);
};

const KernelTable& scalar_table();
/// Null when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();

Isa active_isa();
std::string_view isa_name(Isa isa);
/// Overrides the dispatch (tests). Throws if the ISA is unavailable.
void set_active_isa(Isa isa);
const KernelTable& active();

inline double squared_l2(const double* a, const double* b, std::size_t dim) {
  return active().squared_l2(a, b, dim);
}
inline double dot(const double* a, const double* b, std::size_t dim) { return active().dot(a, b, dim); }

namespace scalar {
double squared_l2(const double* a, const double* b, std::size_t dim);
double dot(const double* a, const double* b, std::size_t dim);
void squared_l2_many(const double* x, const double* rows, std::size_t count, std::size_t dim, double* out);
}  // namespace scalar

namespace avx2 {
double squared_l2(const double* a, const double* b, std::size_t dim);
double dot(const double* a, const double* b, std::size_t dim);
void squared_l2_many(const double* x, const double* rows, std::size_t count, std::size_t dim, double* out);
}  // namespace avx2

}  // namespace spectraph::kernels

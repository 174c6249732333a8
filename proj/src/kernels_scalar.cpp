#include <algorithm>

#include "kernels_impl.hpp"

// Reference kernels. The SIMD variants replicate these operation for
// operation; any change here must be mirrored in kernels_avx2.cpp or the
// bitwise equivalence tests will catch the drift.

namespace gcms::kernels::scalar {

void max_accumulate(double* acc, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] = std::max(acc[i], x[i]);
  }
}

double max_value(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    m = std::max(m, x[i]);
  }
  return m;
}

void divide_scalar(double* x, double d, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    x[i] /= d;
  }
}

void divide_where_positive(double* x, const double* denom, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (denom[i] > 0.0) {
      x[i] /= denom[i];
    }
  }
}

void lerp_clamped(double* dst, const double* a, const double* b, double u,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::min(a[i], b[i]);
    const double hi = std::max(a[i], b[i]);
    const double t = a[i] + u * (b[i] - a[i]);
    dst[i] = std::min(std::max(t, lo), hi);
  }
}

void gather_lerp(double* dst, const double* src, const std::int32_t* i0,
                 const std::int32_t* i1, const double* frac, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double s0 = src[i0[j]];
    const double s1 = src[i1[j]];
    const double lo = std::min(s0, s1);
    const double hi = std::max(s0, s1);
    const double t = s0 + frac[j] * (s1 - s0);
    dst[j] = std::min(std::max(t, lo), hi);
  }
}

void axpy(double* y, const double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

}  // namespace gcms::kernels::scalar

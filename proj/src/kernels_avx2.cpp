#if defined(GCMS_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>

#include "kernels_impl.hpp"

// AVX2 lane. Every element goes through the same IEEE mul/add/div/min/max
// as the scalar reference (no fma, no reordered reductions except max,
// which is associative for the non-NaN inputs these kernels see), so the
// two backends agree bit for bit.

namespace gcms::kernels::avx2 {

namespace {

inline __m256d clamp_pd(__m256d t, __m256d a, __m256d b) {
  const __m256d lo = _mm256_min_pd(a, b);
  const __m256d hi = _mm256_max_pd(a, b);
  return _mm256_min_pd(_mm256_max_pd(t, lo), hi);
}

}  // namespace

void max_accumulate(double* acc, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(acc + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(acc + i, _mm256_max_pd(va, vx));
  }
  for (; i < n; ++i) {
    acc[i] = std::max(acc[i], x[i]);
  }
}

double max_value(const double* x, std::size_t n) {
  if (n < 4) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
    return m;
  }
  __m256d vm = _mm256_loadu_pd(x);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    vm = _mm256_max_pd(vm, _mm256_loadu_pd(x + i));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vm);
  double m = std::max(std::max(lanes[0], lanes[1]),
                      std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    m = std::max(m, x[i]);
  }
  return m;
}

void divide_scalar(double* x, double d, std::size_t n) {
  const __m256d vd = _mm256_set1_pd(d);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_div_pd(_mm256_loadu_pd(x + i), vd));
  }
  for (; i < n; ++i) {
    x[i] /= d;
  }
}

void divide_where_positive(double* x, const double* denom, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vd = _mm256_loadu_pd(denom + i);
    const __m256d q = _mm256_div_pd(vx, vd);
    const __m256d mask = _mm256_cmp_pd(vd, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(x + i, _mm256_blendv_pd(vx, q, mask));
  }
  for (; i < n; ++i) {
    if (denom[i] > 0.0) x[i] /= denom[i];
  }
}

void lerp_clamped(double* dst, const double* a, const double* b, double u,
                  std::size_t n) {
  const __m256d vu = _mm256_set1_pd(u);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d t =
        _mm256_add_pd(va, _mm256_mul_pd(vu, _mm256_sub_pd(vb, va)));
    _mm256_storeu_pd(dst + i, clamp_pd(t, va, vb));
  }
  for (; i < n; ++i) {
    const double lo = std::min(a[i], b[i]);
    const double hi = std::max(a[i], b[i]);
    const double t = a[i] + u * (b[i] - a[i]);
    dst[i] = std::min(std::max(t, lo), hi);
  }
}

void gather_lerp(double* dst, const double* src, const std::int32_t* i0,
                 const std::int32_t* i1, const double* frac, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m128i vi0 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(i0 + j));
    const __m128i vi1 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(i1 + j));
    const __m256d s0 = _mm256_i32gather_pd(src, vi0, 8);
    const __m256d s1 = _mm256_i32gather_pd(src, vi1, 8);
    const __m256d f = _mm256_loadu_pd(frac + j);
    const __m256d t =
        _mm256_add_pd(s0, _mm256_mul_pd(f, _mm256_sub_pd(s1, s0)));
    _mm256_storeu_pd(dst + j, clamp_pd(t, s0, s1));
  }
  for (; j < n; ++j) {
    const double s0 = src[i0[j]];
    const double s1 = src[i1[j]];
    const double lo = std::min(s0, s1);
    const double hi = std::max(s0, s1);
    const double t = s0 + frac[j] * (s1 - s0);
    dst[j] = std::min(std::max(t, lo), hi);
  }
}

void axpy(double* y, const double* x, double a, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) {
    y[i] += a * x[i];
  }
}

}  // namespace gcms::kernels::avx2

#endif  // GCMS_HAVE_AVX2

#pragma once

#include <cstddef>
#include <cstdint>

namespace gcms::kernels {

// Raster and training inner loops run through these kernels. Each has a
// scalar reference implementation and an AVX2 variant selected once at
// startup; both perform the same IEEE operations per element, so results
// are bit-identical across backends (the equivalence tests assert exactly
// that). The env var GCMS_KERNELS=scalar|avx2 overrides detection.
enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_available(Backend b);
void force_backend(Backend b);  // testing hook; throws if unavailable
const char* backend_name(Backend b);

// acc[i] = max(acc[i], x[i])
void max_accumulate(double* acc, const double* x, std::size_t n);

// max over x[0..n); requires n >= 1. Inputs must not be NaN.
double max_value(const double* x, std::size_t n);

// x[i] = x[i] / d
void divide_scalar(double* x, double d, std::size_t n);

// x[i] = denom[i] > 0 ? x[i] / denom[i] : x[i]
void divide_where_positive(double* x, const double* denom, std::size_t n);

// dst[i] = a[i] + u * (b[i] - a[i]), clamped to [min(a,b), max(a,b)].
// The clamp makes interpolation incapable of overshooting; the (b - a)
// form keeps u = 0 an exact identity and constants exactly constant.
void lerp_clamped(double* dst, const double* a, const double* b, double u,
                  std::size_t n);

// dst[j] = s0 + frac[j] * (s1 - s0) with s0 = src[i0[j]], s1 = src[i1[j]],
// clamped to [min(s0,s1), max(s0,s1)]. Row resampling along the time axis.
void gather_lerp(double* dst, const double* src, const std::int32_t* i0,
                 const std::int32_t* i1, const double* frac, std::size_t n);

// y[i] += a * x[i]
void axpy(double* y, const double* x, double a, std::size_t n);

}  // namespace gcms::kernels

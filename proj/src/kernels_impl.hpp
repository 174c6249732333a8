#pragma once

#include <cstddef>
#include <cstdint>

// Internal: per-backend kernel entry points. Signatures mirror the public
// API in gcms/kernels.hpp; dispatch lives in kernels.cpp.

namespace gcms::kernels::scalar {
void max_accumulate(double* acc, const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
void divide_scalar(double* x, double d, std::size_t n);
void divide_where_positive(double* x, const double* denom, std::size_t n);
void lerp_clamped(double* dst, const double* a, const double* b, double u,
                  std::size_t n);
void gather_lerp(double* dst, const double* src, const std::int32_t* i0,
                 const std::int32_t* i1, const double* frac, std::size_t n);
void axpy(double* y, const double* x, double a, std::size_t n);
}  // namespace gcms::kernels::scalar

#if defined(GCMS_HAVE_AVX2)
namespace gcms::kernels::avx2 {
void max_accumulate(double* acc, const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
void divide_scalar(double* x, double d, std::size_t n);
void divide_where_positive(double* x, const double* denom, std::size_t n);
void lerp_clamped(double* dst, const double* a, const double* b, double u,
                  std::size_t n);
void gather_lerp(double* dst, const double* src, const std::int32_t* i0,
                 const std::int32_t* i1, const double* frac, std::size_t n);
void axpy(double* y, const double* x, double a, std::size_t n);
}  // namespace gcms::kernels::avx2
#endif

#include "gcms/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "gcms/errors.hpp"
#include "kernels_impl.hpp"

namespace gcms::kernels {

namespace {

bool avx2_supported() {
#if defined(GCMS_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("GCMS_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::avx2;
    return Backend::scalar;
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = detect();

}  // namespace

Backend active_backend() { return g_backend; }

bool backend_available(Backend b) {
  return b == Backend::scalar || avx2_supported();
}

void force_backend(Backend b) {
  if (!backend_available(b)) {
    throw InputError("kernel backend not available on this machine: " +
                     std::string(backend_name(b)));
  }
  g_backend = b;
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

#if defined(GCMS_HAVE_AVX2)
#define GCMS_DISPATCH(fn, ...)                  \
  do {                                          \
    if (g_backend == Backend::avx2) {           \
      return avx2::fn(__VA_ARGS__);             \
    }                                           \
    return scalar::fn(__VA_ARGS__);             \
  } while (0)
#else
#define GCMS_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void max_accumulate(double* acc, const double* x, std::size_t n) {
  GCMS_DISPATCH(max_accumulate, acc, x, n);
}

double max_value(const double* x, std::size_t n) {
  GCMS_DISPATCH(max_value, x, n);
}

void divide_scalar(double* x, double d, std::size_t n) {
  GCMS_DISPATCH(divide_scalar, x, d, n);
}

void divide_where_positive(double* x, const double* denom, std::size_t n) {
  GCMS_DISPATCH(divide_where_positive, x, denom, n);
}

void lerp_clamped(double* dst, const double* a, const double* b, double u,
                  std::size_t n) {
  GCMS_DISPATCH(lerp_clamped, dst, a, b, u, n);
}

void gather_lerp(double* dst, const double* src, const std::int32_t* i0,
                 const std::int32_t* i1, const double* frac, std::size_t n) {
  GCMS_DISPATCH(gather_lerp, dst, src, i0, i1, frac, n);
}

void axpy(double* y, const double* x, double a, std::size_t n) {
  GCMS_DISPATCH(axpy, y, x, a, n);
}

#undef GCMS_DISPATCH

}  // namespace gcms::kernels

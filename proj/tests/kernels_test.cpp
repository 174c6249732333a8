#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <vector>

#include "gcms/kernels.hpp"
#include "gcms/rng.hpp"

using namespace gcms;
namespace k = gcms::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, size_t n, double lo = 0.0,
                               double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_range(lo, hi);
  return v;
}

bool bitwise_equal(const std::vector<double>& a,
                   const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Runs fn under both backends and requires bit-identical output vectors.
template <typename Fn>
void check_backends_agree(const Fn& fn) {
  if (!k::backend_available(k::Backend::avx2)) return;
  const k::Backend original = k::active_backend();
  k::force_backend(k::Backend::scalar);
  const std::vector<double> scalar_out = fn();
  k::force_backend(k::Backend::avx2);
  const std::vector<double> avx2_out = fn();
  k::force_backend(original);
  CHECK(bitwise_equal(scalar_out, avx2_out));
}

const size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 13, 31, 64, 192, 257, 517};

}  // namespace

TEST_CASE("kernels: scalar and avx2 lanes agree bit for bit") {
  Rng rng(2024);
  for (size_t n : kSizes) {
    auto a = random_vec(rng, n);
    auto b = random_vec(rng, n);
    const double d = rng.next_range(0.5, 2.0);
    const double u = rng.next_unit();

    check_backends_agree([&] {
      auto acc = a;
      k::max_accumulate(acc.data(), b.data(), n);
      return acc;
    });
    check_backends_agree([&] {
      return std::vector<double>{k::max_value(a.data(), n)};
    });
    check_backends_agree([&] {
      auto x = a;
      k::divide_scalar(x.data(), d, n);
      return x;
    });
    check_backends_agree([&] {
      auto x = a;
      auto denom = b;
      for (size_t i = 0; i < n; i += 3) denom[i] = 0.0;  // exercise the guard
      k::divide_where_positive(x.data(), denom.data(), n);
      return x;
    });
    check_backends_agree([&] {
      std::vector<double> dst(n);
      k::lerp_clamped(dst.data(), a.data(), b.data(), u, n);
      return dst;
    });
    check_backends_agree([&] {
      auto y = a;
      k::axpy(y.data(), b.data(), d, n);
      return y;
    });
    std::vector<int32_t> i0(n), i1(n);
    std::vector<double> frac(n);
    for (size_t j = 0; j < n; ++j) {
      i0[j] = int32_t(rng.next_int(0, int64_t(n) - 1));
      i1[j] = int32_t(rng.next_int(0, int64_t(n) - 1));
      frac[j] = (j % 4 == 0) ? 0.0 : rng.next_unit();
    }
    check_backends_agree([&] {
      std::vector<double> dst(n);
      k::gather_lerp(dst.data(), a.data(), i0.data(), i1.data(), frac.data(),
                     n);
      return dst;
    });
  }
}

TEST_CASE("kernels: semantics") {
  Rng rng(7);
  auto v = random_vec(rng, 100);

  CHECK(k::max_value(v.data(), v.size()) ==
        *std::max_element(v.begin(), v.end()));

  auto acc = random_vec(rng, 100);
  auto acc_ref = acc;
  k::max_accumulate(acc.data(), v.data(), v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    CHECK(acc[i] == std::max(acc_ref[i], v[i]));
  }

  auto x = v;
  k::divide_scalar(x.data(), 2.0, x.size());
  for (size_t i = 0; i < v.size(); ++i) CHECK(x[i] == v[i] / 2.0);

  // lerp endpoints: u = 0 is an exact identity, u = 1 lands within bounds.
  auto a = random_vec(rng, 64);
  auto b = random_vec(rng, 64);
  std::vector<double> dst(64);
  k::lerp_clamped(dst.data(), a.data(), b.data(), 0.0, 64);
  CHECK(bitwise_equal(dst, a));
  k::lerp_clamped(dst.data(), a.data(), b.data(), 1.0, 64);
  for (size_t i = 0; i < 64; ++i) {
    CHECK(dst[i] >= std::min(a[i], b[i]));
    CHECK(dst[i] <= std::max(a[i], b[i]));
  }
}

TEST_CASE("kernels: env/force backend plumbing") {
  CHECK(k::backend_available(k::Backend::scalar));
  const k::Backend original = k::active_backend();
  k::force_backend(k::Backend::scalar);
  CHECK(k::active_backend() == k::Backend::scalar);
  CHECK(std::string(k::backend_name(k::Backend::scalar)) == "scalar");
  CHECK(std::string(k::backend_name(k::Backend::avx2)) == "avx2");
  k::force_backend(original);
}

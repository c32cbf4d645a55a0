#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "liftkit/simd/kernels.hpp"

using namespace liftkit::simd;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  // Sprinkle signed zeros and exact ties with the bound arrays.
  if (n > 3) {
    v[1] = -0.0;
    v[2] = 0.0;
  }
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void check_equivalent(const KernelTable& ref, const KernelTable& vec) {
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 17u, 63u, 64u, 257u}) {
    const auto a = random_values(n, 10 + n);
    const auto b = random_values(n, 20 + n);
    const double s = 1.0 / 3.0;

    auto d1 = random_values(n, 30 + n);
    auto d2 = d1;
    ref.scaled_diff(d1.data(), a.data(), b.data(), s, n);
    vec.scaled_diff(d2.data(), a.data(), b.data(), s, n);
    CHECK(bitwise_equal(d1, d2));

    ref.scaled_diff_acc(d1.data(), a.data(), b.data(), s, n);
    vec.scaled_diff_acc(d2.data(), a.data(), b.data(), s, n);
    CHECK(bitwise_equal(d1, d2));

    ref.scale(d1.data(), a.data(), -s, n);
    vec.scale(d2.data(), a.data(), -s, n);
    CHECK(bitwise_equal(d1, d2));

    ref.scale_acc(d1.data(), b.data(), 7.25, n);
    vec.scale_acc(d2.data(), b.data(), 7.25, n);
    CHECK(bitwise_equal(d1, d2));

    ref.extrapolate(d1.data(), a.data(), b.data(), 1.0, n);
    vec.extrapolate(d2.data(), a.data(), b.data(), 1.0, n);
    CHECK(bitwise_equal(d1, d2));

    auto bound = b;
    if (n > 0) bound[0] = d1[0];
    ref.clip_upper(d1.data(), bound.data(), n);
    vec.clip_upper(d2.data(), bound.data(), n);
    CHECK(bitwise_equal(d1, d2));

    ref.clip_nonneg(d1.data(), n);
    vec.clip_nonneg(d2.data(), n);
    CHECK(bitwise_equal(d1, d2));

    CHECK(ref.max_abs(a.data(), n) == vec.max_abs(a.data(), n));
  }
}

}  // namespace

TEST_CASE("scalar reference kernels") {
  const auto& k = scalar_kernels();
  std::vector<double> a{1, 2, 3, 4, 5};
  std::vector<double> b{0, 1, 1, 1, -1};
  std::vector<double> out(5, 0.0);
  k.scaled_diff(out.data(), a.data(), b.data(), 2.0, 5);
  CHECK(out == std::vector<double>{2, 2, 4, 6, 12});
  k.clip_upper(out.data(), a.data(), 5);
  CHECK(out == std::vector<double>{1, 2, 3, 4, 5});
  std::vector<double> neg{-1, 2, -0.5};
  k.clip_nonneg(neg.data(), 3);
  CHECK(neg == std::vector<double>{0, 2, 0});
  CHECK(k.max_abs(b.data(), 5) == 1.0);
  std::vector<double> xb(2);
  std::vector<double> xn{1, 2}, xo{0, 4};
  k.extrapolate(xb.data(), xn.data(), xo.data(), 1.0, 2);
  CHECK(xb == std::vector<double>{2, 0});
}

TEST_CASE("AVX2 kernels match the scalar reference bit for bit") {
  const KernelTable* avx = avx2_kernels();
  if (avx == nullptr || !cpu_has_avx2()) {
    MESSAGE("AVX2 variant unavailable; skipping");
    return;
  }
  check_equivalent(scalar_kernels(), *avx);
}

TEST_CASE("NaN handling is consistent across variants") {
  const KernelTable* avx = avx2_kernels();
  if (avx == nullptr || !cpu_has_avx2()) return;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v{nan, 1, nan, -2, nan, 3, 0.5, nan, 2};
  CHECK(scalar_kernels().max_abs(v.data(), v.size()) == avx->max_abs(v.data(), v.size()));
  auto a = v, b = v;
  scalar_kernels().clip_nonneg(a.data(), a.size());
  avx->clip_nonneg(b.data(), b.size());
  CHECK(bitwise_equal(a, b));
}

TEST_CASE("runtime selection") {
  CHECK(select("scalar"));
  CHECK(std::string(active().name) == "scalar");
  CHECK_FALSE(select("bogus"));
  CHECK(std::string(active().name) == "scalar");
  CHECK(select("auto"));
  if (cpu_has_avx2()) CHECK(std::string(active().name) == "avx2");
}

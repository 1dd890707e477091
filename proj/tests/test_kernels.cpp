#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "drmpc/kernels.hpp"
#include "drmpc/polytope.hpp"
#include "support.hpp"

using namespace drmpc;
namespace k = drmpc::kernels;

namespace {

std::vector<double> random_buffer(std::mt19937_64& rng, std::size_t size) {
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<double> v(size);
  for (double& x : v) x = u(rng);
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<k::Isa> simd_isas() {
  std::vector<k::Isa> out;
  for (k::Isa isa : {k::Isa::avx2, k::Isa::neon})
    if (k::is_supported(isa)) out.push_back(isa);
  return out;
}

}  // namespace

TEST(Kernels, ScalarMaxViolationMatchesNaiveLoop) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 1 + trial % 4, rows = 1 + trial % 7, count = trial * 3 + 1;
    auto normals = random_buffer(rng, rows * dim), offsets = random_buffer(rng, rows), pts = random_buffer(rng, count * dim);
    std::vector<double> out(count);
    k::scalar::max_violation({normals.data(), rows, dim}, offsets, {pts.data(), count, dim}, out);
    for (std::size_t p = 0; p < count; ++p) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < dim; ++j) s += normals[i * dim + j] * pts[j * count + p];
        best = std::max(best, s - offsets[i]);
      }
      EXPECT_NEAR(out[p], best, 1e-12);
    }
  }
}

TEST(Kernels, SimdVariantsAreBitIdenticalToScalar) {
  const auto isas = simd_isas();
  if (isas.empty()) GTEST_SKIP() << "no SIMD variant on this machine";
  std::mt19937_64 rng(5);
  for (k::Isa isa : isas) {
    for (std::size_t count : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 121u, 1000u}) {
      for (std::size_t dim : {1u, 2u, 3u, 5u}) {
        const std::size_t rows = 1 + (count + dim) % 9;
        auto normals = random_buffer(rng, rows * dim), offsets = random_buffer(rng, rows);
        auto pts = random_buffer(rng, count * dim);
        std::vector<double> a(count), b(count);
        k::scalar::max_violation({normals.data(), rows, dim}, offsets, {pts.data(), count, dim}, a);
        k::max_violation_with(isa, {normals.data(), rows, dim}, offsets, {pts.data(), count, dim}, b);
        EXPECT_TRUE(bit_equal(a, b)) << k::name(isa) << " max_violation count=" << count << " dim=" << dim;

        std::vector<double> sa(rows), sb(rows);
        if (count > 0) {
          k::scalar::support({pts.data(), count, dim}, {normals.data(), rows, dim}, sa);
          k::support_with(isa, {pts.data(), count, dim}, {normals.data(), rows, dim}, sb);
          EXPECT_TRUE(bit_equal(sa, sb)) << k::name(isa) << " support count=" << count << " dim=" << dim;
        }
      }
    }
  }
}

TEST(Kernels, EmptyNormalsGiveMinusInfinity) {
  std::vector<double> pts{1.0, 2.0}, out(2);
  k::max_violation({nullptr, 0, 1}, {}, {pts.data(), 2, 1}, out);
  EXPECT_TRUE(std::isinf(out[0]) && out[0] < 0);
}

TEST(Kernels, PolytopeResultsDoNotDependOnActiveIsa) {
  std::mt19937_64 rng(3);
  const PolytopeH h = fx::random_h(rng, 2, 5);
  const Mat pts = fx::random_mat(rng, 300, 2, -4, 4);
  const PolytopeV v(fx::random_cloud(rng, 2, 40, 3.0));
  const Mat dirs = fx::random_mat(rng, 33, 2);
  const k::Isa saved = k::active_isa();
  k::set_active_isa(k::Isa::scalar);
  const Vec mv0 = max_violation(h, pts);
  const Vec sp0 = support(v, dirs);
  for (k::Isa isa : simd_isas()) {
    k::set_active_isa(isa);
    EXPECT_EQ(max_violation(h, pts), mv0);
    EXPECT_EQ(support(v, dirs), sp0);
  }
  k::set_active_isa(saved);
}

TEST(Kernels, UnsupportedIsaIsRejected) {
  for (k::Isa isa : {k::Isa::avx2, k::Isa::neon})
    if (!k::is_supported(isa)) EXPECT_THROW(k::set_active_isa(isa), Error);
  EXPECT_NO_THROW(k::set_active_isa(k::detected_isa()));
}

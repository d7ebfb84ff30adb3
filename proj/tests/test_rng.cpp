#include <doctest.h>

#include <array>
#include <cmath>

#include "qpl/rng.hpp"

namespace {

using A4 = std::array<std::uint32_t, 4>;

double to_uniform53(std::uint32_t lo, std::uint32_t hi) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("philox4x32_10 reproduces the published reference blocks") {
  CHECK(qpl::philox4x32_10({0u, 0u, 0u, 0u}, {0u, 0u}) ==
        A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(qpl::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                           {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(qpl::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                           {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter layout: step fills words 0-1, stream word 2, seed the key") {
  const std::uint64_t seed = 0x0123456789abcdefull;
  const std::uint64_t step = 0xfedcba9876543210ull;
  const qpl::CounterRng rng(seed);
  CHECK(rng.seed() == seed);
  const A4 direct = qpl::philox4x32_10(
      {0x76543210u, 0xfedcba98u, 7u, 0u}, {0x89abcdefu, 0x01234567u});
  CHECK(rng.block(step, 7u) == direct);
}

TEST_CASE("draws depend only on (seed, step, stream), never on call order") {
  const qpl::CounterRng a(42), b(42), c(43);
  const double first = a.normal(17, qpl::kStreamHomodyne);
  (void)b.uniform2(3, qpl::kStreamJumps);
  (void)b.normal(99, qpl::kStreamHomodyne);
  CHECK(b.normal(17, qpl::kStreamHomodyne) == first);
  CHECK(a.block(17, 0) != c.block(17, 0));
  CHECK(a.block(17, 0) != a.block(18, 0));
  CHECK(a.block(17, qpl::kStreamHomodyne) != a.block(17, qpl::kStreamJumps));
}

TEST_CASE("uniform2 packs two 53-bit uniforms out of one block") {
  const qpl::CounterRng rng(12345);
  const A4 blk = rng.block(6, 1);
  const auto u = rng.uniform2(6, 1);
  CHECK(u[0] == to_uniform53(blk[0], blk[1]));
  CHECK(u[1] == to_uniform53(blk[2], blk[3]));
  for (std::uint64_t k = 0; k < 1000; ++k)
    for (const double x : rng.uniform2(k, 1)) {
      CHECK(x >= 0.0);
      CHECK(x < 1.0);
    }
}

TEST_CASE("normal is the cosine Box-Muller transform of the same block") {
  const qpl::CounterRng rng(2024);
  for (std::uint64_t k = 0; k < 64; ++k) {
    const auto u = rng.uniform2(k, qpl::kStreamHomodyne);
    const double want =
        std::sqrt(-2.0 * std::log1p(-u[0])) * std::cos(2.0 * M_PI * u[1]);
    CHECK(rng.normal(k, qpl::kStreamHomodyne) ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("sample moments of both stream shapes") {
  const qpl::CounterRng rng(777);
  const int n = 200000;
  double su = 0.0, su2 = 0.0, sn = 0.0, sn2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto u = rng.uniform2(static_cast<std::uint64_t>(k), qpl::kStreamJumps);
    su += u[0] + u[1];
    su2 += u[0] * u[0] + u[1] * u[1];
    const double z = rng.normal(static_cast<std::uint64_t>(k), qpl::kStreamHomodyne);
    sn += z;
    sn2 += z * z;
  }
  const double um = su / (2.0 * n);
  const double uv = su2 / (2.0 * n) - um * um;
  const double nm = sn / n;
  const double nv = sn2 / n - nm * nm;
  CHECK(um == doctest::Approx(0.5).epsilon(0.01));
  CHECK(uv == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  CHECK(std::abs(nm) < 0.01);
  CHECK(nv == doctest::Approx(1.0).epsilon(0.02));
}

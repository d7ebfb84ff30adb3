#include "qpl/rng.hpp"

#include <cmath>

namespace qpl {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> round_once(
    const std::array<std::uint32_t, 4>& c,
    const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
          static_cast<std::uint32_t>(p1),
          static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
          static_cast<std::uint32_t>(p0)};
}

inline double to_uniform53(std::uint32_t lo, std::uint32_t hi) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 9; ++r) {
    ctr = round_once(ctr, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return round_once(ctr, key);
}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t step,
                                               std::uint32_t stream) const {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
      stream, 0u};
  const std::array<std::uint32_t, 2> key{
      static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  return philox4x32_10(ctr, key);
}

std::array<double, 2> CounterRng::uniform2(std::uint64_t step,
                                           std::uint32_t stream) const {
  const auto b = block(step, stream);
  return {to_uniform53(b[0], b[1]), to_uniform53(b[2], b[3])};
}

double CounterRng::normal(std::uint64_t step, std::uint32_t stream) const {
  const auto u = uniform2(step, stream);
  // 1 - u[0] lies in (0, 1], keeping the log finite.
  const double r = std::sqrt(-2.0 * std::log1p(-u[0]));
  return r * std::cos(2.0 * M_PI * u[1]);
}

}  // namespace qpl

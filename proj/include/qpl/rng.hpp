// rng.hpp — counter-based random streams keyed by (seed, step, stream).
//
// Noise values depend only on the key tuple, never on call order, so
// trajectories are reproducible under any worker scheduling. The generator is
// Philox4x32-10; raw blocks are exposed for known-answer tests.
#pragma once

#include <array>
#include <cstdint>

namespace qpl {

// One Philox4x32-10 block: 4 output words from a 128-bit counter + 64-bit key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

// Stream ids used by the integrators. One block per (step, stream).
inline constexpr std::uint32_t kStreamHomodyne = 0;  // one N(0,1) per step
inline constexpr std::uint32_t kStreamJumps = 1;     // two U[0,1) per step

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::array<std::uint32_t, 4> block(std::uint64_t step,
                                     std::uint32_t stream) const;

  // Two independent 53-bit uniforms in [0, 1) from one block.
  std::array<double, 2> uniform2(std::uint64_t step, std::uint32_t stream) const;

  // One standard normal (Box–Muller, cosine branch) from one block.
  double normal(std::uint64_t step, std::uint32_t stream) const;

 private:
  std::uint64_t seed_;
};

}  // namespace qpl

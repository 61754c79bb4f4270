#pragma once

#include <array>
#include <cstdint>

namespace aclab {

// Philox 4x32-10 counter-based generator (Salmon et al., SC'11 reference
// constants). Returns the four 32-bit output words for one counter/key pair.
// Pure function: no state, safe from any thread.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        std::uint32_t key0, std::uint32_t key1);

// Maps a 64-bit word to the open interval (0,1) with 53-bit resolution:
// u = (x >> 11)·2^-53 + 2^-54. Never returns 0 or 1.
double u64_to_unit(std::uint64_t x) noexcept;

// Inverse standard normal CDF.
double normal_quantile(double u);

// Standard normal upper tail 1 - Phi(x).
double normal_upper_tail(double x);

enum class NoiseMode {
  normal,  // standard Gaussian draws
  zero,    // deterministic zero (noise switched off)
};

// Stream of standard normal draws for one simulated path. The k-th draw is a
// pure function of (seed, path_index, k): independent of thread scheduling,
// of other paths, and of how many draws were taken before.
//
// pair_depth L > 0 replaces draw k by the dyadic block sum
//   2^{-L/2} · sum_{j < 2^L} zeta(k·2^L + j)
// over the depth-0 stream zeta. A depth-L stream is still i.i.d. N(0,1), and
// a run with step dt is pathwise-coupled (same Brownian increments) to a
// depth-0 run with step dt/2^L on an aligned grid. Used for dt-halving
// comparisons where Monte Carlo noise must cancel.
//
// negate flips the sign of every draw (antithetic pairing).
class NoiseSource {
 public:
  NoiseSource(std::uint64_t seed, std::uint64_t path_index,
              NoiseMode mode = NoiseMode::normal, int pair_depth = 0,
              bool negate = false);

  // k-th draw of this stream; pure in (seed, path, k).
  double normal_at(std::uint64_t k) const;

  // Sequential draw: normal_at(step_counter++).
  double next_normal() { return normal_at(step_counter_++); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t path_index() const noexcept { return path_; }
  std::uint64_t step_counter() const noexcept { return step_counter_; }
  NoiseMode mode() const noexcept { return mode_; }

 private:
  std::uint64_t seed_;
  std::uint64_t path_;
  std::uint64_t step_counter_ = 0;
  NoiseMode mode_;
  int pair_depth_;
  bool negate_;
  double scale_ = 1.0;  // 2^{-pair_depth/2}
};

}  // namespace aclab

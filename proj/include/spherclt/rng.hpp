// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random streams (Philox 4x32-10). Every draw is a pure
// function of (seed, stream, path, block), so path k's noise does not depend
// on how many paths run, in what order, or on how many threads: the
// reproducibility contract of the whole Monte Carlo layer rests on this.

#ifndef SPHERCLT_RNG_HPP
#define SPHERCLT_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace spherclt {

namespace philox {

inline constexpr std::uint32_t kW32A = 0x9E3779B9u;
inline constexpr std::uint32_t kW32B = 0xBB67AE85u;
inline constexpr std::uint32_t kM4x32A = 0xD2511F53u;
inline constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

struct Key {
  std::uint32_t k0;
  std::uint32_t k1;
};

using Counter = std::array<std::uint32_t, 4>;
using Block = std::array<std::uint32_t, 4>;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                      std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

// One block of the 10-round Philox 4x32 bijection.
inline Block philox4x32_10(Counter counter, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(kM4x32A, counter[0], lo0, hi0);
    mul_hi_lo(kM4x32B, counter[2], lo1, hi1);
    counter = {hi1 ^ counter[1] ^ key.k0, lo1, hi0 ^ counter[3] ^ key.k1, lo0};
    key.k0 += kW32A;
    key.k1 += kW32B;
  }
  return counter;
}

}  // namespace philox

// Uniform in (0, 1): never 0, never 1, symmetric around 1/2.
inline double uniform_from_bits(std::uint32_t bits) {
  return (static_cast<double>(bits) + 0.5) * 0x1p-32;
}

// A keyed Gaussian stream. `seed` selects the key; (stream, path) select a
// lane; blocks within the lane are indexed explicitly by the caller, so a
// draw is addressed, never consumed.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint32_t stream, std::uint64_t path)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        lane_lo_(static_cast<std::uint32_t>(path)),
        lane_hi_(static_cast<std::uint32_t>(path >> 32) ^
                 (stream * 0x9E3779B9u + 0x7F4A7C15u)) {}

  // Four standard normals per block via Box-Muller on two uniform pairs.
  std::array<double, 4> normals(std::uint64_t block) const {
    const philox::Block bits = philox::philox4x32_10(
        {static_cast<std::uint32_t>(block),
         static_cast<std::uint32_t>(block >> 32), lane_lo_, lane_hi_},
        key_);
    std::array<double, 4> out;
    box_muller(bits[0], bits[1], out[0], out[1]);
    box_muller(bits[2], bits[3], out[2], out[3]);
    return out;
  }

  // Fills `out` with standard normals addressed by a record index; records
  // of equal size never overlap. Used with record = step index so that one
  // simulation step always consumes the same draws.
  void fill_normals(std::uint64_t record, std::span<double> out) const {
    const std::uint64_t blocks_per_record = (out.size() + 3) / 4;
    std::size_t written = 0;
    for (std::uint64_t j = 0; j < blocks_per_record; ++j) {
      const std::array<double, 4> z = normals(record * blocks_per_record + j);
      for (int i = 0; i < 4 && written < out.size(); ++i) {
        out[written++] = z[i];
      }
    }
  }

 private:
  static void box_muller(std::uint32_t a, std::uint32_t b, double& z0,
                         double& z1) {
    const double u1 = uniform_from_bits(a);
    const double u2 = uniform_from_bits(b);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846264338328 * u2;
    z0 = radius * std::cos(angle);
    z1 = radius * std::sin(angle);
  }

  philox::Key key_;
  std::uint32_t lane_lo_;
  std::uint32_t lane_hi_;
};

// Sequential adapter over GaussianStream for consumers without a natural
// record index (synthetic draws in tests and calibrations).
class SequentialNormals {
 public:
  SequentialNormals(std::uint64_t seed, std::uint32_t stream,
                    std::uint64_t path)
      : stream_(seed, stream, path) {}

  double next() {
    if (used_ == 4) {
      cache_ = stream_.normals(block_++);
      used_ = 0;
    }
    return cache_[used_++];
  }

 private:
  GaussianStream stream_;
  std::array<double, 4> cache_{};
  std::uint64_t block_ = 0;
  int used_ = 4;
};

// Stream ids; distinct purposes never share draws under one seed.
namespace streams {
inline constexpr std::uint32_t kSpherePaths = 0;
inline constexpr std::uint32_t kEuclideanPaths = 1;
inline constexpr std::uint32_t kMartingale = 2;
inline constexpr std::uint32_t kScalarMartingaleG0 = 3;
inline constexpr std::uint32_t kScalarMartingaleGPrime = 4;
inline constexpr std::uint32_t kCalibration = 5;
inline constexpr std::uint32_t kTimechangeReference = 6;
}  // namespace streams

}  // namespace spherclt

#endif  // SPHERCLT_RNG_HPP

#pragma once

// Counter-based RNG (Philox4x32-10) with one independent stream per
// (seed, stream id). Streams make sampling order-independent: drawing the
// cells of a field in any order, or across any number of workers, yields
// bit-identical results.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace wicklab {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
  constexpr std::uint64_t m0 = 0xD2511F53ull;
  constexpr std::uint64_t m1 = 0xCD9E8D57ull;
  const std::uint64_t p0 = m0 * c[0];
  const std::uint64_t p1 = m1 * c[2];
  c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
       static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t w0 = 0x9E3779B9u;
  constexpr std::uint32_t w1 = 0xBB67AE85u;
  for (int r = 0;; ++r) {
    philox_round(ctr, key);
    if (r == 9) return ctr;
    key[0] += w0;
    key[1] += w1;
  }
}

}  // namespace detail

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint32_t next_u32() {
    if (have_ == 0) refill();
    return buf_[static_cast<std::size_t>(--have_)];
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on (0,1); never returns 0.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (fixed two-uniform consumption).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Poisson(mean) by sequential inversion, with additive splitting so the
  // inversion loop always runs at mean <= 30.
  long poisson(double mean) {
    if (!(mean > 0)) throw std::invalid_argument("poisson: mean must be > 0");
    long total = 0;
    while (mean > 30.0) {
      total += poisson_inversion(30.0);
      mean -= 30.0;
    }
    return total + poisson_inversion(mean);
  }

  // Gamma(shape, scale 1). Marsaglia-Tsang for shape >= 1, boosted by
  // U^(1/shape) for shape < 1 (cell volumes are routinely < 1).
  double gamma(double shape) {
    if (!(shape > 0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0) {
      double u = uniform();
      return gamma_ge1(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    return gamma_ge1(shape);
  }

 private:
  void refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(n_), static_cast<std::uint32_t>(n_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    buf_ = detail::philox10(ctr, key);
    ++n_;
    have_ = 4;
  }

  long poisson_inversion(double mean) {
    if (mean <= 0.0) return 0;
    double u = uniform();
    double p = std::exp(-mean);
    double cum = p;
    long k = 0;
    while (u > cum && k < 4000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
    }
    return k;
  }

  double gamma_ge1(double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t n_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int have_ = 0;
};

}  // namespace wicklab

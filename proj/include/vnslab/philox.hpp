#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is a
// pure function of (key, counter), so particle streams do not depend on the
// order in which particles are visited.

#include <array>
#include <cmath>
#include <cstdint>

namespace vnslab {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// Stream addressing used by the particle code.
enum class StreamPurpose : std::uint32_t { Noise = 0, Init = 1 };

/// Two 53-bit uniforms in (0,1) from one Philox block.
inline std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t step, std::uint64_t particle,
                                          StreamPurpose purpose, std::uint32_t block) {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(particle),
                                (static_cast<std::uint32_t>(purpose) << 16) | (block & 0xFFFFu),
                                static_cast<std::uint32_t>(step >> 32) ^ (static_cast<std::uint32_t>(particle >> 32) << 16)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const auto r = Philox4x32::generate(ctr, key);
  auto to_unit = [](std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  };
  return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
}

/// Two independent standard normals (Box-Muller).
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t step, std::uint64_t particle,
                                         StreamPurpose purpose, std::uint32_t block) {
  const auto u = uniform_pair(seed, step, particle, purpose, block);
  const double r = std::sqrt(-2.0 * std::log(u[0]));
  const double th = 2.0 * 3.14159265358979323846 * u[1];
  return {r * std::cos(th), r * std::sin(th)};
}

}  // namespace vnslab

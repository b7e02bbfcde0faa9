#pragma once

#include <cstdint>
#include <string_view>

namespace oscmc {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for an independent substream keyed by a tag and integer coordinates.
/// Draws keyed by (interval, vm) do not depend on how many draws other
/// consumers made, so runs are reproducible regardless of policy or thread
/// count.
template <class... Ints>
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::string_view tag, Ints... coords) {
  std::uint64_t h = splitmix64(seed ^ fnv1a(tag));
  ((h = splitmix64(h ^ static_cast<std::uint64_t>(coords))), ...);
  return h;
}

}  // namespace oscmc

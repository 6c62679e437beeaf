#ifndef PMJP_RNG_HPP
#define PMJP_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace pmjp {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// All randomness flows from one master seed expanded into named streams
// (one per chain, one per interval, ...), so a run is citable by one number.
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view name,
                                 std::uint64_t index = 0) {
  std::uint64_t h = detail::splitmix64(master ^ detail::fnv1a(name));
  return detail::splitmix64(h ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

inline Rng named_stream(std::uint64_t master, std::string_view name,
                        std::uint64_t index = 0) {
  return Rng(stream_seed(master, name, index));
}

}  // namespace pmjp

#endif

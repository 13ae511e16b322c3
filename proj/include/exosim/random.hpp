#pragma once

// Seed derivation: every random stream in the toolkit is derived from one
// root seed as splitmix64(root ^ fnv1a(purpose) ^ index), so a single --seed
// flag reproduces noise, initial-condition perturbation and optimizer
// sampling independently of each other.

#include <cstdint>
#include <random>
#include <string_view>

namespace exosim {

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose, std::uint64_t index = 0) {
  return splitmix64(root ^ fnv1a(purpose) ^ (0x9e3779b97f4a7c15ull * (index + 1)));
}

inline std::mt19937_64 make_rng(std::uint64_t root, std::string_view purpose, std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(root, purpose, index));
}

}  // namespace exosim

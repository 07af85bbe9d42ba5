#include "rissim/rng.hpp"

namespace rissim {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream));
}

double wrap_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;  // fmod result of exactly 2*pi after rounding
  return a;
}

Complex Rng::cnormal() {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  const double re = normal() * inv_sqrt2;
  const double im = normal() * inv_sqrt2;
  return {re, im};
}

std::size_t Rng::uniform_index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(eng_);
}

}  // namespace rissim

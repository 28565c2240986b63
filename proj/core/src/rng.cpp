#include "ellm/rng.hpp"

namespace ellm {

namespace {

// splitmix64 finalizer; decorrelates nearby root seeds.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t split_seed(std::uint64_t root_seed, std::string_view stream_name) {
  return mix(root_seed ^ fnv1a64(stream_name));
}

std::uint64_t Rng::next_below(std::uint64_t n) {
  if (n <= 1) return 0;
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

double Rng::next_unit() {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double Rng::next_gaussian() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

bool Rng::next_bool(double p_true) {
  if (p_true <= 0.0) return false;
  if (p_true >= 1.0) return true;
  return next_unit() < p_true;
}

}  // namespace ellm

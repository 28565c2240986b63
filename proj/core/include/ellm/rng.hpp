#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ellm {

// All randomness in a run flows from one root seed split into named streams
// (env, agent, suggestor, noise, ...) so that consumers never perturb each
// other's draws.
std::uint64_t split_seed(std::uint64_t root_seed, std::string_view stream_name);

class Rng {
 public:
  Rng() : engine_(0) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t root_seed, std::string_view stream_name)
      : engine_(split_seed(root_seed, stream_name)) {}

  std::mt19937_64& engine() { return engine_; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n);
  // Uniform real in [0, 1).
  double next_unit();
  // Gaussian with mean 0, stddev 1.
  double next_gaussian();
  bool next_bool(double p_true);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace ellm

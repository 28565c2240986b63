#pragma once

#include <stdexcept>
#include <string>

namespace ellm {

// Bad configuration supplied by the user (files, flags, token lists).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Network-level failure after retries were exhausted.
struct TransportError : std::runtime_error {
  explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

// Replay-mode completion request that is not present in the cache.
struct CacheMissError : std::runtime_error {
  explicit CacheMissError(const std::string& what) : std::runtime_error(what) {}
};

// Corrupt or incompatible checkpoint blob.
struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ellm

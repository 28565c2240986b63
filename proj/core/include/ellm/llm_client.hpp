#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace ellm {

struct CompletionRequest {
  std::string model;
  std::string prompt;
  int max_tokens = 100;
  double temperature = 0.0;
  int logprob_count = 5;

  bool operator==(const CompletionRequest& other) const = default;
};

struct CompletionResponse {
  std::string text;
  std::map<std::string, double> first_token_logprobs;
};

struct CacheEntry {
  std::string key;  // 64-hex digest of the canonicalized request
  CompletionRequest request;
  CompletionResponse response;
  std::int64_t created_at = 0;
};

// SHA-256 of the canonical request serialization: field order fixed, prompt
// bytes verbatim, temperature printed with full round-trip precision. Stable
// across processes and platforms.
std::string cache_key(const CompletionRequest& request);

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;
};

// Minimal transport seam so tests can run without sockets.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body,
                            const std::map<std::string, std::string>& headers) = 0;
};

std::unique_ptr<HttpTransport> make_httplib_transport(const std::string& endpoint);

struct LlmClientConfig {
  std::string endpoint;              // e.g. "https://api.example.com"
  std::string path = "/v1/completions";
  std::string api_key;
  std::string cache_file;            // "" keeps the cache in memory only
  bool replay_only = false;          // cache misses become errors, no network
  int max_attempts = 3;
  double backoff_base_seconds = 1.0;
  // Wire field names, configurable because provider APIs drift.
  std::string model_field = "model";
  std::string prompt_field = "prompt";
  std::string max_tokens_field = "max_tokens";
  std::string temperature_field = "temperature";
  std::string logprobs_field = "logprobs";

  // Reads ELLM_API_ENDPOINT and ELLM_API_KEY.
  static LlmClientConfig from_env();
};

struct CacheStats {
  std::size_t entries = 0;
  std::size_t duplicate_keys = 0;
  std::size_t bytes = 0;
};

// Completion client with a deterministic JSON-lines disk cache. Hits return
// the stored response with zero network calls; misses perform one HTTP round
// trip (with retries) and append the entry. In replay mode a miss is a typed
// error so reproducibility failures are never silent.
class LlmClient {
 public:
  explicit LlmClient(LlmClientConfig config, std::unique_ptr<HttpTransport> transport = nullptr);

  CompletionResponse complete(const CompletionRequest& request);

  std::int64_t network_calls() const { return network_calls_; }
  std::size_t cache_size() const { return cache_.size(); }

  static CacheStats cache_stats(const std::string& cache_file);
  // Deduplicates by key (first occurrence wins) and returns the entry count.
  static std::size_t merge_cache_files(const std::vector<std::string>& inputs,
                                       const std::string& output);

  // Test seam: replaces the retry backoff sleep.
  void set_sleeper(std::function<void(double)> sleeper) { sleeper_ = std::move(sleeper); }

 private:
  void load_cache_file();
  void append_entry(const CacheEntry& entry);
  CompletionResponse perform_request(const CompletionRequest& request);

  LlmClientConfig config_;
  std::unique_ptr<HttpTransport> transport_;
  std::map<std::string, CompletionResponse> cache_;
  std::int64_t network_calls_ = 0;
  std::mutex write_mutex_;
  std::function<void(double)> sleeper_;
};

}  // namespace ellm

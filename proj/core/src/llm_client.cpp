#include "ellm/llm_client.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "ellm/errors.hpp"

namespace ellm {

using nlohmann::json;

std::string cache_key(const CompletionRequest& request) {
  char temperature[64];
  std::snprintf(temperature, sizeof(temperature), "%.17g", request.temperature);
  std::string canonical = "v1\nmodel=" + request.model +
                          "\nmax_tokens=" + std::to_string(request.max_tokens) +
                          "\ntemperature=" + temperature +
                          "\nlogprob_count=" + std::to_string(request.logprob_count) +
                          "\nprompt:" + std::to_string(request.prompt.size()) + "\n";
  canonical += request.prompt;

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest, &digest_len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest_len * 2);
  for (unsigned int i = 0; i < digest_len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

namespace {

constexpr const char* kCacheHeader = R"({"version":1,"format":"ellm-completion-cache"})";

json entry_to_json(const CacheEntry& entry) {
  return json{
      {"key", entry.key},
      {"model", entry.request.model},
      {"prompt", entry.request.prompt},
      {"max_tokens", entry.request.max_tokens},
      {"temperature", entry.request.temperature},
      {"logprob_count", entry.request.logprob_count},
      {"response",
       {{"text", entry.response.text}, {"first_token_logprobs", entry.response.first_token_logprobs}}},
      {"created_at", entry.created_at},
  };
}

std::optional<CacheEntry> entry_from_json_line(const std::string& line) {
  if (line.empty() || line.find("\"format\":\"ellm-completion-cache\"") != std::string::npos) {
    return std::nullopt;
  }
  const json j = json::parse(line);
  CacheEntry entry;
  entry.key = j.at("key").get<std::string>();
  entry.request.model = j.at("model").get<std::string>();
  entry.request.prompt = j.at("prompt").get<std::string>();
  entry.request.max_tokens = j.at("max_tokens").get<int>();
  entry.request.temperature = j.at("temperature").get<double>();
  entry.request.logprob_count = j.at("logprob_count").get<int>();
  entry.response.text = j.at("response").at("text").get<std::string>();
  entry.response.first_token_logprobs =
      j.at("response").at("first_token_logprobs").get<std::map<std::string, double>>();
  entry.created_at = j.at("created_at").get<std::int64_t>();
  return entry;
}

// Serialized append shared across processes via an advisory lock.
void locked_append(const std::string& path, const std::string& payload, bool write_header_if_new) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw std::runtime_error("cannot open cache file for append: " + path);
  ::flock(fd, LOCK_EX);
  std::string data;
  if (write_header_if_new && ::lseek(fd, 0, SEEK_END) == 0) {
    data = std::string(kCacheHeader) + "\n";
  }
  data += payload;
  const ssize_t written = ::write(fd, data.data(), data.size());
  ::flock(fd, LOCK_UN);
  ::close(fd);
  if (written != static_cast<ssize_t>(data.size())) {
    throw std::runtime_error("short write to cache file: " + path);
  }
}

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::string endpoint) : endpoint_(std::move(endpoint)) {}

  HttpResponse post(const std::string& path, const std::string& body,
                    const std::map<std::string, std::string>& headers) override {
    httplib::Client client(endpoint_);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(60, 0);
    httplib::Headers request_headers(headers.begin(), headers.end());
    auto result = client.Post(path, request_headers, body, "application/json");
    if (!result) {
      throw TransportError("HTTP request to " + endpoint_ + path +
                           " failed: " + httplib::to_string(result.error()));
    }
    HttpResponse response;
    response.status = result->status;
    response.body = result->body;
    for (const auto& [name, value] : result->headers) response.headers[name] = value;
    return response;
  }

 private:
  std::string endpoint_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_httplib_transport(const std::string& endpoint) {
  return std::make_unique<HttplibTransport>(endpoint);
}

LlmClientConfig LlmClientConfig::from_env() {
  LlmClientConfig config;
  if (const char* endpoint = std::getenv("ELLM_API_ENDPOINT")) config.endpoint = endpoint;
  if (const char* key = std::getenv("ELLM_API_KEY")) config.api_key = key;
  return config;
}

LlmClient::LlmClient(LlmClientConfig config, std::unique_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (!config_.replay_only && !transport_) {
    if (config_.endpoint.empty()) {
      throw ConfigError(
          "llm client needs an endpoint (ELLM_API_ENDPOINT) unless running in replay mode");
    }
    transport_ = make_httplib_transport(config_.endpoint);
  }
  sleeper_ = [](double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  };
  if (!config_.cache_file.empty()) load_cache_file();
}

void LlmClient::load_cache_file() {
  std::ifstream in(config_.cache_file);
  if (!in) return;  // nothing cached yet
  std::string line;
  while (std::getline(in, line)) {
    try {
      if (auto entry = entry_from_json_line(line)) {
        cache_[entry->key] = entry->response;
      }
    } catch (const json::exception&) {
      throw ConfigError("corrupt cache line in " + config_.cache_file);
    }
  }
}

void LlmClient::append_entry(const CacheEntry& entry) {
  if (config_.cache_file.empty()) return;
  std::lock_guard<std::mutex> lock(write_mutex_);
  locked_append(config_.cache_file, entry_to_json(entry).dump() + "\n", true);
}

CompletionResponse LlmClient::perform_request(const CompletionRequest& request) {
  json body;
  body[config_.model_field] = request.model;
  body[config_.prompt_field] = request.prompt;
  body[config_.max_tokens_field] = request.max_tokens;
  body[config_.temperature_field] = request.temperature;
  body[config_.logprobs_field] = request.logprob_count;

  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;

  std::string last_error;
  for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
    if (attempt > 0) {
      double delay = config_.backoff_base_seconds * std::pow(2.0, attempt - 1);
      sleeper_(delay);
    }
    HttpResponse http;
    try {
      network_calls_ += 1;
      http = transport_->post(config_.path, body.dump(), headers);
    } catch (const TransportError& ex) {
      last_error = ex.what();
      continue;
    }
    if (http.status == 429 || http.status >= 500) {
      last_error = "HTTP " + std::to_string(http.status);
      auto retry_after = http.headers.find("Retry-After");
      if (retry_after != http.headers.end()) {
        sleeper_(std::atof(retry_after->second.c_str()));
      }
      continue;
    }
    if (http.status >= 400) {
      throw TransportError("completion request rejected with HTTP " + std::to_string(http.status) +
                           ": " + http.body);
    }

    try {
      const json payload = json::parse(http.body);
      CompletionResponse response;
      if (payload.contains("choices") && !payload.at("choices").empty()) {
        const json& choice = payload.at("choices").at(0);
        response.text = choice.value("text", "");
        if (choice.contains("logprobs") && choice.at("logprobs").is_object()) {
          const json& logprobs = choice.at("logprobs");
          if (logprobs.contains("top_logprobs") && logprobs.at("top_logprobs").is_array() &&
              !logprobs.at("top_logprobs").empty()) {
            response.first_token_logprobs =
                logprobs.at("top_logprobs").at(0).get<std::map<std::string, double>>();
          }
        }
      } else {
        response.text = payload.value("text", "");
        if (payload.contains("first_token_logprobs")) {
          response.first_token_logprobs =
              payload.at("first_token_logprobs").get<std::map<std::string, double>>();
        }
      }
      for (const auto& [token, logprob] : response.first_token_logprobs) {
        if (logprob > 0.0) {
          throw TransportError("malformed completion response: positive log-probability for '" +
                               token + "'");
        }
      }
      return response;
    } catch (const json::exception& ex) {
      throw TransportError(std::string("malformed completion response: ") + ex.what());
    }
  }
  throw TransportError("completion request failed after " + std::to_string(config_.max_attempts) +
                       " attempts: " + last_error);
}

CompletionResponse LlmClient::complete(const CompletionRequest& request) {
  const std::string key = cache_key(request);
  auto hit = cache_.find(key);
  if (hit != cache_.end()) return hit->second;

  if (config_.replay_only) {
    throw CacheMissError("replay-mode cache miss for key " + key + " (prompt starts: '" +
                         request.prompt.substr(0, 40) + "...')");
  }

  CacheEntry entry;
  entry.key = key;
  entry.request = request;
  entry.response = perform_request(request);
  entry.created_at = static_cast<std::int64_t>(std::time(nullptr));
  cache_[key] = entry.response;
  append_entry(entry);
  return entry.response;
}

CacheStats LlmClient::cache_stats(const std::string& cache_file) {
  std::ifstream in(cache_file);
  if (!in) throw ConfigError("cannot open cache file: " + cache_file);
  CacheStats stats;
  std::set<std::string> keys;
  std::string line;
  while (std::getline(in, line)) {
    stats.bytes += line.size() + 1;
    if (auto entry = entry_from_json_line(line)) {
      stats.entries += 1;
      if (!keys.insert(entry->key).second) stats.duplicate_keys += 1;
    }
  }
  return stats;
}

std::size_t LlmClient::merge_cache_files(const std::vector<std::string>& inputs,
                                         const std::string& output) {
  std::set<std::string> keys;
  std::ofstream out(output, std::ios::trunc);
  if (!out) throw ConfigError("cannot open merge output: " + output);
  out << kCacheHeader << "\n";
  std::size_t written = 0;
  for (const auto& input : inputs) {
    std::ifstream in(input);
    if (!in) throw ConfigError("cannot open cache file: " + input);
    std::string line;
    while (std::getline(in, line)) {
      if (auto entry = entry_from_json_line(line)) {
        if (keys.insert(entry->key).second) {
          out << entry_to_json(*entry).dump() << "\n";
          ++written;
        }
      }
    }
  }
  return written;
}

}  // namespace ellm

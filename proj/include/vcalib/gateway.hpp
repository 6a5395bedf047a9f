#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcalib {

struct ModelConfig {
  std::string endpoint_url;  // "mock" selects the deterministic mock transport
  std::string model_name;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;
  bool is_reasoning_model = false;
  std::string api_key_env;  // env var holding the credential; empty = none
};

// Throws std::invalid_argument naming the offending field.
void validate(const ModelConfig& config);

enum class GatewayErrorKind {
  transport,  // connect/timeout level failure, retryable
  http,       // non-2xx status; retryable for 429/5xx
  protocol,   // 2xx with a body we cannot interpret
};

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrorKind kind, int http_status, const std::string& message)
      : std::runtime_error(message), kind_(kind), http_status_(http_status) {}

  GatewayErrorKind kind() const { return kind_; }
  int http_status() const { return http_status_; }  // 0 when not an HTTP error
  bool retryable() const {
    if (kind_ == GatewayErrorKind::transport) return true;
    if (kind_ == GatewayErrorKind::http)
      return http_status_ == 429 || (http_status_ >= 500 && http_status_ < 600);
    return false;
  }

 private:
  GatewayErrorKind kind_;
  int http_status_;
};

struct CompletionResult {
  std::string raw_text;
  std::string request_fingerprint;
  bool from_cache = false;
  int attempt_count = 0;  // 0 for cache hits
  std::chrono::milliseconds latency{0};
};

// One raw request attempt. Retries, backoff, and caching live in Gateway.
// Implementations must be safe to call from multiple threads.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string attempt(const std::string& prompt, const ModelConfig& config) = 0;
};

// POST {endpoint_url}/chat/completions with an OpenAI-style JSON body.
std::unique_ptr<Transport> make_http_transport();

// Deterministic reply the mock transport produces for (model, prompt),
// exposed so tests and fixtures can predict transcripts byte-for-byte.
std::string mock_reply(const std::string& model_name, const std::string& prompt,
                       bool is_reasoning_model = false);

// Hash-seeded mock language model. Replies follow the prompt family it
// detects (vanilla / self-critique / critique generation) so every pipeline
// above it sees well-formed, fully deterministic text. Scripted overrides
// and failure injection support the transport-level tests.
class MockTransport : public Transport {
 public:
  std::string attempt(const std::string& prompt, const ModelConfig& config) override;

  // Exact-prompt reply override.
  void script(const std::string& prompt, std::string reply);
  // Makes the next `times` attempts for `prompt` fail with `http_status`.
  void fail_times(const std::string& prompt, int times, int http_status = 503);

  int total_attempts() const { return total_attempts_.load(); }
  int peak_concurrency() const { return peak_concurrency_.load(); }
  // Slows every attempt down; lets concurrency tests observe overlap.
  void set_attempt_delay(std::chrono::milliseconds delay) { attempt_delay_ = delay; }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> scripted_;
  std::map<std::string, std::pair<int, int>> failures_;  // prompt -> {left, status}
  std::atomic<int> total_attempts_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_concurrency_{0};
  std::chrono::milliseconds attempt_delay_{0};
};

// Append-only fingerprint -> raw-text store persisted as JSONL. Existing
// entries are loaded on construction; concurrent readers and serialized
// appends are supported.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path file);

  std::optional<std::string> get(const std::string& fingerprint) const;
  void put(const std::string& fingerprint, const std::string& raw_text);
  std::size_t size() const;
  const std::filesystem::path& path() const { return file_; }

 private:
  std::filesystem::path file_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> entries_;
};

std::string request_fingerprint(const std::string& prompt, const ModelConfig& config);

struct BatchItem {
  std::size_t index = 0;
  std::optional<CompletionResult> result;
  std::optional<std::string> error;  // set when this prompt failed
};

// Retry/backoff/cache orchestration over a Transport.
class Gateway {
 public:
  Gateway(std::unique_ptr<Transport> transport, std::shared_ptr<ResponseCache> cache = nullptr);

  // Throws GatewayError after max_retries+1 failed attempts or on a
  // non-retryable failure.
  CompletionResult complete(const std::string& prompt, const ModelConfig& config);

  // Index-aligned results; at most `parallelism` requests in flight;
  // per-index failures are collected, never thrown.
  std::vector<BatchItem> complete_batch(const std::vector<std::string>& prompts,
                                        const ModelConfig& config, int parallelism);

  Transport& transport() { return *transport_; }

 private:
  std::unique_ptr<Transport> transport_;
  std::shared_ptr<ResponseCache> cache_;
};

// Builds a gateway whose transport matches config.endpoint_url ("mock" or
// an http(s) URL).
Gateway make_gateway(const ModelConfig& config, std::shared_ptr<ResponseCache> cache = nullptr);

}  // namespace vcalib

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "vcalib/gateway.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "vcalib/hash.hpp"

namespace vcalib {

namespace {

using nlohmann::json;

void validate_field(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

// The mock answers with words from this list so tests can choose gold
// answers that are sometimes hit and sometimes missed.
const char* kOpenEndedAnswers[] = {"paris",  "42",    "blue",  "newton",
                                   "tokyo",  "seven", "mercury", "oxygen"};

const char* kPreambles[] = {
    "Let me reason through the question step by step.",
    "Considering the available evidence carefully.",
    "Weighing the relevant facts before answering.",
    "Reviewing what the question actually asks.",
};

const char* kCritiqueOpeners[] = {
    "The student's reasoning is brief and leans on a single consideration.",
    "The student states a conclusion without weighing alternatives.",
    "The student's explanation covers the key fact but omits supporting detail.",
    "The student reasons in the right direction yet overstates the evidence.",
};

std::size_t count_options(const std::string& prompt) {
  std::size_t count = 0;
  for (char letter = 'A'; letter <= 'Z'; ++letter) {
    std::string marker = std::string("\n") + letter + ". ";
    if (prompt.find(marker) == std::string::npos) break;
    ++count;
  }
  return count;
}

std::string mock_critique(std::mt19937_64& gen, const std::string& prompt) {
  std::string opener = kCritiqueOpeners[gen() % std::size(kCritiqueOpeners)];
  std::string judgment;
  if (gen() % 16 == 0) {
    judgment = "The calibration is difficult to assess from this response alone.";
  } else {
    switch (gen() % 3) {
      case 0: judgment = "The confidence percentage is appropriate."; break;
      case 1: judgment = "The confidence percentage is too high."; break;
      default: judgment = "The confidence percentage is too low."; break;
    }
  }
  const bool structured =
      prompt.find("Structure your critique with a special \"</think>\" token") != std::string::npos;
  if (structured) return opener + "\n</think>\n" + judgment;
  return opener + " " + judgment;
}

}  // namespace

void validate(const ModelConfig& config) {
  validate_field(!config.endpoint_url.empty(), "model config: endpoint_url must be non-empty");
  validate_field(!config.model_name.empty(), "model config: model_name must be non-empty");
  validate_field(config.temperature >= 0.0, "model config: temperature must be >= 0");
  validate_field(config.max_output_tokens > 0, "model config: max_output_tokens must be positive");
  validate_field(config.timeout.count() > 0, "model config: timeout must be positive");
  validate_field(config.max_retries >= 0, "model config: max_retries must be >= 0");
  if (config.endpoint_url != "mock")
    validate_field(config.endpoint_url.rfind("http://", 0) == 0 ||
                       config.endpoint_url.rfind("https://", 0) == 0,
                   "model config: endpoint_url must be 'mock' or an http(s) URL");
}

std::string mock_reply(const std::string& model_name, const std::string& prompt,
                       bool is_reasoning_model) {
  std::mt19937_64 gen(fnv1a64(model_name + "\x1f" + prompt));

  if (prompt.find("Is the confidence percentage appropriate, too high, or too low?") !=
      std::string::npos)
    return mock_critique(gen, prompt);

  const bool refined = prompt.find("The refined answer is [your_answer]") != std::string::npos;
  const bool vanilla = prompt.find("The answer is [your_answer]") != std::string::npos;
  if (!refined && !vanilla) return "I am not sure what format you expect here.";

  const bool uncertainty = prompt.find("[uncertainty_percentage]") != std::string::npos;

  std::string answer;
  if (prompt.find("yes/no question") != std::string::npos) {
    answer = gen() % 2 == 0 ? "yes" : "no";
  } else if (prompt.find("multiple-choice question") != std::string::npos) {
    std::size_t options = count_options(prompt);
    if (options == 0) options = 4;
    answer = std::string(1, static_cast<char>('A' + gen() % options));
  } else if (prompt.find("math problem") != std::string::npos) {
    answer = std::to_string(gen() % 100);
  } else {
    answer = kOpenEndedAnswers[gen() % std::size(kOpenEndedAnswers)];
  }

  const int score = static_cast<int>(gen() % 101);
  std::string preamble = kPreambles[gen() % std::size(kPreambles)];
  std::string sentence = std::string(refined ? "The refined answer is " : "The answer is ") +
                         answer + ", and the " + (uncertainty ? "uncertainty" : "confidence") +
                         " is " + std::to_string(score) + "%";
  std::string body = preamble + " " + sentence;
  if (is_reasoning_model)
    return "<think>\n" + preamble + "\n</think>\n" + sentence;
  return body;
}

std::string MockTransport::attempt(const std::string& prompt, const ModelConfig& config) {
  total_attempts_.fetch_add(1);
  int now = in_flight_.fetch_add(1) + 1;
  int peak = peak_concurrency_.load();
  while (now > peak && !peak_concurrency_.compare_exchange_weak(peak, now)) {
  }
  struct Guard {
    std::atomic<int>& counter;
    ~Guard() { counter.fetch_sub(1); }
  } guard{in_flight_};

  if (attempt_delay_.count() > 0) std::this_thread::sleep_for(attempt_delay_);

  {
    std::lock_guard<std::mutex> lock(mu_);
    auto fail = failures_.find(prompt);
    if (fail != failures_.end() && fail->second.first > 0) {
      --fail->second.first;
      throw GatewayError(GatewayErrorKind::http, fail->second.second,
                         "scripted failure with status " + std::to_string(fail->second.second));
    }
    auto hit = scripted_.find(prompt);
    if (hit != scripted_.end()) return hit->second;
  }
  return mock_reply(config.model_name, prompt, config.is_reasoning_model);
}

void MockTransport::script(const std::string& prompt, std::string reply) {
  std::lock_guard<std::mutex> lock(mu_);
  scripted_[prompt] = std::move(reply);
}

void MockTransport::fail_times(const std::string& prompt, int times, int http_status) {
  std::lock_guard<std::mutex> lock(mu_);
  failures_[prompt] = {times, http_status};
}

namespace {

// {base, path_prefix} from e.g. "http://host:8080/v1".
std::pair<std::string, std::string> split_url(const std::string& url) {
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) return {url, ""};
  std::size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path), prefix};
}

class HttpTransport : public Transport {
 public:
  std::string attempt(const std::string& prompt, const ModelConfig& config) override {
    auto [base, prefix] = split_url(config.endpoint_url);
    httplib::Client client(base);
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    auto micros =
        std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Headers headers;
    if (!config.api_key_env.empty()) {
      const char* key = std::getenv(config.api_key_env.c_str());
      if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    json body = {
        {"model", config.model_name},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config.temperature},
        {"max_tokens", config.max_output_tokens},
    };
    auto res = client.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
    if (!res)
      throw GatewayError(GatewayErrorKind::transport, 0,
                         "transport failure: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw GatewayError(GatewayErrorKind::http, res->status,
                         "HTTP " + std::to_string(res->status) + " from " + config.endpoint_url);
    try {
      json parsed = json::parse(res->body);
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw GatewayError(GatewayErrorKind::protocol,
                         0, std::string("malformed completion body: ") + e.what());
    }
  }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() { return std::make_unique<HttpTransport>(); }

ResponseCache::ResponseCache(std::filesystem::path file) : file_(std::move(file)) {
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  std::ifstream in(file_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      json obj = json::parse(line);
      entries_[obj.at("fingerprint").get<std::string>()] = obj.at("raw_text").get<std::string>();
    } catch (const json::exception&) {
      // A torn trailing line from an interrupted run is not fatal.
    }
  }
}

std::optional<std::string> ResponseCache::get(const std::string& fingerprint) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(fingerprint);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const std::string& fingerprint, const std::string& raw_text) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!entries_.emplace(fingerprint, raw_text).second) return;
  std::ofstream out(file_, std::ios::app);
  out << json{{"fingerprint", fingerprint}, {"raw_text", raw_text}}.dump() << '\n';
}

std::size_t ResponseCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::string request_fingerprint(const std::string& prompt, const ModelConfig& config) {
  std::string key = config.endpoint_url + '\x1f' + config.model_name + '\x1f' +
                    format_double(config.temperature) + '\x1f' +
                    std::to_string(config.max_output_tokens) + '\x1f' + prompt;
  return sha256_hex(key);
}

Gateway::Gateway(std::unique_ptr<Transport> transport, std::shared_ptr<ResponseCache> cache)
    : transport_(std::move(transport)), cache_(std::move(cache)) {}

CompletionResult Gateway::complete(const std::string& prompt, const ModelConfig& config) {
  validate(config);
  const std::string fingerprint = request_fingerprint(prompt, config);
  if (cache_) {
    if (auto hit = cache_->get(fingerprint))
      return {*hit, fingerprint, true, 0, std::chrono::milliseconds(0)};
  }
  int attempts = 0;
  std::chrono::milliseconds backoff(25);
  for (;;) {
    ++attempts;
    auto start = std::chrono::steady_clock::now();
    try {
      std::string text = transport_->attempt(prompt, config);
      auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - start);
      if (cache_) cache_->put(fingerprint, text);
      return {std::move(text), fingerprint, false, attempts, latency};
    } catch (const GatewayError& e) {
      if (!e.retryable() || attempts > config.max_retries) throw;
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
}

std::vector<BatchItem> Gateway::complete_batch(const std::vector<std::string>& prompts,
                                               const ModelConfig& config, int parallelism) {
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  std::vector<BatchItem> items(prompts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= prompts.size()) return;
      items[i].index = i;
      try {
        items[i].result = complete(prompts[i], config);
      } catch (const std::exception& e) {
        items[i].error = e.what();
      }
    }
  };
  std::size_t workers = std::min<std::size_t>(parallelism, prompts.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return items;
}

Gateway make_gateway(const ModelConfig& config, std::shared_ptr<ResponseCache> cache) {
  validate(config);
  if (config.endpoint_url == "mock")
    return Gateway(std::make_unique<MockTransport>(), std::move(cache));
  return Gateway(make_http_transport(), std::move(cache));
}

}  // namespace vcalib

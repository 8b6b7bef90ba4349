#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "minilab/gateway/pricing.hpp"
#include "minilab/gateway/transport.hpp"
#include "minilab/gateway/types.hpp"

namespace minilab {

// What the engine, research provider and curation service talk to.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(std::string_view backend, const ChatRequest& req) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{250};
  double jitter = 0.5;  // each wait is scaled by a factor in [1 - jitter, 1 + jitter]
};

// Uniform client over registered backends. complete() is safe to call from
// many threads; backends must all be registered before that starts.
class ModelGateway final : public ChatClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;
  using Clock = std::function<Instant()>;

  explicit ModelGateway(RetryPolicy retry = {}, Sleeper sleeper = {}, Clock clock = {});
  ~ModelGateway() override;

  void register_backend(const BackendConfig& cfg, std::shared_ptr<ChatTransport> transport);
  bool has_backend(std::string_view name) const;
  const BackendConfig& backend(std::string_view name) const;
  std::vector<std::string> backend_names() const;

  // Retries 429/5xx and dropped connections up to retry.max_attempts with
  // jittered exponential backoff. Errors: UNKNOWN_BACKEND, TIMEOUT,
  // BACKEND_ERROR (detail = status), EXHAUSTED_RETRIES.
  ChatResponse complete(std::string_view backend, const ChatRequest& req) override;

  std::vector<LedgerEntry> ledger() const;

 private:
  struct Slot {
    BackendConfig cfg;
    std::shared_ptr<ChatTransport> transport;
    std::unique_ptr<std::counting_semaphore<>> limiter;
  };

  Slot& slot(std::string_view name) const;
  std::chrono::milliseconds backoff(int attempt);

  RetryPolicy retry_;
  Sleeper sleeper_;
  Clock clock_;
  std::map<std::string, std::unique_ptr<Slot>, std::less<>> backends_;
  mutable std::mutex ledger_mu_;
  std::vector<LedgerEntry> ledger_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_{0x5eed};
};

}  // namespace minilab

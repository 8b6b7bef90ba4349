#include "minilab/gateway/gateway.hpp"

#include <cmath>
#include <thread>

#include "minilab/error.hpp"
#include "minilab/gateway/wire.hpp"

namespace minilab {

namespace {

bool is_transient(int status) { return status == 0 || status == 429 || status >= 500; }

// Releases the backend's concurrency permit on scope exit.
class Permit {
 public:
  explicit Permit(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~Permit() { sem_.release(); }
  Permit(const Permit&) = delete;
  Permit& operator=(const Permit&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

}  // namespace

ModelGateway::ModelGateway(RetryPolicy retry, Sleeper sleeper, Clock clock)
    : retry_(retry), sleeper_(std::move(sleeper)), clock_(std::move(clock)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (!clock_) clock_ = wall_clock_now;
  if (retry_.max_attempts < 1) retry_.max_attempts = 1;
}

ModelGateway::~ModelGateway() = default;

void ModelGateway::register_backend(const BackendConfig& cfg, std::shared_ptr<ChatTransport> transport) {
  if (auto problems = validate_backend_config(cfg); !problems.empty()) {
    throw Error("INVALID_BACKEND", problems.front());
  }
  if (!transport) throw Error("INVALID_BACKEND", "backend '" + cfg.name + "' has no transport");
  auto slot = std::make_unique<Slot>();
  slot->cfg = cfg;
  slot->transport = std::move(transport);
  slot->limiter = std::make_unique<std::counting_semaphore<>>(cfg.max_concurrency);
  backends_[cfg.name] = std::move(slot);
}

bool ModelGateway::has_backend(std::string_view name) const { return backends_.contains(name); }

ModelGateway::Slot& ModelGateway::slot(std::string_view name) const {
  const auto it = backends_.find(name);
  if (it == backends_.end()) {
    throw Error("UNKNOWN_BACKEND", "backend '" + std::string(name) + "' is not registered");
  }
  return *it->second;
}

const BackendConfig& ModelGateway::backend(std::string_view name) const { return slot(name).cfg; }

std::vector<std::string> ModelGateway::backend_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : backends_) out.push_back(name);
  return out;
}

std::chrono::milliseconds ModelGateway::backoff(int attempt) {
  double factor = 1.0;
  {
    std::lock_guard lock(rng_mu_);
    std::uniform_real_distribution<double> dist(1.0 - retry_.jitter, 1.0 + retry_.jitter);
    factor = dist(rng_);
  }
  const double ms = static_cast<double>(retry_.base_delay.count()) * std::ldexp(1.0, attempt - 1) * factor;
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

ChatResponse ModelGateway::complete(std::string_view backend, const ChatRequest& req) {
  validate_chat_request(req);
  Slot& s = slot(backend);
  const std::string body = wire::encode_chat_request(s.cfg, req);

  int last_status = 0;
  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    TransportResponse resp;
    {
      Permit permit(*s.limiter);
      resp = s.transport->post(s.cfg, body);
    }
    if (resp.status >= 200 && resp.status < 300) {
      const auto decoded = wire::decode_chat_response(resp.body);
      ChatResponse out;
      out.text = decoded.text;
      out.usage = UsageRecord{decoded.prompt_tokens, decoded.completion_tokens, s.cfg.name, clock_()};
      out.attempts = attempt;
      std::lock_guard lock(ledger_mu_);
      ledger_.push_back(LedgerEntry{req.tag.lead_id, req.tag.purpose, out.usage});
      return out;
    }
    if (!is_transient(resp.status)) {
      throw Error("BACKEND_ERROR",
                  "backend '" + s.cfg.name + "' returned HTTP " + std::to_string(resp.status),
                  resp.status);
    }
    last_status = resp.status;
    if (attempt < retry_.max_attempts) sleeper_(backoff(attempt));
  }
  throw Error("EXHAUSTED_RETRIES",
              "backend '" + s.cfg.name + "' failed " + std::to_string(retry_.max_attempts) +
                  " attempts, last status " + std::to_string(last_status),
              last_status);
}

std::vector<LedgerEntry> ModelGateway::ledger() const {
  std::lock_guard lock(ledger_mu_);
  return ledger_;
}

}  // namespace minilab

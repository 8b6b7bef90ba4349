#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "minilab/core/json.hpp"
#include "minilab/gateway/gateway.hpp"

namespace minilab::curation {

enum class JobStatus { pending, generated, reviewed };
enum class Verdict { accept, accept_with_edit, reject };

const char* to_string(JobStatus s);
const char* to_string(Verdict v);
JobStatus parse_job_status(const std::string& s);
Verdict parse_verdict(const std::string& s);

struct PromptContext {
  std::string campaign_id;  // optional, used by export filters
  std::string value_proposition;
  std::vector<std::string> pain_points;
  std::vector<std::string> research_goals;
  std::string dossier_excerpt;
  std::string instructions;

  bool operator==(const PromptContext&) const = default;
};

struct GenerationFailure {
  std::size_t index = 0;  // 0-based call number within the job
  std::string code;
  std::string message;

  bool operator==(const GenerationFailure&) const = default;
};

struct GenerationJob {
  std::string id;
  PromptContext context;
  std::string teacher_backend;
  std::size_t n_candidates = 1;
  JobStatus status = JobStatus::pending;
  Instant created_at{};
  std::vector<std::string> candidate_ids;
  std::vector<GenerationFailure> failures;

  bool operator==(const GenerationJob&) const = default;
};

struct Ratings {
  int quality = 0;
  int relevance = 0;
  int accuracy = 0;

  bool operator==(const Ratings&) const = default;
};

struct ReviewDecision {
  std::string reviewer_id;
  Verdict verdict = Verdict::accept;
  std::optional<std::string> edited_text;  // exactly when accept_with_edit
  Ratings ratings;
  Instant decided_at{};
  int version = 1;

  bool operator==(const ReviewDecision&) const = default;
};

struct Candidate {
  std::string id;
  std::string job_id;
  std::string text;
  UsageRecord usage;
  Instant created_at{};
  std::optional<ReviewDecision> decision;

  bool operator==(const Candidate&) const = default;
};

struct GoldPair {
  std::string instruction;
  std::string input;
  std::string output;
  std::string teacher_backend;
  std::string reviewer_id;
  std::string job_id;
  Instant decided_at{};
  // Not part of the JSONL line; kept for traceability and the manifest.
  std::string candidate_id;
  bool edited = false;

  bool operator==(const GoldPair&) const = default;
};

void to_json(Json& j, const PromptContext& v);
void from_json(const Json& j, PromptContext& v);
void to_json(Json& j, const GenerationFailure& v);
void from_json(const Json& j, GenerationFailure& v);
void to_json(Json& j, const GenerationJob& v);
void from_json(const Json& j, GenerationJob& v);
void to_json(Json& j, const Ratings& v);
void from_json(const Json& j, Ratings& v);
void to_json(Json& j, const ReviewDecision& v);
void from_json(const Json& j, ReviewDecision& v);
void to_json(Json& j, const Candidate& v);
void from_json(const Json& j, Candidate& v);
void to_json(Json& j, const GoldPair& v);  // API form, includes candidate_id and edited

// One export line, keys in fixed order.
std::string gold_jsonl_line(const GoldPair& g);
// Strict inverse of gold_jsonl_line: exact key set, string values, RFC3339
// decided_at. Errors: INVALID_GOLD_LINE.
GoldPair parse_gold_jsonl_line(const std::string& line);

// The teacher sees `instruction` as the system message and `input` as the
// user message; the gold pair stores the same two strings.
std::string assemble_instruction(const PromptContext& ctx);
std::string assemble_input(const PromptContext& ctx);
ChatRequest build_generation_request(const PromptContext& ctx);

// INVALID_DECISION on a missing reviewer, a rating outside 1..5, version != 1,
// or edited_text present/absent against the verdict.
void validate_decision(const ReviewDecision& d);

enum class DecisionStatus { applied, already_decided };

struct DecisionResult {
  DecisionStatus status = DecisionStatus::applied;
  Candidate candidate;  // as stored; carries the winning decision
};

struct ExportFilter {
  std::optional<std::string> campaign_id;
  std::optional<std::string> teacher_backend;
  std::optional<Instant> decided_from;  // inclusive
  std::optional<Instant> decided_to;    // exclusive
};

struct ExportResult {
  std::string jsonl;  // one line per GoldPair, sorted by (decided_at, candidate id)
  std::vector<GoldPair> pairs;
  Json manifest;  // count, reviewers, decided, accepted, edited, rejected, accept_rate
};

struct QueueStats {
  std::size_t pending_review = 0;
  std::size_t decided = 0;
  std::map<std::string, std::size_t> per_reviewer;
  std::optional<double> mean_quality;
  std::optional<double> mean_relevance;
  std::optional<double> mean_accuracy;
};

Json to_json_value(const QueueStats& s);

struct StoreCounts {
  std::size_t candidates = 0;
  std::size_t undecided = 0;
  std::size_t accepted = 0;  // plain accepts
  std::size_t edited = 0;    // accept_with_edit
  std::size_t rejected = 0;
  std::size_t gold = 0;
};

struct CurationOptions {
  std::string log_path;  // empty = in-memory only
};

// Candidate store with first-decision-wins. All methods are thread-safe;
// decisions compare-and-set on "undecided" under the store lock, teacher
// calls happen outside it.
class CurationStore {
 public:
  explicit CurationStore(ChatClient& client, CurationOptions opts = {});
  CurationStore(const CurationStore&) = delete;
  CurationStore& operator=(const CurationStore&) = delete;

  // Replays the log file if it exists. Returns the number of entries read.
  std::size_t load();

  // Calls the teacher n times; failed calls are recorded on the job and the
  // job keeps the candidates that did succeed.
  // Errors: INVALID_JOB (n = 0), UNKNOWN_BACKEND.
  GenerationJob enqueue_job(const PromptContext& ctx, const std::string& teacher_backend, std::size_t n_candidates,
                            Instant now);

  // Errors: UNKNOWN_CANDIDATE, INVALID_DECISION. A decided candidate yields
  // status already_decided with the stored decision and is left untouched.
  DecisionResult submit_decision(const std::string& candidate_id, const ReviewDecision& decision);

  // Undecided candidates, oldest first.
  std::vector<Candidate> queue(std::size_t limit) const;
  QueueStats queue_stats() const;
  StoreCounts counts() const;

  ExportResult export_gold(const ExportFilter& filter = {}) const;

  std::optional<Candidate> candidate(const std::string& id) const;
  std::optional<GenerationJob> job(const std::string& id) const;
  std::vector<Candidate> candidates() const;
  std::vector<GoldPair> gold() const;

 private:
  void append_log(const Json& e);
  void apply(const Json& e);
  GoldPair make_gold(const Candidate& c, const GenerationJob& job) const;
  void refresh_job_status(GenerationJob& job);

  ChatClient& client_;
  CurationOptions opts_;
  mutable std::shared_mutex mu_;
  std::ofstream log_;
  std::uint64_t next_job_ = 1;
  std::uint64_t next_candidate_ = 1;
  std::map<std::string, GenerationJob> jobs_;
  std::map<std::string, Candidate> candidates_;
  std::vector<std::string> candidate_order_;  // creation order
  std::map<std::string, GoldPair> gold_;      // by candidate id
};

}  // namespace minilab::curation

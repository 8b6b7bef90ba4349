// Acceptance run: one PASS/FAIL line per primary criterion, nonzero exit if
// any fails. Tolerances and runtime budgets are pinned below.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "minilab/cli/cli.hpp"
#include "minilab/curation/curation.hpp"
#include "minilab/engine/campaign.hpp"
#include "minilab/gateway/registry.hpp"
#include "minilab/hash.hpp"
#include "minilab/lora/catalog.hpp"
#include "minilab/lora/lora.hpp"
#include "minilab/metrics/bertscore.hpp"
#include "minilab/metrics/rouge.hpp"
#include "minilab/report/sim_report.hpp"
#include "minilab/report/table.hpp"
#include "minilab/sim/profile.hpp"
#include "minilab/sim/simulator.hpp"
#include "minilab/stats/agreement.hpp"
#include "support/fakes.hpp"
#include "support/oracles.hpp"

using namespace minilab;
using testing_support::data_path;
using testing_support::error_code_of;
using testing_support::FakeClient;

namespace {

constexpr double kRougeFixtureTol = 1e-6;
constexpr double kBertOracleTol = 1e-12;
constexpr double kBertExampleTol = 1e-4;
constexpr double kAlphaTol = 1e-4;
constexpr double kOpenTolPp = 2.5;
constexpr double kCtrTolPp = 1.0;
constexpr double kMergeTol = 1e-12;
constexpr double kReductionTol = 1e-3;

// Collects the first few failures of one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures_ == 0; }
  std::string notes() const {
    return failures_ > 3 ? notes_ + "; +" + std::to_string(failures_ - 3) + " more" : notes_;
  }

 private:
  int failures_ = 0;
  std::string notes_;
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1e", v);
  return buf;
}

template <typename F>
void expect_throws(Check& c, const std::string& code, F&& f, const std::string& what) {
  c.expect(error_code_of(std::forward<F>(f)) == code, what + " should raise " + code);
}

// ---- ROUGE-L

std::vector<std::vector<int>> sequences_up_to(std::size_t max_len) {
  std::vector<std::vector<int>> out{{}}, frontier{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& s : frontier) {
      for (int c = 0; c < 3; ++c) {
        next.push_back(s);
        next.back().push_back(c);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

std::string rouge(Check& c) {
  std::size_t pairs = 0;
  const auto seqs = sequences_up_to(8);
  for (const auto& a : seqs) {
    for (const auto& b : seqs) {
      if (a.size() + b.size() > 8) continue;
      ++pairs;
      c.expect(metrics::lcs_length(a, b) == oracle::lcs_recursive(a, 0, b, 0), "small pair mismatch");
    }
  }
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::string> a(rng() % 51), b(1 + rng() % 50);
    const int alphabet = 2 + static_cast<int>(rng() % 6);
    for (auto& x : a) x = std::string(1, static_cast<char>('a' + rng() % alphabet));
    for (auto& x : b) x = std::string(1, static_cast<char>('a' + rng() % alphabet));
    const std::size_t lcs = oracle::lcs_table(a, b);
    const auto r = metrics::rouge_l(a, b);
    const auto o = oracle::rouge_from_lcs(lcs, a.size(), b.size(), 1.2);
    c.expect(r.lcs == lcs && r.precision == o.p && r.recall == o.r, "random pair mismatch");
  }
  const auto f = metrics::rouge_l_text("the cat sat", "the cat sat down", 1.2).f_measure;
  c.expect(std::abs(f - 0.835616) <= kRougeFixtureTol, "fixture F " + num(f));
  return std::to_string(pairs) + " small pairs + 200 random, fixture F=" + num(f);
}

// ---- BERTScore

metrics::EmbeddedSeq embedded(const std::vector<std::vector<double>>& v, const std::vector<double>& idf) {
  metrics::EmbeddedSeq s;
  for (std::size_t i = 0; i < v.size(); ++i) s.tokens.push_back("t" + std::to_string(i));
  s.vectors = v;
  s.idf = idf;
  return s;
}

std::string bertscore(Check& c) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> idf(0.1, 3.0);
  auto vectors = [&](std::size_t n, std::size_t dim) {
    std::vector<std::vector<double>> out(n, std::vector<double>(dim));
    for (auto& v : out) {
      do {
        for (auto& x : v) x = g(rng);
      } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0; }));
    }
    return out;
  };
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t dim = 1 + rng() % 16, n = 1 + rng() % 32, m = 1 + rng() % 32;
    const auto cv = vectors(n, dim), rv = vectors(m, dim);
    std::vector<double> ci(n), ri(m);
    for (auto& x : ci) x = idf(rng);
    for (auto& x : ri) x = idf(rng);
    const auto r = metrics::bert_score(embedded(cv, ci), embedded(rv, ri));
    const auto o = oracle::bertscore(cv, ci, rv, ri);
    worst = std::max({worst, std::abs(r.precision - o.p), std::abs(r.recall - o.r), std::abs(r.f1 - o.f)});
  }
  c.expect(worst <= kBertOracleTol, "oracle gap " + sci(worst));

  const auto id = metrics::load_embedding_fixture(data_path("fixtures/bert_identity.jsonl"));
  const double id_f1 = metrics::bert_score(id, id).f1;
  c.expect(std::abs(id_f1 - 1.0) <= 1e-15, "identity F1 " + num(id_f1, 17));
  const auto f1 = metrics::bert_score(metrics::load_embedding_fixture(data_path("fixtures/bert_two_token_candidate.jsonl")),
                                      metrics::load_embedding_fixture(data_path("fixtures/bert_one_token_reference.jsonl")))
                      .f1;
  c.expect(std::abs(f1 - 0.6667) <= kBertExampleTol, "two-token F1 " + num(f1));
  return "max oracle gap " + sci(worst) + ", identity " + num(id_f1, 4) + ", two-token F1 " + num(f1, 4);
}

// ---- agreement

std::string agreement(Check& c) {
  const double k = stats::cohen_kappa({{20, 5}, {5, 20}}).value;
  c.expect(k == 0.6, "kappa " + num(k, 17));
  const double a = stats::krippendorff_alpha({{1, 2}, {4, 4}}, stats::AlphaMetric::interval).value;
  c.expect(std::abs(a - 0.8889) <= kAlphaTol, "alpha " + num(a));

  c.expect(stats::cohen_kappa({{3, 0}, {0, 4}}).value == 1.0, "perfect kappa");
  c.expect(stats::krippendorff_alpha({{1, 1}, {3, 3}, {5, 5}}, stats::AlphaMetric::interval).value == 1.0,
           "perfect interval alpha");
  c.expect(stats::krippendorff_alpha({{1, 1}, {2, 2}}, stats::AlphaMetric::nominal).value == 1.0,
           "perfect nominal alpha");
  const std::vector<double> x{1, 2, 3}, y{1, 2, 3}, flat{2, 2, 2};
  c.expect(stats::pearson_r(x, y).value == 1.0, "perfect pearson");

  expect_throws(c, "DEGENERATE", [] { stats::cohen_kappa({{4, 0}, {0, 0}}); }, "one-category kappa");
  expect_throws(c, "DEGENERATE", [] { stats::krippendorff_alpha({{2, 2}, {2, 2}}, stats::AlphaMetric::interval); },
                "constant alpha");
  expect_throws(c, "INSUFFICIENT_DATA", [] { stats::krippendorff_alpha({{1, 2}}, stats::AlphaMetric::interval); },
                "single-unit alpha");
  expect_throws(c, "ZERO_VARIANCE", [&] { stats::pearson_r(x, flat); }, "flat pearson");
  expect_throws(c, "INVALID_MATRIX", [] { stats::cohen_kappa({{0, 0}, {0, 0}}); }, "empty kappa");
  return "kappa=" + num(k, 3) + " alpha=" + num(a, 4);
}

// ---- simulator

std::string simulator(Check& c) {
  const auto spec = json_util::load_file(data_path("campaigns/default.json")).get<CampaignSpec>();
  const auto profiles = sim::resolve_arm_profiles(spec, sim::load_profiles(data_path("profiles/table1.json")),
                                                  std::string("table1-gpt4o"));
  const Registry registry = load_registry(data_path("backends.json"));
  const auto gateway = make_gateway(registry);
  const std::uint64_t seed = 42;
  const auto result = sim::run_experiment(spec, 2000, profiles, seed, *gateway, registry.prices);
  const Json agg = report::aggregate_report({report::summarize(result, 1, spec.id, seed)}, seed);
  const double open = agg.at("kpi").at("open_rate").at("value").get<double>();
  const double ctr = agg.at("kpi").at("ctr").at("value").get<double>();
  c.expect(std::abs(open - 33.2) <= kOpenTolPp, "open rate " + num(open, 2));
  c.expect(std::abs(ctr - 3.2) <= kCtrTolPp, "CTR " + num(ctr, 2));
  return "open " + num(open, 2) + "% (33.2 +/- 2.5), CTR " + num(ctr, 2) + "% (3.2 +/- 1.0)";
}

// ---- engine

struct TraceStats {
  std::size_t sends = 0, unsubscribed = 0, replies = 0;
};

void run_trace(std::uint64_t seed, Check& c, TraceStats& stats) {
  using namespace minilab::engine;
  const std::string tag = " (seed " + std::to_string(seed) + ")";
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> delays(1 + rng() % 5);
  for (auto& d : delays) d = static_cast<std::int64_t>(rng() % 4) * 3600 * static_cast<std::int64_t>(rng() % 30);
  FakeClient client([seed](std::string_view b, const ChatRequest& req, int call) -> std::string {
    if (unit_interval(splitmix64(seed ^ static_cast<std::uint64_t>(call))) < 0.1) {
      throw Error("BACKEND_ERROR", "injected", 500);
    }
    return "Subject: s" + std::to_string(call) + "\n\n" + std::string(b) + " " + std::to_string(req.messages.size());
  });
  auto camp = Campaign::create(testing_support::make_spec(delays), at_seconds(0), client);
  std::int64_t now = 0;
  const std::size_t n_leads = 1 + rng() % 4;
  for (std::size_t i = 0; i < n_leads; ++i) {
    camp.add_lead(testing_support::make_lead("lead" + std::to_string(i), rng() % 2 ? "A" : "B"), at_seconds(now));
  }
  std::set<std::string> unsubscribed;

  auto check_sent = [&](const CampaignState& before, const MessageRecord& m) {
    const std::string lead = m.id.substr(0, m.id.find(':'));
    const LeadState& prev = before.leads.at(lead);
    c.expect(!prev.unsubscribed && !unsubscribed.count(lead), "send after unsubscribe" + tag);
    if (!m.step_index) return;
    c.expect(prev.pending && prev.pending->kind == ActionKind::send_step && prev.pending->due <= m.timestamp,
             "send before due" + tag);
    c.expect(*m.step_index == prev.next_step, "step out of order" + tag);
  };
  auto tick = [&] {
    const CampaignState before = camp.state();
    for (const auto& m : camp.tick(at_seconds(now))) check_sent(before, m);
  };

  const int ops = 10 + static_cast<int>(rng() % 60);
  for (int op = 0; op < ops; ++op) {
    now += static_cast<std::int64_t>(rng() % (2 * 86400));
    const auto& leads = camp.state().leads;
    auto it = leads.begin();
    std::advance(it, static_cast<long>(rng() % leads.size()));
    const std::string lead = it->first;
    const LeadState& ls = it->second;
    switch (rng() % 8) {
      case 0:
      case 1:
      case 2:
        tick();
        break;
      case 3:
      case 4: {
        if (ls.memory.history.empty()) break;
        const auto& m = ls.memory.history[rng() % ls.memory.history.size()];
        const EventKind kinds[] = {EventKind::delivered, EventKind::open, EventKind::click, EventKind::reply,
                                   EventKind::unsubscribe};
        EventKind k = kinds[rng() % 5];
        if (!was_delivered(ls, m.id) && rng() % 4) k = EventKind::delivered;
        const EngagementEvent ev{lead, k, at_seconds(now), m.id,
                                 k == EventKind::reply ? std::optional<std::string>("reply") : std::nullopt};
        try {
          if (camp.ingest_event(ev) && k == EventKind::unsubscribe) unsubscribed.insert(lead);
        } catch (const Error& e) {
          c.expect(e.code() == "NOT_DELIVERED", "unexpected event error " + e.code() + tag);
        }
        break;
      }
      case 5: {
        const CampaignState before = camp.state();
        try {
          check_sent(before, camp.draft_reply(lead, at_seconds(now)));
        } catch (const Error& e) {
          c.expect(e.code() == "WRONG_STATE" || e.code() == "BACKEND_ERROR", "unexpected reply error" + tag);
        }
        break;
      }
      case 6:
        camp.pause_arm(rng() % 2 ? "A" : "B");
        break;
      case 7:
        camp.resume_arm(rng() % 2 ? "A" : "B");
        break;
    }
  }
  for (int i = 0; i < 40; ++i) {
    now += 86400;
    tick();
  }

  for (const auto& [id, ls] : camp.state().leads) {
    std::optional<std::size_t> last;
    for (const auto& m : ls.memory.history) {
      if (!m.step_index) continue;
      c.expect(!last || *m.step_index > *last, "steps not strictly increasing" + tag);
      last = m.step_index;
    }
    stats.sends += ls.memory.history.size();
    stats.replies += ls.memory.inbound.size();
    stats.unsubscribed += ls.unsubscribed;
  }
  c.expect(replay(camp.log()) == camp.state(), "replay differs" + tag);
}

std::string engine_safety(Check& c) {
  TraceStats stats;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) run_trace(seed, c, stats);
  // A generator that never reaches these paths would pass vacuously.
  c.expect(stats.sends > 3000 && stats.replies > 100 && stats.unsubscribed > 100, "trace coverage too thin");
  return "1000 traces, " + std::to_string(stats.sends) + " sends, " + std::to_string(stats.replies) + " replies, " +
         std::to_string(stats.unsubscribed) + " unsubscribed leads";
}

// ---- curation

std::string curation_integrity(Check& c) {
  using namespace minilab::curation;
  FakeClient client([](std::string_view, const ChatRequest&, int call) { return "candidate " + std::to_string(call); });
  CurationStore store(client);
  PromptContext ctx;
  ctx.campaign_id = "acceptance";
  ctx.value_proposition = "Faster month-end close";
  ctx.instructions = "Write a short first-touch email.";
  std::vector<std::string> ids;
  for (int j = 0; j < 50; ++j) {
    const auto job = store.enqueue_job(ctx, "teacher", 10, at_seconds(j));
    ids.insert(ids.end(), job.candidate_ids.begin(), job.candidate_ids.end());
  }
  c.expect(ids.size() == 500, "generated " + std::to_string(ids.size()) + " candidates");

  std::atomic<bool> done{false};
  std::atomic<std::size_t> violations{0}, checks{0}, applied{0};
  std::thread watcher([&] {
    while (!done) {
      const auto n = store.counts();
      if (n.candidates != n.undecided + n.accepted + n.edited + n.rejected || n.gold != n.accepted + n.edited) {
        ++violations;
      }
      ++checks;
    }
  });
  std::vector<std::thread> reviewers;
  for (int r = 0; r < 50; ++r) {
    reviewers.emplace_back([&, r] {
      std::mt19937_64 rng(static_cast<std::uint64_t>(r));
      auto order = ids;
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t i = 0; i < 40; ++i) {
        const auto& id = i < 10 ? ids[static_cast<std::size_t>(r) * 10 + i] : order[i];
        ReviewDecision d;
        d.reviewer_id = "reviewer-" + std::to_string(r);
        const int pick = static_cast<int>(rng() % 3);
        d.verdict = pick == 0 ? Verdict::accept : pick == 1 ? Verdict::accept_with_edit : Verdict::reject;
        if (d.verdict == Verdict::accept_with_edit) d.edited_text = "edit by " + std::to_string(r);
        d.ratings = {4, 4, 5};
        d.decided_at = at_seconds(5000 + r);
        if (store.submit_decision(id, d).status == DecisionStatus::applied) ++applied;
      }
    });
  }
  for (auto& t : reviewers) t.join();
  done = true;
  watcher.join();

  c.expect(applied == 500, std::to_string(applied.load()) + " decisions applied");
  c.expect(violations == 0, std::to_string(violations.load()) + " conservation violations");
  const auto ex = store.export_gold();
  c.expect(store.export_gold().jsonl == ex.jsonl, "export not byte-idempotent");
  std::istringstream lines(ex.jsonl);
  std::size_t i = 0;
  for (std::string line; std::getline(lines, line); ++i) {
    try {
      const auto back = parse_gold_jsonl_line(line);
      c.expect(i < ex.pairs.size() && back.output == ex.pairs[i].output && gold_jsonl_line(back) == line,
               "line " + std::to_string(i) + " does not round-trip");
    } catch (const Error& e) {
      c.expect(false, "line " + std::to_string(i) + ": " + e.code());
    }
  }
  c.expect(i == ex.pairs.size(), "line count differs from pair count");
  return std::to_string(applied.load()) + " decisions, " + std::to_string(checks.load()) +
         " conservation checks, " + std::to_string(ex.pairs.size()) + " gold pairs round-tripped";
}

// ---- LoRA

std::string lora_arithmetic(Check& c) {
  using namespace minilab::lora;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto random = [&](std::size_t r, std::size_t k) {
    Matrix<double> m(r, k);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < k; ++j) m(i, j) = u(rng);
    return m;
  };
  auto rows = [](const Matrix<double>& m) {
    std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
  };
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng() % 8, k = 1 + rng() % 8, r = 1 + rng() % 8;
    const MergeInput<double> in{random(d, k), random(d, r), random(r, k)};
    const auto w = merge_weights(in);
    const auto o = oracle::merge(rows(in.w0), rows(in.b), rows(in.a), 1.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < k; ++j) worst = std::max(worst, std::abs(w(i, j) - o[i][j]));
  }
  c.expect(worst <= kMergeTol, "merge gap " + sci(worst));

  const double r16 = reduction_ratio({"square", 4096, 4096}, {16});
  const double r32 = reduction_ratio({"square", 4096, 4096}, {32});
  c.expect(std::abs(r16 - 99.219) <= kReductionTol, "r=16 reduction " + num(r16, 4));
  c.expect(std::abs(r32 - 98.438) <= kReductionTol, "r=32 reduction " + num(r32, 4));

  std::size_t learners = 0;
  for (const auto& m : load_catalog(data_path("model_catalog.json"))) {
    if (!m.params) continue;
    ++learners;
    const int expected = *m.params <= 3e9 ? 16 : 32;
    c.expect(rank_for_model(*m.params).rank == expected, m.name + " rank");
    c.expect(m.lora_rank && *m.lora_rank == expected, m.name + " catalog rank");
  }
  c.expect(learners == 8, std::to_string(learners) + " learners in catalog");
  return "merge gap " + sci(worst) + ", r16 " + num(r16, 3) + "%, r32 " + num(r32, 3) + "%, " +
         std::to_string(learners) + " catalog ranks";
}

// ---- fixtures

std::string report_output(const std::string& table, Check& c) {
  std::ostringstream out, err;
  const int code = cli::run_cli({"report", "--fixtures", data_path("fixtures/" + table + ".json")}, out, err);
  c.expect(code == 0, table + " report exit " + std::to_string(code) + ": " + err.str());
  return out.str();
}

std::string fixture_fidelity(Check& c) {
  std::size_t cells = 0;
  for (const std::string name : {"table1", "table2", "table3"}) {
    const std::string out = report_output(name, c);
    const auto t = report::load_fixture(data_path("fixtures/" + name + ".json"));
    for (const auto& g : t.groups) {
      for (const auto& row : g.rows) {
        for (const auto& col : t.columns) {
          ++cells;
          c.expect(out.find(row.at(col.key)) != std::string::npos, name + " cell " + row.at(col.key) + " missing");
        }
      }
    }
  }
  const std::string t2 = report_output("table2", c);
  const std::string t3 = report_output("table3", c);
  const auto table2 = report::load_fixture(data_path("fixtures/table2.json"));
  const auto* claude = report::find_row(table2, "Claude-4-Sonnet");
  c.expect(claude && claude->at("bert_f1") == "0.905" && t2.find("0.905") != std::string::npos, "Claude-4-Sonnet BERT F1");
  c.expect(t3.find("| GPT-4o |") != std::string::npos && t3.find("$0.1383") != std::string::npos, "GPT-4o cost");
  const std::string headline = "GPT-4o vs Gemma-3-12B-it (LoRA): $0.1383 / $0.0071 = 19.48x [paper-fixture]";
  c.expect(t3.find(headline) != std::string::npos, "headline ratio line missing");
  return std::to_string(cells) + " cells verbatim, headline 19.48x [paper-fixture]";
}

struct Criterion {
  const char* name;
  double budget_s;  // 0 = no runtime requirement
  std::function<std::string(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"ROUGE-L exactness", 5.0, rouge},
      {"BERTScore core", 5.0, bertscore},
      {"Agreement stats", 0.0, agreement},
      {"Simulator calibration", 60.0, simulator},
      {"Engine safety properties", 0.0, engine_safety},
      {"Curation integrity", 0.0, curation_integrity},
      {"LoRA arithmetic", 0.0, lora_arithmetic},
      {"Fixture fidelity", 0.0, fixture_fidelity},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      detail = cr.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_s > 0) check.expect(secs < cr.budget_s, "took " + num(secs, 2) + "s, budget " + num(cr.budget_s, 0) + "s");
    const bool ok = check.ok();
    failed += !ok;
    std::cout << "[PRIMARY] " << (ok ? "PASS" : "FAIL") << "  " << cr.name << ": " << detail << " (" << num(secs, 2)
              << "s)";
    if (!ok) std::cout << " -- " << check.notes();
    std::cout << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " of " : "all ") << criteria.size() << " criteria"
            << (failed ? " failed" : " passed") << std::endl;
  return failed ? 1 : 0;
}

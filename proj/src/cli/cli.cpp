#include "minilab/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include "minilab/core/json.hpp"
#include "minilab/core/validate.hpp"
#include "minilab/curation/curation.hpp"
#include "minilab/engine/service.hpp"
#include "minilab/error.hpp"
#include "minilab/gateway/registry.hpp"
#include "minilab/hash.hpp"
#include "minilab/metrics/bertscore.hpp"
#include "minilab/metrics/factual.hpp"
#include "minilab/metrics/kpi.hpp"
#include "minilab/metrics/rouge.hpp"
#include "minilab/report/provenance.hpp"
#include "minilab/report/ratios.hpp"
#include "minilab/report/sim_report.hpp"
#include "minilab/report/table.hpp"
#include "minilab/research/fetcher.hpp"
#include "minilab/research/research.hpp"
#include "minilab/server/api.hpp"
#include "minilab/sim/profile.hpp"
#include "minilab/sim/simulator.hpp"
#include "minilab/stats/agreement.hpp"
#include "minilab/stats/ratings.hpp"

namespace minilab::cli {

namespace fs = std::filesystem;
using report::labeled;
using report::Provenance;

namespace {

// Anything thrown while reading flags and input files; maps to exit 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const Error& e) : Error(e.code(), strip(e.what(), e.code()), e.detail()) {}

 private:
  static std::string strip(const std::string& what, const std::string& code) {
    const std::string prefix = code + ": ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
  }
};

template <typename F>
auto configure(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO_ERROR", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json load_json(const std::string& path) {
  return configure([&] { return json_util::load_file(path); });
}

// A JSON array, or one JSON value per non-blank line.
std::vector<Json> load_records(const std::string& path) {
  return configure([&] {
    const std::string text = read_text(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    std::vector<Json> out;
    if (first != std::string::npos && text[first] == '[') {
      for (auto& v : json_util::parse_text(text, path.c_str())) out.push_back(std::move(v));
      return out;
    }
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out.push_back(json_util::parse_text(line, path.c_str()));
    }
    return out;
  });
}

Json computed(double v) { return labeled(v, Provenance::computed); }

void print_json(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string spec;
  std::string profiles;
  std::string profile;
  std::string backends;
  std::string out_dir = "reports";
  std::size_t leads = 200;
  std::size_t campaigns = 1;
  std::uint64_t seed = 42;
  std::size_t jobs = 0;
};

Registry mock_registry(const CampaignSpec& spec) {
  Json backends = Json::array();
  Json prices = Json::object();
  std::set<std::string> seen;
  for (const auto& a : spec.variant_arms) {
    if (!seen.insert(a.backend_name).second) continue;
    backends.push_back({{"name", a.backend_name}, {"base_url", "mock://template"}});
    prices[a.backend_name] = {{"input_price", "0"}, {"output_price", "0"}};
  }
  return parse_registry(Json{{"backends", backends}, {"prices", prices}});
}

std::string campaign_file(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "campaign-%02zu.json", index);
  return buf;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const CampaignSpec spec = configure([&] {
    auto s = json_util::decode<CampaignSpec>(json_util::load_file(a.spec), "campaign spec");
    require_valid(s);
    return s;
  });
  const sim::ProfileMap profiles = configure([&] {
    const auto all = sim::load_profiles(a.profiles);
    return sim::resolve_arm_profiles(spec, all, a.profile.empty() ? std::nullopt : std::optional(a.profile));
  });
  const Registry registry = configure([&] {
    if (a.backends.empty()) {
      err << "note: no --backends file, every arm uses the template mock at zero cost\n";
      return mock_registry(spec);
    }
    return load_registry(a.backends);
  });
  auto gateway = configure([&] { return make_gateway(registry); });
  configure([&] {
    for (const auto& arm : spec.variant_arms) {
      if (!gateway->has_backend(arm.backend_name)) {
        throw Error("UNKNOWN_BACKEND", "arm " + arm.arm_id + " uses unregistered backend " + arm.backend_name);
      }
      if (!registry.prices.count(arm.backend_name)) {
        throw Error("UNKNOWN_BACKEND", "no price for backend " + arm.backend_name);
      }
    }
    if (a.leads == 0) throw Error("INVALID_ARGUMENT", "--leads must be at least 1");
    if (a.campaigns == 0) throw Error("INVALID_ARGUMENT", "--campaigns must be at least 1");
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw Error("IO_ERROR", "cannot create " + a.out_dir + ": " + ec.message());
    return 0;
  });

  // Campaign i gets its own seed, id suffix and lead prefix, so runs are
  // independent of scheduling order.
  auto run_one = [&](std::size_t i) {
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "%02zu", i);
    CampaignSpec s = spec;
    s.id = spec.id + "-" + suffix;
    const std::uint64_t seed = splitmix64(a.seed + i);
    sim::ExperimentOptions opts;
    opts.lead_prefix = "c" + std::string(suffix) + "-lead-";
    const auto result = sim::run_experiment(s, a.leads, profiles, seed, *gateway, registry.prices, opts);
    return report::summarize(result, i, s.id, seed);
  };

  const std::size_t jobs =
      std::max<std::size_t>(1, a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency()));
  std::vector<report::CampaignSummary> runs;
  for (std::size_t next = 1; next <= a.campaigns;) {
    std::vector<std::future<report::CampaignSummary>> batch;
    for (; next <= a.campaigns && batch.size() < jobs; ++next) {
      batch.push_back(std::async(std::launch::async, run_one, next));
    }
    for (auto& f : batch) runs.push_back(f.get());
  }

  for (const auto& r : runs) {
    std::ofstream f(fs::path(a.out_dir) / campaign_file(r.index), std::ios::binary);
    f << report::campaign_report(r).dump(2) << "\n";
    if (!f) throw Error("IO_ERROR", "cannot write " + campaign_file(r.index));
  }
  const Json agg = report::aggregate_report(runs, a.seed);
  {
    std::ofstream f(fs::path(a.out_dir) / "aggregate.json", std::ios::binary);
    f << agg.dump(2) << "\n";
    if (!f) throw Error("IO_ERROR", "cannot write aggregate.json");
  }
  out << report::render_aggregate(agg);
  err << "wrote " << runs.size() << " campaign reports and aggregate.json to " << a.out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string candidate, reference;
  double beta = metrics::kDefaultRougeBeta;
  std::optional<double> baseline;
  std::string output;
  std::vector<std::string> sources;
  std::string verdicts;
  std::string kind;
  std::string input;
  std::string ratings;
  std::string alpha_metric = "interval";
  std::string events;
  std::string ledger;
};

int cmd_rouge(const MetricsArgs& a, std::ostream& out) {
  const std::string cand = configure([&] { return read_text(a.candidate); });
  const std::string ref = configure([&] { return read_text(a.reference); });
  const auto r = metrics::rouge_l_text(cand, ref, a.beta);
  print_json(out, {{"metric", "rouge_l"},
                   {"beta", a.beta},
                   {"lcs", r.lcs},
                   {"precision", computed(r.precision)},
                   {"recall", computed(r.recall)},
                   {"f_measure", computed(r.f_measure)}});
  return kExitOk;
}

int cmd_bertscore(const MetricsArgs& a, std::ostream& out) {
  const auto cand = configure([&] { return metrics::load_embedding_fixture(a.candidate); });
  const auto ref = configure([&] { return metrics::load_embedding_fixture(a.reference); });
  const auto r = metrics::bert_score(cand, ref, a.baseline);
  Json j{{"metric", "bertscore"},
         {"precision", computed(r.precision)},
         {"recall", computed(r.recall)},
         {"f1", computed(r.f1)}};
  if (r.rescaled) {
    j["baseline"] = r.baseline;
    j["rescaled"] = {{"precision", computed(r.rescaled->precision)},
                     {"recall", computed(r.rescaled->recall)},
                     {"f1", computed(r.rescaled->f1)}};
  }
  print_json(out, j);
  return kExitOk;
}

std::vector<metrics::ClaimVerdict> parse_verdicts(const std::string& path) {
  std::vector<metrics::ClaimVerdict> out;
  for (const auto& v : load_records(path)) {
    configure([&] {
      try {
        metrics::ClaimVerdict c;
        c.claim = v.at("claim").get<std::string>();
        c.label = metrics::parse_claim_label(v.at("label").get<std::string>());
        c.source_ref = json_util::get_optional<std::string>(v, "source_ref");
        out.push_back(std::move(c));
      } catch (const nlohmann::json::exception& e) {
        json_util::throw_parse_error("claim verdict", e.what());
      }
      return 0;
    });
  }
  return out;
}

int cmd_factual(const MetricsArgs& a, std::ostream& out) {
  std::vector<metrics::ClaimVerdict> claims;
  if (!a.verdicts.empty()) {
    claims = parse_verdicts(a.verdicts);
  } else {
    if (a.output.empty()) throw ConfigError(Error("INVALID_ARGUMENT", "factual needs --verdicts or --output"));
    const std::string text = configure([&] { return read_text(a.output); });
    std::vector<SourceDocument> docs;
    for (const auto& p : a.sources) {
      docs.push_back({"file://" + fs::absolute(p).string(), {}, configure([&] { return read_text(p); })});
    }
    claims = metrics::extract_claims(text, docs);
  }
  Json list = Json::array();
  std::map<std::string, int> counts{{"supported", 0}, {"contradicted", 0}, {"unverifiable", 0}};
  for (const auto& c : claims) {
    Json item{{"claim", c.claim}, {"label", metrics::to_string(c.label)}};
    json_util::put_optional(item, "source_ref", c.source_ref);
    list.push_back(std::move(item));
    ++counts[metrics::to_string(c.label)];
  }
  const auto acc = metrics::factual_accuracy(claims);
  Json j{{"metric", "factual_accuracy"}, {"claims", list}, {"counts", counts}};
  if (acc) {
    j["accuracy"] = computed(*acc);
  } else {
    j["accuracy"] = nullptr;
    j["status"] = "NOT_APPLICABLE";
  }
  print_json(out, j);
  return kExitOk;
}

std::vector<std::vector<double>> number_rows(const Json& j, const char* key) {
  try {
    return j.at(key).get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    json_util::throw_parse_error(key, e.what());
  }
}

int cmd_stats(const MetricsArgs& a, std::ostream& out) {
  stats::AgreementResult r;
  if (a.kind == "kappa") {
    const Json in = load_json(a.input);
    if (in.contains("matrix")) {
      const auto m = configure([&] { return number_rows(in, "matrix"); });
      r = stats::cohen_kappa(m);
    } else {
      const auto [ra, rb] = configure([&] {
        try {
          return std::pair{in.at("rater_a").get<std::vector<std::string>>(),
                           in.at("rater_b").get<std::vector<std::string>>()};
        } catch (const nlohmann::json::exception& e) {
          json_util::throw_parse_error("kappa input", e.what());
        }
      });
      r = stats::cohen_kappa(ra, rb);
    }
  } else if (a.kind == "alpha") {
    if (!a.ratings.empty()) {
      const auto metric = configure([&] { return stats::parse_alpha_metric(a.alpha_metric); });
      const auto recs = configure([&] { return stats::load_ratings(a.ratings); });
      r = stats::krippendorff_alpha(recs, metric);
    } else {
      const Json in = load_json(a.input);
      const auto metric = configure([&] { return stats::parse_alpha_metric(in.value("metric", a.alpha_metric)); });
      const auto units = configure([&] { return number_rows(in, "units"); });
      r = stats::krippendorff_alpha(units, metric);
    }
  } else if (a.kind == "pearson") {
    const Json in = load_json(a.input);
    const auto [x, y] = configure([&] {
      try {
        return std::pair{in.at("x").get<std::vector<double>>(), in.at("y").get<std::vector<double>>()};
      } catch (const nlohmann::json::exception& e) {
        json_util::throw_parse_error("pearson input", e.what());
      }
    });
    r = stats::pearson_r(x, y);
  } else {
    throw ConfigError(Error("INVALID_ARGUMENT", "--kind must be kappa, alpha or pearson"));
  }
  Json j{{"metric", stats::to_string(r.statistic)}, {"value", computed(r.value)}};
  if (!r.variant.empty()) j["variant"] = r.variant;
  print_json(out, j);
  return kExitOk;
}

int cmd_relevance(const MetricsArgs& a, std::ostream& out) {
  const auto recs = configure([&] { return stats::load_ratings(a.ratings); });
  Json items = Json::object();
  for (const auto& [item, pct] : stats::relevance_by_item(recs)) items[item] = computed(pct);
  print_json(out, {{"metric", "human_relevance"}, {"items", items}});
  return kExitOk;
}

int cmd_kpi(const MetricsArgs& a, std::ostream& out) {
  std::vector<EngagementEvent> events;
  for (const auto& r : load_records(a.events)) {
    events.push_back(configure([&] { return json_util::decode<EngagementEvent>(r, "event"); }));
  }
  print_json(out, {{"metric", "kpi"}, {"kpi", report::kpi_json(metrics::kpi_rates(events))}});
  return kExitOk;
}

int cmd_cost(const MetricsArgs& a, std::ostream& out) {
  const auto ledger = configure([&] { return load_ledger_file(a.ledger); });
  const auto costs = ledger_per_lead(ledger.entries, ledger.prices);
  auto money = [](const Money& m) { return labeled(m.to_string(), Provenance::computed); };
  Json per_lead = Json::object();
  for (const auto& [lead, m] : costs.per_lead) per_lead[lead] = money(m);
  print_json(out, {{"metric", "cost"},
                   {"per_lead", per_lead},
                   {"mean_per_lead", costs.mean ? money(*costs.mean) : Json(nullptr)},
                   {"unattributed", money(costs.unattributed)},
                   {"total", money(costs.total)}});
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string fixtures;
  std::string baseline;
  std::string compare;
  std::string format = "markdown";
  std::string computed;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const auto table = configure([&] { return report::load_fixture(a.fixtures); });
  const std::optional<Json> agg = a.computed.empty() ? std::nullopt : std::optional(load_json(a.computed));
  auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional(s); };
  configure([&] {
    for (const auto& name : {a.baseline, a.compare}) {
      if (!name.empty() && !report::find_row(table, name)) throw Error("UNKNOWN_MODEL", "no row named " + name);
    }
    return 0;
  });
  if (a.format == "json") {
    Json j = report::report_json(table, opt(a.baseline), opt(a.compare));
    if (agg) j = Json{{"fixture", j}, {"computed", *agg}};
    print_json(out, j);
  } else {
    out << report::render_report(table, opt(a.baseline), opt(a.compare));
    if (agg) out << "\n" << report::render_aggregate(*agg);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- serve

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string state_dir = "state";
  std::string backends;
  std::string ui_dir;
  std::string corpus_dir;
  std::string research_backend;
};

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  const Registry registry = configure([&] { return load_registry(a.backends); });
  auto gateway = configure([&] { return make_gateway(registry); });
  configure([&] {
    std::error_code ec;
    fs::create_directories(a.state_dir, ec);
    if (ec) throw Error("IO_ERROR", "cannot create " + a.state_dir + ": " + ec.message());
    if (!a.ui_dir.empty() && !fs::is_directory(a.ui_dir)) throw Error("IO_ERROR", "no such directory " + a.ui_dir);
    return 0;
  });

  std::unique_ptr<Fetcher> fetcher;
  if (a.corpus_dir.empty()) {
    fetcher = std::make_unique<HttpFetcher>();
  } else {
    fetcher = std::make_unique<CorpusFetcher>(a.corpus_dir);
  }
  ResearchProvider research(*fetcher, *gateway, ResearchConfig{a.research_backend});

  engine::CampaignService campaigns(*gateway, {a.state_dir, &research});
  curation::CurationStore curation(*gateway, {(fs::path(a.state_dir) / "curation.jsonl").string()});
  const std::size_t n_campaigns = configure([&] { return campaigns.load(); });
  const std::size_t n_records = configure([&] { return curation.load(); });

  server::ApiRouter router({&campaigns, &curation, &registry.prices, {}});
  server::HttpServer http(router, a.ui_dir);
  const int port = configure([&] { return http.bind(a.host, a.port); });
  out << "listening on http://" << a.host << ":" << port << " (" << n_campaigns << " campaigns, " << n_records
      << " curation records restored)" << std::endl;

  g_stop.store(false);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done.load()) {
      if (g_stop.load()) {
        http.stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  });
  http.listen();
  done.store(true);
  watcher.join();
  err << "stopped\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"minilab: outreach campaign engine, simulator and evaluation tools", "minilab"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run simulated campaigns and write KPI/cost reports");
  simulate->add_option("--spec", sim_args.spec, "Campaign spec (JSON)")->required();
  simulate->add_option("--profiles", sim_args.profiles, "Behaviour profiles (JSON)")->required();
  simulate->add_option("--profile", sim_args.profile, "Profile for arms without one of their own");
  simulate->add_option("--backends", sim_args.backends, "Backend registry with prices (JSON)");
  simulate->add_option("--leads", sim_args.leads, "Leads per campaign")->capture_default_str();
  simulate->add_option("--campaigns", sim_args.campaigns, "Number of campaigns")->capture_default_str();
  simulate->add_option("--seed", sim_args.seed, "Base seed")->capture_default_str();
  simulate->add_option("--out", sim_args.out_dir, "Report directory")->capture_default_str();
  simulate->add_option("--jobs", sim_args.jobs, "Campaigns run in parallel (0 = cores)");

  MetricsArgs m;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compute one evaluation metric, JSON to stdout");
  metrics_cmd->require_subcommand(1);
  auto* rouge = metrics_cmd->add_subcommand("rouge", "ROUGE-L between two text files");
  rouge->add_option("--candidate", m.candidate)->required();
  rouge->add_option("--reference", m.reference)->required();
  rouge->add_option("--beta", m.beta)->capture_default_str();
  auto* bert = metrics_cmd->add_subcommand("bertscore", "BERTScore from embedding fixture files");
  bert->add_option("--candidate", m.candidate)->required();
  bert->add_option("--reference", m.reference)->required();
  bert->add_option("--baseline", m.baseline, "Rescale against this baseline");
  auto* factual = metrics_cmd->add_subcommand("factual", "Factual accuracy of a generated summary");
  factual->add_option("--verdicts", m.verdicts, "Labelled claims (JSON array or JSONL)");
  factual->add_option("--output", m.output, "Generated text to extract claims from");
  factual->add_option("--source", m.sources, "Source text file (repeatable)");
  auto* stats_cmd = metrics_cmd->add_subcommand("stats", "Agreement statistics");
  stats_cmd->add_option("--kind", m.kind)->required()->check(CLI::IsMember({"kappa", "alpha", "pearson"}));
  stats_cmd->add_option("--input", m.input, "JSON input");
  stats_cmd->add_option("--ratings", m.ratings, "item,rater,rating records (alpha)");
  stats_cmd->add_option("--metric", m.alpha_metric, "nominal or interval (alpha)")->capture_default_str();
  auto* relevance = metrics_cmd->add_subcommand("relevance", "Mean rating per item as a percentage");
  relevance->add_option("--ratings", m.ratings)->required();
  auto* kpi = metrics_cmd->add_subcommand("kpi", "Engagement rates from an event file");
  kpi->add_option("--events", m.events)->required();
  auto* cost = metrics_cmd->add_subcommand("cost", "Per-lead cost from a usage ledger");
  cost->add_option("--ledger", m.ledger)->required();

  ReportArgs r;
  auto* report_cmd = app.add_subcommand("report", "Render a results table with ratio analysis");
  report_cmd->add_option("--fixtures", r.fixtures, "Table fixture (JSON)")->required();
  report_cmd->add_option("--baseline", r.baseline, "Baseline model row");
  report_cmd->add_option("--compare", r.compare, "Model row for the headline cost ratio");
  report_cmd->add_option("--format", r.format)->check(CLI::IsMember({"markdown", "json"}))->capture_default_str();
  report_cmd->add_option("--computed", r.computed, "aggregate.json from simulate, shown separately");

  ServeArgs s;
  auto* serve = app.add_subcommand("serve", "Run the campaign and curation HTTP API");
  serve->add_option("--host", s.host)->capture_default_str();
  serve->add_option("--port", s.port, "0 picks a free port")->capture_default_str();
  serve->add_option("--state-dir", s.state_dir)->capture_default_str();
  serve->add_option("--backends", s.backends, "Backend registry (JSON)")->required();
  serve->add_option("--ui-dir", s.ui_dir, "Static files served under /ui");
  serve->add_option("--corpus-dir", s.corpus_dir, "Answer research fetches from a local page corpus");
  serve->add_option("--research-backend", s.research_backend, "Summariser backend (default: the lead's arm)");

  std::vector<std::string> storage{"minilab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim_args, out, err);
    if (metrics_cmd->parsed()) {
      if (rouge->parsed()) return cmd_rouge(m, out);
      if (bert->parsed()) return cmd_bertscore(m, out);
      if (factual->parsed()) return cmd_factual(m, out);
      if (stats_cmd->parsed()) {
        if (m.input.empty() && m.ratings.empty()) {
          throw ConfigError(Error("INVALID_ARGUMENT", "stats needs --input or --ratings"));
        }
        return cmd_stats(m, out);
      }
      if (relevance->parsed()) return cmd_relevance(m, out);
      if (kpi->parsed()) return cmd_kpi(m, out);
      if (cost->parsed()) return cmd_cost(m, out);
    }
    if (report_cmd->parsed()) return cmd_report(r, out);
    if (serve->parsed()) return cmd_serve(s, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace minilab::cli

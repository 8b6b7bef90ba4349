#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "minilab/research/fetcher.hpp"
#include "minilab/research/research.hpp"
#include "support/fakes.hpp"

using namespace minilab;
using testing_support::error_code_of;
using testing_support::FakeClient;

namespace {

const std::string kAbout = "https://acme.example/about";
const std::string kNews = "https://acme.example/news";
const std::string kBlank = "https://blank.example/";
const std::string kMissing = "https://acme.example/missing";

std::string corpus() { return testing_support::data_path("corpus"); }

std::string read(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string fnv_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Wraps another fetcher; records calls and peak concurrency.
class RecordingFetcher : public Fetcher {
 public:
  explicit RecordingFetcher(Fetcher& inner, int delay_ms = 0) : inner_(inner), delay_ms_(delay_ms) {}
  SourceDocument fetch(const std::string& url, Instant now) override {
    const int n = ++in_flight_;
    int seen = peak_.load();
    while (n > seen && !peak_.compare_exchange_weak(seen, n)) {
    }
    {
      std::lock_guard lock(mu_);
      fetched_.push_back(url);
    }
    if (delay_ms_) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
    struct Done {
      std::atomic<int>& c;
      ~Done() { --c; }
    } done{in_flight_};
    return inner_.fetch(url, now);
  }
  std::vector<std::string> fetched() const {
    std::lock_guard lock(mu_);
    return fetched_;
  }
  int peak() const { return peak_.load(); }

 private:
  Fetcher& inner_;
  int delay_ms_;
  mutable std::mutex mu_;
  std::vector<std::string> fetched_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
};

Lead lead() { return {"lead-1", {{"name", "Ada"}, {"company", "Acme"}, {"domain", "acme.example"}}, "A"}; }

}  // namespace

TEST(Fetcher, CorpusKeyIsFnv1a64Hex) {
  for (const auto& u : {kAbout, kNews, std::string("file:///tmp/x.html"), std::string("")}) {
    EXPECT_EQ(corpus_key(u), fnv_hex(u));
  }
}

TEST(Fetcher, UrlValidation) {
  EXPECT_TRUE(is_valid_url("https://a.b/c"));
  EXPECT_TRUE(is_valid_url("file:///tmp/x"));
  EXPECT_FALSE(is_valid_url("https://"));
  EXPECT_FALSE(is_valid_url("gopher://x"));
  EXPECT_FALSE(is_valid_url("no scheme"));
}

TEST(Fetcher, StripMarkup) {
  EXPECT_EQ(strip_markup("<p>a&amp;b</p>  <!-- c --> <script>x<y</script><b>d</b>"), "a&b d");
  EXPECT_EQ(strip_markup("<style>p{}</style>\n\n<i>&lt;tag&gt;</i>&nbsp;&quot;q&quot;"), "<tag> \"q\"");
  EXPECT_EQ(strip_markup("<div><span></span></div>"), "");
}

TEST(Fetcher, CorpusPageMatchesStoredExtraction) {
  CorpusFetcher f(corpus());
  for (const auto& url : {kAbout, kNews}) {
    const auto doc = f.fetch(url, at_seconds(10));
    EXPECT_EQ(doc.text, read(corpus() + "/" + corpus_key(url) + ".txt")) << url;
    EXPECT_EQ(doc.url, url);
    EXPECT_EQ(doc.fetched_at, at_seconds(10));
  }
}

TEST(Fetcher, PureMarkupIsEmptyExtraction) {
  CorpusFetcher f(corpus());
  EXPECT_EQ(error_code_of([&] { f.fetch(kBlank, {}); }), "EMPTY_EXTRACTION");
}

TEST(Fetcher, MissingCorpusPageIs404) {
  CorpusFetcher f(corpus());
  try {
    f.fetch(kMissing, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "FETCH_FAILED");
    EXPECT_EQ(e.detail(), 404);
  }
  EXPECT_EQ(error_code_of([&] { f.fetch("::bad", {}); }), "INVALID_URL");
}

TEST(Fetcher, HttpFetcherReadsFilesAndServers) {
  HttpFetcher f(std::chrono::seconds(2));
  const auto doc = f.fetch("file://" + corpus() + "/" + corpus_key(kAbout) + ".html", {});
  EXPECT_EQ(doc.text, read(corpus() + "/" + corpus_key(kAbout) + ".txt"));

  httplib::Server server;
  server.Get("/page", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("<h1>Hello</h1><p>world</p>", "text/html");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  EXPECT_EQ(f.fetch(base + "/page", {}).text, "Hello world");
  try {
    f.fetch(base + "/nothing", {});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "FETCH_FAILED");
    EXPECT_EQ(e.detail(), 404);
  }
  server.stop();
  t.join();
}

TEST(Research, TwoSourcesAndFixedSummary) {
  CorpusFetcher f(corpus());
  FakeClient client("Acme raised $12M in 2021.");
  ResearchProvider rp(f, client, {"summariser"});
  const std::vector<std::string> goals{"funding", "headcount"};
  const std::vector<std::string> urls{kAbout, kNews};
  const auto d = rp.research_lead(lead(), goals, urls, at_seconds(5));
  EXPECT_EQ(d.summary, "Acme raised $12M in 2021.");
  ASSERT_EQ(d.sources.size(), 2u);
  EXPECT_EQ(d.sources[0].url, kAbout);
  EXPECT_EQ(d.sources[1].url, kNews);
  EXPECT_EQ(d.model_backend, "summariser");
  EXPECT_EQ(d.usage.timestamp, at_seconds(5));
  EXPECT_GT(d.usage.prompt_tokens, 0);

  // The prompt carries every goal and every source text.
  const auto req = client.requests().at(0);
  std::string all;
  for (const auto& m : req.messages) all += m.content;
  for (const auto& g : goals) EXPECT_NE(all.find(g), std::string::npos);
  for (const auto& s : d.sources) EXPECT_NE(all.find(s.text), std::string::npos);
  EXPECT_EQ(req.tag.lead_id, "lead-1");
  EXPECT_EQ(req.tag.purpose, UsagePurpose::research);
}

TEST(Research, SurvivesOneFailedSource) {
  CorpusFetcher f(corpus());
  FakeClient client("summary");
  ResearchProvider rp(f, client, {"s"});
  const std::vector<std::string> urls{kMissing, kNews};
  const auto out = rp.research(lead(), {}, urls, {});
  ASSERT_EQ(out.dossier.sources.size(), 1u);
  EXPECT_EQ(out.dossier.sources[0].url, kNews);
  ASSERT_EQ(out.failures.size(), 1u);
  EXPECT_EQ(out.failures[0].url, kMissing);
  EXPECT_EQ(out.failures[0].code, "FETCH_FAILED");
  EXPECT_EQ(out.failures[0].status, 404);
}

TEST(Research, AllSourcesFail) {
  CorpusFetcher f(corpus());
  FakeClient client("summary");
  ResearchProvider rp(f, client, {"s"});
  const std::vector<std::string> urls{kMissing, kBlank};
  EXPECT_EQ(error_code_of([&] { rp.research_lead(lead(), {}, urls, {}); }), "NO_SOURCES");
  EXPECT_EQ(client.calls(), 0);
}

TEST(Research, ProvenanceClosureAndDeterminism) {
  CorpusFetcher inner(corpus());
  RecordingFetcher f(inner);
  FakeClient client("same");
  ResearchProvider rp(f, client, {"s"});
  const std::vector<std::string> urls{kAbout, kMissing, kNews, kAbout, kBlank};
  const auto first = rp.research_lead(lead(), {}, urls, at_seconds(1));
  const auto fetched = f.fetched();
  for (const auto& s : first.sources) {
    EXPECT_EQ(std::count(fetched.begin(), fetched.end(), s.url), 1) << s.url;
  }
  // Duplicate URLs are fetched once.
  EXPECT_EQ(fetched.size(), 4u);
  EXPECT_EQ(rp.research_lead(lead(), {}, urls, at_seconds(1)), first);
}

TEST(Research, FetchConcurrencyIsBounded) {
  testing_support::TempDir dir;
  std::vector<std::string> urls;
  for (int i = 0; i < 12; ++i) {
    const std::string url = "https://site.example/p" + std::to_string(i);
    std::ofstream(dir.path() / (corpus_key(url) + ".html")) << "<p>page " << i << "</p>";
    urls.push_back(url);
  }
  CorpusFetcher inner(dir.path());
  RecordingFetcher f(inner, 20);
  FakeClient client("s");
  ResearchConfig cfg{"s"};
  cfg.max_parallel_fetches = 3;
  ResearchProvider rp(f, client, cfg);
  const auto d = rp.research_lead(lead(), {}, urls, {});
  EXPECT_EQ(d.sources.size(), 12u);
  EXPECT_LE(f.peak(), 3);
  EXPECT_GE(f.peak(), 2);
  // Order follows the URL list regardless of completion order.
  for (std::size_t i = 0; i < urls.size(); ++i) EXPECT_EQ(d.sources[i].url, urls[i]);
}

TEST(Research, DossierIsCappedWithoutSplittingUtf8) {
  CorpusFetcher f(corpus());
  std::string long_text;
  for (int i = 0; i < 3000; ++i) long_text += "é";  // 6000 bytes
  FakeClient client(long_text);
  ResearchConfig cfg{"s"};
  cfg.max_dossier_tokens = 1001;  // 4004 bytes, odd so the cut lands mid-character
  ResearchProvider rp(f, client, cfg);
  const std::vector<std::string> urls{kAbout};
  const auto d = rp.research_lead(lead(), {}, urls, {});
  EXPECT_EQ(d.summary.size(), 4004u);
  EXPECT_EQ(truncate_utf8("aé", 2), "a");
  EXPECT_EQ(truncate_utf8("abc", 10), "abc");
}

TEST(Research, UrlTemplatesExpandFromProfile) {
  Lead l = lead();
  l.profile["profile_url"] = "https://linkedin.example/in/ada";
  const std::vector<std::string> templates{"https://{domain}/about", "https://{missing}/x", "https://news.example/?q={company}"};
  EXPECT_EQ(research_urls_for(l, templates),
            (std::vector<std::string>{"https://linkedin.example/in/ada", "https://acme.example/about",
                                      "https://news.example/?q=Acme"}));
}

TEST(Research, NeedsABackend) {
  CorpusFetcher f(corpus());
  FakeClient client("x");
  ResearchProvider rp(f, client, {});
  const std::vector<std::string> urls{kAbout};
  EXPECT_EQ(error_code_of([&] { rp.research_lead(lead(), {}, urls, {}); }), "UNKNOWN_BACKEND");
  EXPECT_EQ(rp.research_lead(lead(), {}, urls, {}, "override").model_backend, "override");
}

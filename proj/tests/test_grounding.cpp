#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "bpl/artifacts.hpp"
#include "bpl/hybrid.hpp"
#include "bpl/synthetic.hpp"
// after the Eigen-using headers
#include "bpl/http_client.hpp"

using Catch::Approx;
using namespace bpl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "bpl_tests";
  fs::create_directories(dir);
  const auto p = dir / name;
  fs::remove(p);
  return p;
}

PromptTemplates templates() { return PromptTemplates::load(default_data_path("prompts")); }

StubClient stub(std::uint64_t seed, ResponseCache* cache = nullptr) {
  return StubClient(seed, templates(), load_stub_recall_corpus(default_data_path("stub_recall_corpus.tsv")), cache);
}

Claim claim(const std::string& id, const std::string& text, int label = 1) {
  Claim c;
  c.id = id;
  c.text = text;
  c.speaker = "a-speaker";
  c.topic = "economy";
  c.raw_label = label ? "true" : "false";
  c.label = *map_liar_label(c.raw_label);
  return c;
}

}  // namespace

// ----------------------------------------------------------------- values

TEST_CASE("phi_from_salience sums the four ratings", "[grounding]") {
  CHECK(phi_from_salience({0, 0, 0, 0}) == 1.0);
  CHECK(phi_from_salience({1, 1, 1, 1}) == 5.0);
  CHECK(phi_from_salience({0.5, 0.5, 0, 0}) == 2.0);
}

TEST_CASE("schema_prior scales compression by confidence", "[grounding]") {
  const auto full = schema_prior({"s", 0.8, 1.0}, 1.0);
  CHECK(full.p_true == compress_prior(0.8, 1.0, 1.0).p_true);
  CHECK(full.p_true == Approx(0.65).margin(1e-15));
  const auto none = schema_prior({"s", 0.8, 0.0}, 1.0);
  CHECK(none.p_true == Approx(compress_prior(0.8, 0.01, 1.0).p_true).margin(1e-15));
  CHECK(std::abs(none.p_true - 0.5) < 0.01);
  for (double conf : {0.0, 0.3, 1.0}) CHECK(schema_prior({"s", 0.5, conf}, 2.0).p_true == 0.5);
}

TEST_CASE("strict parsing rejects instead of repairing", "[grounding]") {
  CHECK(parse_salience(R"({"emotional_intensity":0.1,"novelty":0.2,"memorability":0.3,"sharability":0.4})") ==
        SalienceProfile{0.1, 0.2, 0.3, 0.4});
  CHECK_THROWS_AS(parse_salience(R"({"emotional_intensity":0.1,"novelty":0.2,"memorability":0.3})"),
                  MalformedResponse);
  CHECK_THROWS_AS(parse_salience(R"({"emotional_intensity":"high","novelty":0,"memorability":0,"sharability":0})"),
                  MalformedResponse);
  CHECK_THROWS_AS(parse_salience("Sure! Here are the ratings."), MalformedResponse);

  const std::string bad = R"({"schema":"Politicians exaggerate.","p_true":1.7,"confidence":0.5})";
  try {
    parse_schema(bad);
    FAIL("p_true 1.7 accepted");
  } catch (const MalformedResponse& e) {
    CHECK(e.raw() == bad);
    CHECK(std::string(e.what()).find("p_true") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_schema(R"({"schema":"  ","p_true":0.5,"confidence":0.5})"), MalformedResponse);
  CHECK(parse_plausibility(R"({"plausibility":0.25})") == 0.25);
  CHECK_THROWS_AS(parse_plausibility(R"({"plausibility":-0.1})"), MalformedResponse);
}

TEST_CASE("recall parsing enforces cardinality and labels", "[grounding]") {
  const std::string item =
      R"({"text":"x","veracity":"false","salience":{"emotional_intensity":0,"novelty":0,"memorability":0,"sharability":0}})";
  const std::string two = "{\"items\":[" + item + "," + item + "]}";
  CHECK(parse_recall(two, 2).size() == 2);
  CHECK(parse_recall(two, 2)[0].veracity == 0);
  CHECK_THROWS_WITH(parse_recall(two, 3), Catch::Matchers::ContainsSubstring("expected 3 recall items, got 2"));
  std::string maybe = two;
  maybe.replace(maybe.find("false"), 5, "maybe");
  CHECK_THROWS_AS(parse_recall(maybe, 2), MalformedResponse);
}

TEST_CASE("render_template fills known placeholders only", "[grounding]") {
  CHECK(render_template("{claim} by {source} {unknown}", {{"claim", "X"}, {"source", "Y"}}) == "X by Y {unknown}");
  const auto t = templates();
  for (const auto* s : {&t.salience, &t.schema, &t.recall, &t.plausibility}) CHECK_FALSE(s->empty());
  CHECK(t.recall.find("{n}") != std::string::npos);
}

// ----------------------------------------------------------------- stub

TEST_CASE("stub client is deterministic and in range", "[grounding][property]") {
  auto a = stub(7), b = stub(7), other = stub(8);
  const auto c = claim("c1", "A shocking scandal in the state budget");
  CHECK(a.rate_salience(c) == b.rate_salience(c));
  CHECK(a.simulate_recall(c, 3) == b.simulate_recall(c, 3));
  CHECK(a.make_schema("x", "economy") == b.make_schema("x", "economy"));
  CHECK(a.plausibility(c) == b.plausibility(c));
  CHECK_FALSE(a.rate_salience(c) == other.rate_salience(c));

  for (int i = 0; i < 50; ++i) {
    const auto ci = claim("c" + std::to_string(i), "claim number " + std::to_string(i) + " about fraud and jobs");
    const auto s = a.rate_salience(ci);
    for (double v : {s.emotional_intensity, s.novelty, s.memorability, s.sharability}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    const double p = a.plausibility(ci);
    CHECK((p >= 0.0 && p <= 1.0));
    const auto sc = a.make_schema("speaker-" + std::to_string(i), "taxes");
    CHECK((sc.p_true >= 0.0 && sc.p_true <= 1.0 && sc.confidence >= 0.0 && sc.confidence <= 1.0));
    CHECK_FALSE(sc.text.empty());
  }
  const auto rec = a.simulate_recall(c, 3);
  REQUIRE(rec.size() == 3);
  for (const auto& r : rec) CHECK((r.veracity == 0 || r.veracity == 1));
}

TEST_CASE("stub salience tracks lexicon valence", "[grounding][property]") {
  synth::LiarOptions lo;
  lo.n = 400;
  lo.seed = 3;
  lo.salience_rate = 0.3;
  auto client = stub(42);
  std::vector<double> phi, val;
  const auto lex = ValenceLexicon::defaults();
  for (const auto& c : synth::liar_claims(lo)) {
    phi.push_back(phi_from_salience(client.rate_salience(c)));
    val.push_back(valence(c.text, lex));
  }
  CHECK(pearson_r(phi, val) > 0.2);
}

// ----------------------------------------------------------------- cache

TEST_CASE("response cache round trip bypasses the backend", "[grounding]") {
  const auto path = scratch("cache.jsonl").string();
  const auto c = claim("c1", "Officials hid a crisis");
  SalienceProfile first;
  std::vector<RecalledClaim> recalled;
  {
    ResponseCache cache(path);
    auto client = stub(5, &cache);
    first = client.rate_salience(c);
    recalled = client.simulate_recall(c, 4);
    client.rate_salience(c);
    CHECK(client.backend_calls() == 2);
    CHECK(cache.size() == 2);
  }
  std::ifstream in(path);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* k : {"key", "operation", "request", "raw", "parsed", "timestamp"}) CHECK(j.contains(k));
    ++lines;
  }
  CHECK(lines == 2);

  ResponseCache reloaded(path);
  auto client = stub(5, &reloaded);
  CHECK(client.rate_salience(c) == first);
  CHECK(client.simulate_recall(c, 4) == recalled);
  CHECK(client.backend_calls() == 0);
  // Another backend sharing the file gets its own entries.
  auto other_seed = stub(6, &reloaded);
  other_seed.rate_salience(c);
  CHECK(other_seed.backend_calls() == 1);
  CHECK(reloaded.size() == 3);
}

TEST_CASE("corrupt cache lines are reported with their line number", "[grounding]") {
  const auto path = scratch("bad_cache.jsonl").string();
  std::ofstream(path) << "{not json}\n";
  CHECK_THROWS_WITH(ResponseCache(path), Catch::Matchers::ContainsSubstring("line 1"));
}

// ----------------------------------------------------------------- http

TEST_CASE("http client against a local endpoint", "[grounding][http]") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::atomic<int> fail_first{0};  // requests to answer with 429 before succeeding
  std::string content;
  std::mutex content_mutex;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    if (fail_first > 0) {
      --fail_first;
      res.status = 429;
      return;
    }
    const auto body = nlohmann::json::parse(req.body);
    if (body.value("model", "") != "test-model" || body.at("messages").at(0).at("content").get<std::string>().empty()) {
      res.status = 400;
      return;
    }
    std::lock_guard<std::mutex> lock(content_mutex);
    res.set_content(nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump(),
                    "application/json");
  });
  server.Post("/broken", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 503;
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  cfg.model = "test-model";
  cfg.backoff_ms = 1;
  cfg.max_retries = 2;
  const auto set = [&](std::string s) {
    std::lock_guard<std::mutex> lock(content_mutex);
    content = std::move(s);
  };
  const auto c = claim("h1", "The budget grew");

  SECTION("valid answers are parsed and cached") {
    ResponseCache cache;
    HttpClient client(cfg, templates(), &cache);
    set(R"({"emotional_intensity":0.2,"novelty":0.4,"memorability":0.6,"sharability":0.8})");
    CHECK(client.rate_salience(c) == SalienceProfile{0.2, 0.4, 0.6, 0.8});
    const int before = hits;
    CHECK(client.rate_salience(c) == SalienceProfile{0.2, 0.4, 0.6, 0.8});
    CHECK(hits == before);
  }
  SECTION("out-of-range numbers surface as MalformedResponse") {
    HttpClient client(cfg, templates());
    set(R"({"schema":"Speakers overstate.","p_true":1.7,"confidence":0.4})");
    CHECK_THROWS_AS(client.make_schema("s", "t"), MalformedResponse);
  }
  SECTION("short recall lists are rejected, never padded") {
    ResponseCache cache;
    HttpClient client(cfg, templates(), &cache);
    set(R"({"items":[{"text":"a","veracity":"true","salience":{"emotional_intensity":0,"novelty":0,"memorability":0,"sharability":0}},
                     {"text":"b","veracity":"false","salience":{"emotional_intensity":0,"novelty":0,"memorability":0,"sharability":0}}]})");
    CHECK_THROWS_WITH(client.simulate_recall(c, 3), Catch::Matchers::ContainsSubstring("expected 3 recall items, got 2"));
    CHECK(cache.size() == 0);
  }
  SECTION("rate limits are retried with backoff") {
    HttpClient client(cfg, templates());
    set(R"({"plausibility":0.3})");
    fail_first = 2;
    CHECK(client.plausibility(c) == 0.3);
    CHECK(client.attempts() == 3);
  }
  SECTION("exhausted retries raise the last error") {
    HttpClient client(cfg, templates());
    fail_first = 10;
    CHECK_THROWS_AS(client.plausibility(c), RateLimited);
    CHECK(client.attempts() == 3);
    auto broken = cfg;
    broken.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/broken";
    HttpClient b(broken, templates());
    CHECK_THROWS_AS(b.plausibility(c), TransportError);
    CHECK(b.attempts() == 3);
  }
  server.stop();
  worker.join();
}

TEST_CASE("http client reports unreachable endpoints as transport errors", "[grounding][http]") {
  HttpConfig cfg;
  cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  cfg.model = "m";
  cfg.max_retries = 0;
  cfg.timeout_seconds = 2;
  HttpClient client(cfg, templates());
  CHECK_THROWS_AS(client.plausibility(claim("x", "y")), TransportError);
  CHECK_THROWS_AS(HttpClient(HttpConfig{}, templates()), ParameterError);
}

// ----------------------------------------------------------------- hybrid

TEST_CASE("hybrid and feature modes share the chain structure", "[hybrid][property]") {
  auto client = stub(11);
  FeatureConfig fc;
  for (const auto& text : {"Budget grew", "The mayor says officials believe taxes rose", "A senator claims jobs fell"}) {
    const auto c = claim("t", text);
    const auto f = extract_features(c, fc);
    for (int k = 0; k <= 2; ++k) {
      AgentProfile a;
      a.k = k;
      a.sample_size = 3;
      a.seed = 99;
      const auto h = hybrid_posterior(f, client.make_schema("s", "economy"), client.plausibility(c),
                                      client.simulate_recall(c, 3), c.id, a);
      ChainInputs in;
      in.features = f;
      const auto feat = bpl_posterior(in, a, RecallSampler(std::vector<RecallItem>{{"r", 1, 1.0, "r"}}));
      REQUIRE(h.depth_trace.size() == feat.depth_trace.size());
      for (std::size_t i = 0; i < h.depth_trace.size(); ++i) CHECK(h.depth_trace[i].level == feat.depth_trace[i].level);
      CHECK(h.effective_k == feat.effective_k);
    }
  }
}

TEST_CASE("validate_hybrid is reproducible and reports both pipelines", "[hybrid]") {
  synth::LiarOptions lo;
  lo.n = 300;
  lo.seed = 4;
  lo.salience_rate = 0.3;
  const auto p = prepare(synth::liar_claims(lo), FeatureConfig{});
  std::vector<std::size_t> sample;
  for (std::size_t i = 0; i < 40; ++i) sample.push_back(i * 7);
  AgentProfile a;
  a.k = 1;
  a.sample_size = 3;
  auto c1 = stub(42), c2 = stub(42);
  RunOptions one, three;
  three.threads = 3;
  const auto r1 = validate_hybrid(p, sample, c1, a, one);
  const auto r3 = validate_hybrid(p, sample, c2, a, three);
  CHECK(nlohmann::json(r1).dump() == nlohmann::json(r3).dump());
  CHECK(nlohmann::json(r1.claims).dump() == nlohmann::json(r3.claims).dump());
  REQUIRE(r1.models.size() == 2);
  CHECK(r1.models[0].pipeline == "hybrid");
  CHECK(r1.models[1].pipeline == "feature");
  REQUIRE(r1.diagnostics.size() == 3);
  for (const auto& h : r1.claims) CHECK(h.recalled.size() == 3);
  CHECK(validation_tables(r1).find("Component diagnostics") != std::string::npos);
}

// ----------------------------------------------------------------- config and artifacts

TEST_CASE("INI configuration loads and validates", "[config]") {
  const auto path = scratch("run.ini").string();
  std::ofstream(path) << "[run]\nseed = 7\nsample = 100\n[bpl]\nk = 2\nbeta = 0.2\nN = 5\ndepth_cap = true\n"
                         "[grounding]\nmode = stub\n";
  RunConfig c;
  load_ini(path, c);
  CHECK(c.seed == 7);
  CHECK(c.sample == std::optional<std::size_t>(100));
  CHECK(c.k == 2);
  CHECK(c.beta == 0.2);
  CHECK(c.sample_size == 5);
  CHECK(c.depth_cap);
  CHECK(c.mode == "stub");
  CHECK_NOTHROW(validate(c));
  c.mode = "oracle";
  CHECK_THROWS_AS(validate(c), ParameterError);

  std::ofstream(path) << "[bpl]\nbeta = lots\n";
  RunConfig bad;
  CHECK_THROWS_AS(load_ini(path, bad), ParameterError);
  load_ini(default_data_path("bpl.ini"), bad);
  CHECK_NOTHROW(validate(bad));
}

TEST_CASE("metadata headers and corpus files round trip", "[config]") {
  RunConfig c;
  const std::vector<Claim> claims = {claim("a", "one"), claim("b", "two", 0)};
  const auto meta = make_metadata("corpus", c, dataset_hash(claims));
  RunConfig threaded = c;
  threaded.threads = 8;
  CHECK(make_metadata("corpus", threaded, meta.dataset_hash).config_hash == meta.config_hash);
  RunConfig reseeded = c;
  reseeded.seed = 1;
  CHECK(make_metadata("corpus", reseeded, meta.dataset_hash).config_hash != meta.config_hash);

  const auto path = scratch("corpus.jsonl").string();
  write_jsonl(path, meta, std::vector<nlohmann::json>(claims.begin(), claims.end()));
  const auto file = read_jsonl(path);
  REQUIRE(file.meta);
  CHECK(file.meta->config_hash == meta.config_hash);
  CHECK(file.meta->dataset_hash == meta.dataset_hash);
  CHECK(read_corpus(path) == claims);
  CHECK(dataset_hash(read_corpus(path)) == meta.dataset_hash);
  CHECK_THROWS_AS(read_corpus(scratch("missing.jsonl").string()), IoError);
  CHECK(csv_header(meta).rfind("# artifact: corpus\n", 0) == 0);
}

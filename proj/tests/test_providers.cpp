#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "veridict/providers.hpp"

using namespace veridict;
using namespace veridict::providers;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> seq{0};
        path = fs::temp_directory_path() /
               ("veridict-test-" + std::to_string(::getpid()) + "-" + std::to_string(seq++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct StubServer {
    httplib::Server svr;
    std::thread th;
    int port = 0;

    void start() {
        port = svr.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        th = std::thread([this] { svr.listen_after_bind(); });
        svr.wait_until_ready();
    }
    ~StubServer() {
        svr.stop();
        if (th.joinable()) th.join();
    }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }
};

ProviderConfig remote_config(ProviderKind kind, const std::string& endpoint, int max_retries = 0,
                             int rate_limit = 10000) {
    ProviderConfig c;
    c.kind = kind;
    c.mode = ProviderMode::remote;
    c.endpoint = endpoint;
    c.max_retries = max_retries;
    c.rate_limit_per_min = rate_limit;
    c.timeout_ms = 5000;
    return c;
}

}  // namespace

TEST_CASE("provider config validation") {
    ProviderConfig local;
    CHECK_NOTHROW(validate(local));

    ProviderConfig remote = remote_config(ProviderKind::grammar, "");
    CHECK_THROWS_AS(validate(remote), std::invalid_argument);  // remote needs endpoint

    remote.endpoint = "http://localhost:1";
    CHECK_NOTHROW(validate(remote));

    remote.timeout_ms = 0;
    CHECK_THROWS_AS(validate(remote), std::invalid_argument);
}

TEST_CASE("provider kind and mode names round-trip") {
    for (auto k : {ProviderKind::perplexity, ProviderKind::embedding, ProviderKind::grammar,
                   ProviderKind::chat})
        CHECK(parse_provider_kind(to_string(k)) == k);
    for (auto m : {ProviderMode::local, ProviderMode::remote})
        CHECK(parse_provider_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_provider_kind("nope"), std::invalid_argument);
    CHECK_THROWS_AS(parse_provider_mode("nope"), std::invalid_argument);
}

TEST_CASE("url encoding escapes reserved characters") {
    auto enc = url_encode("a b&c=d");
    CHECK(enc.find(' ') == std::string::npos);
    CHECK(enc.find('&') == std::string::npos);
    CHECK(enc.find('=') == std::string::npos);
    CHECK(url_encode("plain") == "plain");
}

TEST_CASE("disk cache round-trips and keys are stable") {
    TempDir tmp;
    DiskCache cache(tmp.path);
    auto key = DiskCache::key_of(ProviderKind::grammar, Language::EN, "payload-1");
    CHECK_FALSE(cache.get(key).has_value());
    cache.put(key, "response body");
    REQUIRE(cache.get(key).has_value());
    CHECK(*cache.get(key) == "response body");

    CHECK(key == DiskCache::key_of(ProviderKind::grammar, Language::EN, "payload-1"));
    CHECK(key != DiskCache::key_of(ProviderKind::grammar, Language::FR, "payload-1"));
    CHECK(key != DiskCache::key_of(ProviderKind::chat, Language::EN, "payload-1"));
    CHECK(key != DiskCache::key_of(ProviderKind::grammar, Language::EN, "payload-2"));
}

TEST_CASE("cache default directory honors the environment override") {
    ::setenv("VERIDICT_CACHE_DIR", "/tmp/veridict-cache-override", 1);
    CHECK(DiskCache::default_dir() == fs::path("/tmp/veridict-cache-override"));
    ::unsetenv("VERIDICT_CACHE_DIR");
    CHECK(DiskCache::default_dir().filename() == ".veridict-cache");
}

TEST_CASE("rate limiter enforces a sliding one-minute window") {
    FakeClock clock;
    RateLimiter limiter(3, clock);
    limiter.acquire();
    limiter.acquire();
    limiter.acquire();
    CHECK(clock.sleeps.empty());
    limiter.acquire();  // must wait for the first stamp to age out
    CHECK_FALSE(clock.sleeps.empty());
    CHECK(clock.now >= 60000);
}

TEST_CASE("retry helper uses exponential backoff") {
    FakeClock clock;
    int attempts = 0;
    auto flaky = [&](std::string& err) -> std::optional<std::string> {
        if (++attempts < 3) {
            err = "boom";
            return std::nullopt;
        }
        return "ok";
    };
    auto out = with_retries(2, clock, flaky, "test op");
    CHECK(out == "ok");
    CHECK(attempts == 3);
    CHECK(clock.sleeps == std::vector<std::int64_t>{500, 1000});
}

TEST_CASE("retry helper gives up after max retries") {
    FakeClock clock;
    int attempts = 0;
    auto broken = [&](std::string& err) -> std::optional<std::string> {
        ++attempts;
        err = "down";
        return std::nullopt;
    };
    CHECK_THROWS_WITH_AS(with_retries(1, clock, broken, "test op"),
                         doctest::Contains("down"), std::runtime_error);
    CHECK(attempts == 2);
    CHECK(clock.sleeps == std::vector<std::int64_t>{500});
}

TEST_CASE("remote perplexity parses the ppl array and caches responses") {
    StubServer stub;
    std::atomic<int> hits{0};
    stub.svr.Post("/perplexity", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        auto j = nlohmann::json::parse(req.body);
        REQUIRE(j.contains("sentences"));
        nlohmann::json out;
        out["ppl"] = std::vector<double>(j["sentences"].size(), 12.5);
        res.set_content(out.dump(), "application/json");
    });
    stub.start();

    TempDir tmp;
    DiskCache cache(tmp.path);
    FakeClock clock;
    RemotePerplexity scorer(remote_config(ProviderKind::perplexity, stub.endpoint()), &cache,
                            clock);

    auto first = scorer.score_perplexity({"One sentence."}, Language::EN);
    CHECK(first == std::vector<double>{12.5});
    CHECK(hits == 1);
    CHECK(scorer.network_requests() == 1);

    auto second = scorer.score_perplexity({"One sentence."}, Language::EN);
    CHECK(second == first);
    CHECK(hits == 1);  // served from cache
    CHECK(scorer.network_requests() == 1);

    scorer.score_perplexity({"One sentence."}, Language::FR);  // language is part of the key
    CHECK(hits == 2);
}

TEST_CASE("remote perplexity rejects malformed responses") {
    StubServer stub;
    std::string body = "{\"ppl\": [1.0, 2.0]}";  // wrong length for one sentence
    stub.svr.Post("/perplexity", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(body, "application/json");
    });
    stub.start();

    TempDir tmp;
    DiskCache cache(tmp.path);
    FakeClock clock;
    auto make = [&] {
        return RemotePerplexity(remote_config(ProviderKind::perplexity, stub.endpoint()), &cache,
                                clock);
    };

    CHECK_THROWS_WITH_AS(make().score_perplexity({"One."}, Language::EN),
                         doctest::Contains("length mismatch"), std::runtime_error);
    body = "{\"ppl\": [-3.0]}";
    fs::remove_all(tmp.path);
    CHECK_THROWS_WITH_AS(make().score_perplexity({"One."}, Language::EN),
                         doctest::Contains("non-positive"), std::runtime_error);
    body = "not json";
    fs::remove_all(tmp.path);
    CHECK_THROWS_WITH_AS(make().score_perplexity({"One."}, Language::EN),
                         doctest::Contains("bad JSON"), std::runtime_error);
}

TEST_CASE("remote embedder infers width and rejects ragged rows") {
    StubServer stub;
    bool ragged = false;
    stub.svr.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        auto j = nlohmann::json::parse(req.body);
        REQUIRE(j.contains("texts"));
        nlohmann::json out;
        out["vectors"] = nlohmann::json::array();
        for (std::size_t i = 0; i < j["texts"].size(); ++i) {
            std::vector<double> row(ragged && i == 1 ? 3 : 4, 0.5);
            out["vectors"].push_back(row);
        }
        res.set_content(out.dump(), "application/json");
    });
    stub.start();

    TempDir tmp;
    DiskCache cache(tmp.path);
    FakeClock clock;
    RemoteEmbedder emb(remote_config(ProviderKind::embedding, stub.endpoint()), &cache, clock);

    auto rows = emb.embed_sentences({"a", "b"}, Language::EN);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].size() == 4);
    CHECK(emb.dim() == 4);  // inferred from the first response

    ragged = true;
    CHECK_THROWS_WITH_AS(emb.embed_sentences({"c", "d"}, Language::EN),
                         doctest::Contains("ragged"), std::runtime_error);
}

TEST_CASE("remote grammar posts form fields and counts matches") {
    StubServer stub;
    std::string seen_body, seen_type;
    int match_count = 0;
    bool malformed = false;
    stub.svr.Post("/v2/check", [&](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        seen_type = req.get_header_value("Content-Type");
        if (malformed) {
            res.set_content("<html>oops</html>", "text/html");
            return;
        }
        nlohmann::json out;
        out["matches"] = nlohmann::json::array();
        for (int i = 0; i < match_count; ++i) out["matches"].push_back({{"message", "err"}});
        res.set_content(out.dump(), "application/json");
    });
    stub.start();

    TempDir tmp;
    DiskCache cache(tmp.path);
    FakeClock clock;
    RemoteGrammar grammar(remote_config(ProviderKind::grammar, stub.endpoint()), &cache, clock);

    CHECK(grammar.check_grammar("Some text here", Language::EN) == 0);
    CHECK(seen_type == "application/x-www-form-urlencoded");
    CHECK(seen_body.find("language=") != std::string::npos);
    CHECK(seen_body.find("text=") != std::string::npos);

    match_count = 3;
    CHECK(grammar.check_grammar("Different text", Language::DE) == 3);

    malformed = true;
    CHECK_THROWS_WITH_AS(grammar.check_grammar("Third text", Language::EN),
                         doctest::Contains("bad JSON"), std::runtime_error);
}

TEST_CASE("remote chat sends the bearer token and returns the assistant text") {
    StubServer stub;
    std::string seen_auth;
    stub.svr.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        auto j = nlohmann::json::parse(req.body);
        REQUIRE(j.contains("messages"));
        nlohmann::json out;
        out["choices"] = nlohmann::json::array(
            {{{"message", {{"role", "assistant"}, {"content", "Yes."}}}}});
        res.set_content(out.dump(), "application/json");
    });
    stub.start();

    TempDir tmp;
    DiskCache cache(tmp.path);
    FakeClock clock;
    ::setenv("VERIDICT_CHAT_TOKEN", "sekret", 1);
    RemoteChat chat(remote_config(ProviderKind::chat, stub.endpoint()), &cache, clock);
    CHECK(chat.ask_chat("Was this generated?", "Body text.", Language::EN) == "Yes.");
    CHECK(seen_auth == "Bearer sekret");
    ::unsetenv("VERIDICT_CHAT_TOKEN");
}

TEST_CASE("remote chat without a token fails unless the cache is primed") {
    ::unsetenv("VERIDICT_CHAT_TOKEN");
    TempDir tmp;
    DiskCache cache(tmp.path);
    FakeClock clock;
    // endpoint points nowhere: any network attempt would fail loudly
    RemoteChat chat(remote_config(ProviderKind::chat, "http://127.0.0.1:9"), &cache, clock);

    CHECK_THROWS_WITH_AS(chat.ask_chat("Prompt", "Body", Language::EN),
                         doctest::Contains("VERIDICT_CHAT_TOKEN"), std::runtime_error);

    nlohmann::json canned;
    canned["choices"] = nlohmann::json::array(
        {{{"message", {{"role", "assistant"}, {"content", "Non."}}}}});
    auto payload = RemoteChat::payload_for("Prompt", "Body");
    cache.put(DiskCache::key_of(ProviderKind::chat, Language::EN, payload), canned.dump());

    CHECK(chat.ask_chat("Prompt", "Body", Language::EN) == "Non.");
    CHECK(chat.network_requests() == 0);
}

TEST_CASE("transient server failures are retried with backoff") {
    StubServer stub;
    std::atomic<int> hits{0};
    stub.svr.Post("/perplexity", [&](const httplib::Request&, httplib::Response& res) {
        if (++hits < 3) {
            res.status = 500;
            res.set_content("overloaded", "text/plain");
            return;
        }
        res.set_content("{\"ppl\": [7.0]}", "application/json");
    });
    stub.start();

    TempDir tmp;
    DiskCache cache(tmp.path);
    FakeClock clock;
    RemotePerplexity scorer(remote_config(ProviderKind::perplexity, stub.endpoint(), 2), &cache,
                            clock);
    auto out = scorer.score_perplexity({"One."}, Language::EN);
    CHECK(out == std::vector<double>{7.0});
    CHECK(hits == 3);
    CHECK(scorer.network_requests() == 3);  // attempts count
    CHECK(clock.sleeps == std::vector<std::int64_t>{500, 1000});
}

TEST_CASE("persistent failures surface after exhausting retries") {
    StubServer stub;
    std::atomic<int> hits{0};
    stub.svr.Post("/perplexity", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 503;
    });
    stub.start();

    TempDir tmp;
    DiskCache cache(tmp.path);
    FakeClock clock;
    RemotePerplexity scorer(remote_config(ProviderKind::perplexity, stub.endpoint(), 1), &cache,
                            clock);
    CHECK_THROWS_AS(scorer.score_perplexity({"One."}, Language::EN), std::runtime_error);
    CHECK(hits == 2);
    CHECK(clock.sleeps == std::vector<std::int64_t>{500});
}

TEST_CASE("a primed cache serves a client whose endpoint is unreachable") {
    TempDir tmp;
    FakeClock clock;
    std::string payload = RemotePerplexity::payload_for(Language::ES, {"Hola mundo."});
    {
        DiskCache cache(tmp.path);
        cache.put(DiskCache::key_of(ProviderKind::perplexity, Language::ES, payload),
                  "{\"ppl\": [42.0]}");
    }
    DiskCache cache(tmp.path);
    RemotePerplexity scorer(remote_config(ProviderKind::perplexity, "http://127.0.0.1:9"), &cache,
                            clock);
    auto out = scorer.score_perplexity({"Hola mundo."}, Language::ES);
    CHECK(out == std::vector<double>{42.0});
    CHECK(scorer.network_requests() == 0);
}

TEST_CASE("feedback prompts are per-language") {
    std::set<std::string> prompts;
    for (auto lang : {Language::EN, Language::FR, Language::DE, Language::ES}) {
        auto p = feedback_prompt(lang);
        CHECK_FALSE(p.empty());
        prompts.insert(p);
    }
    CHECK(prompts.size() == 4);
    CHECK(feedback_prompt(Language::EN).find("ChatGPT") != std::string::npos);
}

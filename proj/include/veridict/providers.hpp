#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "veridict/lang.hpp"
#include "veridict/provider_iface.hpp"

namespace veridict::providers {

enum class ProviderKind { perplexity, embedding, grammar, chat };
enum class ProviderMode { local, remote };

std::string to_string(ProviderKind k);
std::string to_string(ProviderMode m);
ProviderKind parse_provider_kind(std::string_view s);
ProviderMode parse_provider_mode(std::string_view s);

struct ProviderConfig {
    ProviderKind kind = ProviderKind::perplexity;
    ProviderMode mode = ProviderMode::local;
    std::string endpoint;        // remote only
    std::string auth_token_env;  // chat; defaults to VERIDICT_CHAT_TOKEN
    int timeout_ms = 10000;
    int max_retries = 2;
    int rate_limit_per_min = 120;
};

/// Throws std::invalid_argument on an inconsistent config.
void validate(const ProviderConfig& config);

// ----------------------------------------------------------------- clock ---

struct Clock {
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() = 0;
    virtual void sleep_ms(std::int64_t ms) = 0;
};

Clock& system_clock();

/// Deterministic clock for tests; sleeping advances time instantly.
class FakeClock : public Clock {
public:
    std::int64_t now = 0;
    std::vector<std::int64_t> sleeps;

    std::int64_t now_ms() override { return now; }
    void sleep_ms(std::int64_t ms) override {
        sleeps.push_back(ms);
        now += ms;
    }
};

// ----------------------------------------------------- rate limit / retry --

/// Sliding-window limiter: at most limit_per_min acquisitions per 60 s.
class RateLimiter {
public:
    RateLimiter(int limit_per_min, Clock& clock) : limit_(limit_per_min), clock_(&clock) {}
    void acquire();

private:
    int limit_;
    Clock* clock_;
    std::mutex mu_;
    std::deque<std::int64_t> stamps_;
};

inline constexpr std::int64_t kRetryBaseDelayMs = 500;

/// Runs attempt() up to 1 + max_retries times with delays base, 2*base,
/// 4*base, ... between attempts. attempt() returns the response or sets err.
std::string with_retries(int max_retries, Clock& clock,
                         const std::function<std::optional<std::string>(std::string& err)>& attempt,
                         const std::string& what);

// ----------------------------------------------------------------- cache ---

/// Content-addressed response store: one file per request key.
class DiskCache {
public:
    explicit DiskCache(std::filesystem::path dir);

    /// $VERIDICT_CACHE_DIR if set, else .veridict-cache in the working dir.
    static std::filesystem::path default_dir();

    static std::string key_of(ProviderKind kind, Language language, std::string_view payload);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, std::string_view response) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

// -------------------------------------------------------- remote clients ---

/// Shared plumbing: cache lookup, in-flight deduplication, rate limiting,
/// retries, HTTP POST. Network requests count against the rate limit; cache
/// hits bypass it.
class RemoteClient {
public:
    RemoteClient(ProviderConfig config, DiskCache* cache, Clock& clock);
    virtual ~RemoteClient() = default;

    /// Total network requests issued by this client (attempts included).
    std::int64_t network_requests() const { return requests_; }

protected:
    struct Request {
        std::string path;
        std::string body;
        std::string content_type;
        std::vector<std::pair<std::string, std::string>> headers;
    };

    /// Cache key is (kind, language, canonical payload); payload is usually
    /// the request body.
    std::string cached_post(Language language, const std::string& canonical_payload,
                            const Request& request);

    std::optional<std::string> cache_lookup(Language language,
                                            const std::string& canonical_payload) const;

    ProviderConfig config_;

private:
    std::string do_post(const Request& request);

    DiskCache* cache_;
    Clock* clock_;
    RateLimiter limiter_;
    std::int64_t requests_ = 0;

    std::mutex inflight_mu_;
    struct InFlight {
        std::mutex m;
        std::condition_variable cv;
        bool done = false;
        bool failed = false;
        std::string result;
        std::string error;
    };
    std::map<std::string, std::shared_ptr<InFlight>> inflight_;
};

class RemotePerplexity : public RemoteClient, public PerplexityScorer {
public:
    RemotePerplexity(ProviderConfig config, DiskCache* cache, Clock& clock = system_clock());
    std::vector<double> score_perplexity(const std::vector<std::string>& sentences,
                                         Language language) override;
    static std::string payload_for(Language language, const std::vector<std::string>& sentences);
};

class RemoteEmbedder : public RemoteClient, public SentenceEmbedder {
public:
    RemoteEmbedder(ProviderConfig config, DiskCache* cache, Clock& clock = system_clock(),
                   int default_dim = 64);
    int dim() const override;
    std::vector<std::vector<double>> embed_sentences(const std::vector<std::string>& sentences,
                                                     Language language) override;
    static std::string payload_for(Language language, const std::vector<std::string>& sentences);

private:
    int default_dim_;
    std::optional<int> inferred_dim_;
};

/// LanguageTool-style checker: form-encoded POST to /v2/check, counts the
/// `matches` array of the JSON response.
class RemoteGrammar : public RemoteClient, public GrammarChecker {
public:
    RemoteGrammar(ProviderConfig config, DiskCache* cache, Clock& clock = system_clock());
    long check_grammar(const std::string& text, Language language) override;
    static std::string payload_for(Language language, const std::string& text);
};

/// Chat-completions style client; reads its bearer token from the env var
/// named by auth_token_env (default VERIDICT_CHAT_TOKEN).
class RemoteChat : public RemoteClient, public ChatFeedback {
public:
    RemoteChat(ProviderConfig config, DiskCache* cache, Clock& clock = system_clock());
    std::string ask_chat(const std::string& prompt, const std::string& body,
                         Language language) override;
    static std::string payload_for(const std::string& prompt, const std::string& body);
};

std::string url_encode(std::string_view s);

}  // namespace veridict::providers

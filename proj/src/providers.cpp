#include "veridict/providers.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "veridict/util.hpp"

namespace veridict::providers {

std::string feedback_prompt(Language language) {
    switch (language) {
        case Language::EN: return "Was the following text generated by ChatGPT?";
        case Language::FR: return "Le texte suivant a-t-il été généré par ChatGPT?";
        case Language::DE: return "Wurde der folgende Text von ChatGPT generiert?";
        case Language::ES: return "¿El siguiente texto fue generado por ChatGPT?";
    }
    throw std::logic_error("bad Language value");
}

std::string to_string(ProviderKind k) {
    switch (k) {
        case ProviderKind::perplexity: return "perplexity";
        case ProviderKind::embedding: return "embedding";
        case ProviderKind::grammar: return "grammar";
        case ProviderKind::chat: return "chat";
    }
    throw std::logic_error("bad ProviderKind value");
}

std::string to_string(ProviderMode m) {
    return m == ProviderMode::local ? "local" : "remote";
}

ProviderKind parse_provider_kind(std::string_view s) {
    if (s == "perplexity") return ProviderKind::perplexity;
    if (s == "embedding") return ProviderKind::embedding;
    if (s == "grammar") return ProviderKind::grammar;
    if (s == "chat") return ProviderKind::chat;
    throw std::invalid_argument("unknown provider kind: \"" + std::string(s) + "\"");
}

ProviderMode parse_provider_mode(std::string_view s) {
    if (s == "local") return ProviderMode::local;
    if (s == "remote") return ProviderMode::remote;
    throw std::invalid_argument("unknown provider mode: \"" + std::string(s) + "\"");
}

void validate(const ProviderConfig& config) {
    if (config.mode == ProviderMode::remote && config.endpoint.empty())
        throw std::invalid_argument("remote " + to_string(config.kind) +
                                    " provider needs an endpoint");
    if (config.kind == ProviderKind::chat && config.mode == ProviderMode::local)
        throw std::invalid_argument("chat provider has no local mode");
    if (config.timeout_ms <= 0) throw std::invalid_argument("timeout_ms must be > 0");
    if (config.max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
    if (config.rate_limit_per_min <= 0)
        throw std::invalid_argument("rate_limit_per_min must be > 0");
}

// ----------------------------------------------------------------- clock ---

namespace {

class SystemClock : public Clock {
public:
    std::int64_t now_ms() override {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }
    void sleep_ms(std::int64_t ms) override {
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    }
};

}  // namespace

Clock& system_clock() {
    static SystemClock clock;
    return clock;
}

// ----------------------------------------------------- rate limit / retry --

void RateLimiter::acquire() {
    std::unique_lock lock(mu_);
    for (;;) {
        const auto now = clock_->now_ms();
        while (!stamps_.empty() && stamps_.front() <= now - 60000) stamps_.pop_front();
        if (static_cast<int>(stamps_.size()) < limit_) {
            stamps_.push_back(now);
            return;
        }
        const auto wait = stamps_.front() + 60000 - now;
        lock.unlock();
        clock_->sleep_ms(wait > 0 ? wait : 1);
        lock.lock();
    }
}

std::string with_retries(int max_retries, Clock& clock,
                         const std::function<std::optional<std::string>(std::string&)>& attempt,
                         const std::string& what) {
    std::string last_err;
    for (int i = 0; i <= max_retries; ++i) {
        if (i > 0) {
            const std::int64_t delay = kRetryBaseDelayMs << (i - 1);
            std::fprintf(stderr, "veridict: %s failed (%s); retry %d/%d in %lld ms\n",
                         what.c_str(), last_err.c_str(), i, max_retries,
                         static_cast<long long>(delay));
            clock.sleep_ms(delay);
        }
        std::string err;
        if (auto res = attempt(err)) return *res;
        last_err = err;
    }
    throw std::runtime_error(what + " failed after " + std::to_string(max_retries) +
                             " retries: " + last_err);
}

// ----------------------------------------------------------------- cache ---

DiskCache::DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path DiskCache::default_dir() {
    if (const char* env = std::getenv("VERIDICT_CACHE_DIR"); env && *env) return env;
    return ".veridict-cache";
}

std::string DiskCache::key_of(ProviderKind kind, Language language, std::string_view payload) {
    return sha256_hex(to_string(kind) + "\n" + to_string(language) + "\n" +
                      std::string(payload));
}

std::optional<std::string> DiskCache::get(const std::string& key) const {
    const auto path = dir_ / key;
    if (!std::filesystem::exists(path)) return std::nullopt;
    return read_file(path);
}

void DiskCache::put(const std::string& key, std::string_view response) const {
    write_file_atomic(dir_ / key, response);
}

// -------------------------------------------------------- remote clients ---

RemoteClient::RemoteClient(ProviderConfig config, DiskCache* cache, Clock& clock)
    : config_(std::move(config)),
      cache_(cache),
      clock_(&clock),
      limiter_(config_.rate_limit_per_min, clock) {
    validate(config_);
}

std::string RemoteClient::do_post(const Request& request) {
    return with_retries(
        config_.max_retries, *clock_,
        [&](std::string& err) -> std::optional<std::string> {
            limiter_.acquire();
            ++requests_;
            httplib::Client cli(config_.endpoint);
            cli.set_connection_timeout(0, config_.timeout_ms * 1000);
            cli.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
            httplib::Headers headers;
            for (const auto& [k, v] : request.headers) headers.emplace(k, v);
            auto res = cli.Post(request.path, headers, request.body, request.content_type);
            if (!res) {
                err = "transport error: " + httplib::to_string(res.error());
                return std::nullopt;
            }
            if (res->status != 200) {
                err = "HTTP status " + std::to_string(res->status);
                return std::nullopt;
            }
            return res->body;
        },
        to_string(config_.kind) + " request");
}

std::optional<std::string> RemoteClient::cache_lookup(Language language,
                                                      const std::string& canonical_payload) const {
    if (!cache_) return std::nullopt;
    return cache_->get(DiskCache::key_of(config_.kind, language, canonical_payload));
}

std::string RemoteClient::cached_post(Language language, const std::string& canonical_payload,
                                      const Request& request) {
    const auto key = DiskCache::key_of(config_.kind, language, canonical_payload);
    if (cache_)
        if (auto hit = cache_->get(key)) return *hit;

    std::shared_ptr<InFlight> flight;
    bool leader = false;
    {
        std::lock_guard guard(inflight_mu_);
        auto it = inflight_.find(key);
        if (it == inflight_.end()) {
            flight = std::make_shared<InFlight>();
            inflight_.emplace(key, flight);
            leader = true;
        } else {
            flight = it->second;
        }
    }
    if (!leader) {
        std::unique_lock lk(flight->m);
        flight->cv.wait(lk, [&] { return flight->done; });
        if (flight->failed) throw std::runtime_error(flight->error);
        return flight->result;
    }

    std::string result, error;
    bool failed = false;
    try {
        result = do_post(request);
        if (cache_) cache_->put(key, result);
    } catch (const std::exception& e) {
        failed = true;
        error = e.what();
    }
    {
        std::lock_guard guard(inflight_mu_);
        inflight_.erase(key);
    }
    {
        std::lock_guard lk(flight->m);
        flight->done = true;
        flight->failed = failed;
        flight->result = result;
        flight->error = error;
    }
    flight->cv.notify_all();
    if (failed) throw std::runtime_error(error);
    return result;
}

// ------------------------------------------------------------ perplexity ---

RemotePerplexity::RemotePerplexity(ProviderConfig config, DiskCache* cache, Clock& clock)
    : RemoteClient(std::move(config), cache, clock) {}

std::string RemotePerplexity::payload_for(Language language,
                                          const std::vector<std::string>& sentences) {
    nlohmann::json j;
    j["language"] = to_string(language);
    j["sentences"] = sentences;
    return j.dump();
}

std::vector<double> RemotePerplexity::score_perplexity(const std::vector<std::string>& sentences,
                                                       Language language) {
    if (sentences.empty()) return {};
    const auto payload = payload_for(language, sentences);
    const auto body = cached_post(language, payload, {"/perplexity", payload,
                                                      "application/json", {}});
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("perplexity protocol error: bad JSON: ") + e.what());
    }
    if (!j.contains("ppl") || !j["ppl"].is_array())
        throw std::runtime_error("perplexity protocol error: missing ppl array");
    std::vector<double> out;
    for (const auto& v : j["ppl"]) {
        if (!v.is_number()) throw std::runtime_error("perplexity protocol error: non-number ppl");
        out.push_back(v.get<double>());
    }
    if (out.size() != sentences.size())
        throw std::runtime_error("perplexity protocol error: ppl length mismatch");
    for (double p : out)
        if (!(p > 0.0)) throw std::runtime_error("perplexity protocol error: non-positive ppl");
    return out;
}

// ------------------------------------------------------------- embedding ---

RemoteEmbedder::RemoteEmbedder(ProviderConfig config, DiskCache* cache, Clock& clock,
                               int default_dim)
    : RemoteClient(std::move(config), cache, clock), default_dim_(default_dim) {}

int RemoteEmbedder::dim() const { return inferred_dim_.value_or(default_dim_); }

std::string RemoteEmbedder::payload_for(Language, const std::vector<std::string>& sentences) {
    nlohmann::json j;
    j["texts"] = sentences;
    return j.dump();
}

std::vector<std::vector<double>> RemoteEmbedder::embed_sentences(
    const std::vector<std::string>& sentences, Language language) {
    if (sentences.empty()) return {};
    const auto payload = payload_for(language, sentences);
    const auto body = cached_post(language, payload, {"/embed", payload,
                                                      "application/json", {}});
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("embedding protocol error: bad JSON: ") + e.what());
    }
    if (!j.contains("vectors") || !j["vectors"].is_array())
        throw std::runtime_error("embedding protocol error: missing vectors array");
    std::vector<std::vector<double>> out;
    for (const auto& row : j["vectors"]) {
        if (!row.is_array())
            throw std::runtime_error("embedding protocol error: non-array row");
        std::vector<double> v;
        for (const auto& x : row) {
            if (!x.is_number())
                throw std::runtime_error("embedding protocol error: non-number component");
            v.push_back(x.get<double>());
        }
        if (!out.empty() && v.size() != out.front().size())
            throw std::runtime_error("embedding protocol error: ragged vector widths");
        out.push_back(std::move(v));
    }
    if (out.size() != sentences.size())
        throw std::runtime_error("embedding protocol error: vector count mismatch");
    if (!out.empty()) inferred_dim_ = static_cast<int>(out.front().size());
    return out;
}

// --------------------------------------------------------------- grammar ---

RemoteGrammar::RemoteGrammar(ProviderConfig config, DiskCache* cache, Clock& clock)
    : RemoteClient(std::move(config), cache, clock) {}

std::string url_encode(std::string_view s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

std::string RemoteGrammar::payload_for(Language language, const std::string& text) {
    std::string code = to_string(language);
    for (auto& c : code) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return "language=" + url_encode(code) + "&text=" + url_encode(text);
}

long RemoteGrammar::check_grammar(const std::string& text, Language language) {
    const auto payload = payload_for(language, text);
    const auto body = cached_post(language, payload,
                                  {"/v2/check", payload, "application/x-www-form-urlencoded", {}});
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("grammar protocol error: bad JSON: ") + e.what());
    }
    if (!j.contains("matches") || !j["matches"].is_array())
        throw std::runtime_error("grammar protocol error: missing matches array");
    return static_cast<long>(j["matches"].size());
}

// ------------------------------------------------------------------ chat ---

RemoteChat::RemoteChat(ProviderConfig config, DiskCache* cache, Clock& clock)
    : RemoteClient(std::move(config), cache, clock) {}

namespace {

std::string extract_content(const std::string& raw) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("chat protocol error: bad JSON: ") + e.what());
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
        throw std::runtime_error("chat protocol error: missing choices");
    const auto& msg = j["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string())
        throw std::runtime_error("chat protocol error: missing message content");
    return msg["message"]["content"].get<std::string>();
}

}  // namespace

std::string RemoteChat::payload_for(const std::string& prompt, const std::string& body) {
    nlohmann::json msg;
    msg["role"] = "user";
    msg["content"] = prompt + "\n\n" + body;
    nlohmann::json j;
    j["messages"] = nlohmann::json::array({msg});
    return j.dump();
}

std::string RemoteChat::ask_chat(const std::string& prompt, const std::string& body,
                                 Language language) {
    const auto payload = payload_for(prompt, body);
    const auto key = DiskCache::key_of(ProviderKind::chat, language, payload);

    const char* env_name =
        config_.auth_token_env.empty() ? "VERIDICT_CHAT_TOKEN" : config_.auth_token_env.c_str();

    Request request{"/v1/chat/completions", payload, "application/json", {}};
    // A primed cache works without a token; only an actual network request
    // needs one.
    const char* token = std::getenv(env_name);
    if (!token || !*token) {
        if (auto raw = cache_lookup(language, payload)) return extract_content(*raw);
        throw std::runtime_error(std::string("chat provider: auth token env var ") + env_name +
                                 " is not set");
    }
    request.headers.emplace_back("Authorization", std::string("Bearer ") + token);

    const auto raw = cached_post(language, payload, request);
    return extract_content(raw);
}

}  // namespace veridict::providers

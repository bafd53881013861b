#pragma once

#include <string>
#include <vector>

#include "veridict/lang.hpp"

namespace veridict::providers {

/// Thrown when a feature category needs a provider that is not configured;
/// reason is machine-readable, e.g. "provider:chat".
struct ProviderUnavailable : std::runtime_error {
    std::string reason;
    explicit ProviderUnavailable(std::string r)
        : std::runtime_error("required provider not configured: " + r), reason(std::move(r)) {}
};

struct PerplexityScorer {
    virtual ~PerplexityScorer() = default;
    /// One perplexity (> 0) per sentence.
    virtual std::vector<double> score_perplexity(const std::vector<std::string>& sentences,
                                                 Language language) = 0;
};

struct SentenceEmbedder {
    virtual ~SentenceEmbedder() = default;
    virtual int dim() const = 0;
    /// One dim()-wide vector per sentence.
    virtual std::vector<std::vector<double>> embed_sentences(
        const std::vector<std::string>& sentences, Language language) = 0;
};

struct GrammarChecker {
    virtual ~GrammarChecker() = default;
    virtual long check_grammar(const std::string& text, Language language) = 0;
};

struct ChatFeedback {
    virtual ~ChatFeedback() = default;
    virtual std::string ask_chat(const std::string& prompt, const std::string& body,
                                 Language language) = 0;
};

/// The per-language "was this text AI-generated?" question sent to the chat
/// provider.
std::string feedback_prompt(Language language);

}  // namespace veridict::providers

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "veridict/corpus.hpp"
#include "veridict/lang.hpp"
#include "veridict/matrix.hpp"
#include "veridict/provider_iface.hpp"
#include "veridict/textproc.hpp"

namespace veridict::features {

enum class Category {
    Perplexity,
    Semantic,
    ListLookup,
    Document,
    ErrorBased,
    Readability,
    AIFeedback,
    TextVector,
};

inline constexpr std::array<Category, 8> kAllCategories = {
    Category::Perplexity, Category::Semantic,    Category::ListLookup, Category::Document,
    Category::ErrorBased, Category::Readability, Category::AIFeedback, Category::TextVector,
};

std::string to_string(Category c);
Category parse_category(std::string_view s);

using CategorySet = std::set<Category>;

/// Named feature values in their manifest order.
using NamedValues = std::vector<std::pair<std::string, double>>;

// ------------------------------------------------------------ text vector --

struct FittedVectorizer {
    static constexpr std::size_t kDim = 500;

    std::vector<std::string> vocabulary;  // by descending df, ties lexicographic
    std::vector<double> idf;
    std::string fitted_on;  // train fingerprint

    // rebuilt after fit/load, not serialized
    std::unordered_map<std::string, int> index;
    void rebuild_index();
};

FittedVectorizer fit_tfidf(const std::vector<const textproc::TokenizedDocument*>& train_docs);

/// Always kDim wide; slots past the fitted vocabulary stay 0. L2-normalized.
std::vector<double> transform_tfidf(const textproc::TokenizedDocument& doc,
                                    const FittedVectorizer& v);

/// Interpolated add-k word bigram model; the local perplexity default.
/// Tokens are lowercased Word/Number texts; unknowns share one UNK type.
struct BigramLm {
    static constexpr double kLambda = 0.7;  // bigram weight
    static constexpr double kAddK = 0.1;

    std::map<std::string, int> word_ids;            // ids from 1; 0 = UNK
    std::vector<std::int64_t> unigram_counts;       // by id
    std::int64_t total_tokens = 0;
    std::map<std::pair<int, int>, std::int64_t> bigram_counts;  // (context, word)
    std::vector<std::int64_t> context_counts;       // transitions from each context
    std::int64_t sentence_starts = 0;               // transitions from BOS

    bool fitted() const { return total_tokens > 0; }
    void fit(const std::vector<const textproc::TokenizedDocument*>& train_docs);
    /// exp(-mean log p) over the sentence's Word/Number tokens; 0 tokens -> 1.
    double sentence_ppl(const textproc::Sentence& sentence) const;
    double sentence_ppl(const std::vector<std::string>& lowered_words) const;
};

/// Deterministic sentence encoder: sign-hashed character 3-5 grams of the
/// case-folded sentence, L2-normalized.
class HashedEmbedder : public providers::SentenceEmbedder {
public:
    static constexpr int kDefaultDim = 64;
    static constexpr std::uint64_t kHashSeed = 0x56455244u;  // fixed public seed

    explicit HashedEmbedder(int dim = kDefaultDim) : dim_(dim) {}
    int dim() const override { return dim_; }
    std::vector<std::vector<double>> embed_sentences(const std::vector<std::string>& sentences,
                                                     Language language) override;
    static std::vector<double> embed_one(const std::string& sentence, int dim);

private:
    int dim_;
};

/// Local grammar default: lowercased all-letter Word tokens of length >= 2
/// missing from the pack's spelling dictionary.
class DictionaryGrammar : public providers::GrammarChecker {
public:
    explicit DictionaryGrammar(const textproc::LanguagePack& pack) : pack_(&pack) {}
    long check_grammar(const std::string& text, Language language) override;

private:
    const textproc::LanguagePack* pack_;
};

/// PerplexityScorer view over a fitted BigramLm; re-tokenizes raw sentences.
class LmScorer : public providers::PerplexityScorer {
public:
    LmScorer(const BigramLm& lm, Language language) : lm_(&lm), language_(language) {}
    std::vector<double> score_perplexity(const std::vector<std::string>& sentences,
                                         Language language) override;

private:
    const BigramLm* lm_;
    Language language_;
};

// ------------------------------------------------------------- categories --

NamedValues perplexity_features(const textproc::TokenizedDocument& doc,
                                providers::PerplexityScorer& scorer, Language language,
                                bool* warning = nullptr);

NamedValues semantic_features(const textproc::TokenizedDocument& doc,
                              const textproc::LanguagePack& pack);

NamedValues listlookup_features(const textproc::TokenizedDocument& doc, const std::string& title,
                                const textproc::LanguagePack& pack);

NamedValues document_features(const textproc::TokenizedDocument& doc, const std::string& body);

NamedValues errorbased_features(const std::string& body, providers::GrammarChecker& checker,
                                Language language);

NamedValues readability_features(const textproc::TokenizedDocument& doc,
                                 const textproc::LanguagePack& pack, bool* warning = nullptr);

NamedValues aifeedback_feature(const std::string& body, providers::ChatFeedback& oracle,
                               Language language);

/// Yes/no mapping of a chat reply: first match within the first 5 tokens wins,
/// accent- and case-insensitive; no match -> 0.5.
double map_feedback_response(const std::string& reply);

NamedValues embedding_features(const textproc::TokenizedDocument& doc,
                               providers::SentenceEmbedder& embedder, Language language);

// -------------------------------------------------------------- assembly ---

struct ExtractionContext {
    const textproc::LanguagePack* pack = nullptr;
    providers::PerplexityScorer* perplexity = nullptr;
    providers::SentenceEmbedder* embedder = nullptr;
    providers::GrammarChecker* grammar = nullptr;
    providers::ChatFeedback* chat = nullptr;  // absent -> AIFeedback unavailable
    const FittedVectorizer* vectorizer = nullptr;
};

struct FeatureVector {
    std::vector<std::string> manifest;
    std::vector<double> values;
    bool warning = false;
};

/// Column names for a config, in canonical category order. Fixed for a given
/// (config, embedding_dim) independent of corpus or seed.
std::vector<std::string> build_manifest(const CategorySet& config, int embedding_dim);

std::size_t category_width(Category c, int embedding_dim);

std::string manifest_fingerprint(const std::vector<std::string>& manifest);

FeatureVector extract(const corpus::Document& doc, const textproc::TokenizedDocument& tok,
                      const CategorySet& config, const ExtractionContext& ctx);

struct AssembledMatrix {
    Matrix X;
    std::vector<int> y;
    std::vector<std::string> ids;
    std::vector<std::string> manifest;
};

AssembledMatrix assemble_matrix(const std::vector<const corpus::Document*>& docs,
                                const std::vector<const textproc::TokenizedDocument*>& toks,
                                const CategorySet& config, const ExtractionContext& ctx,
                                Task task);

/// Column subset of a master matrix assembled with a superset config.
AssembledMatrix slice_categories(const AssembledMatrix& master, const CategorySet& master_config,
                                 const CategorySet& want, int embedding_dim);

/// Per-split fitted state (vectorizer + language model), tagged with the
/// fingerprint of the ids it was fitted on.
struct FittedState {
    FittedVectorizer vectorizer;
    BigramLm lm;
    std::string fitted_on;
};

std::string train_fingerprint(std::vector<std::string> train_ids);

FittedState fit_state(const std::vector<const textproc::TokenizedDocument*>& train_docs,
                      std::vector<std::string> train_ids);

void export_csv(const AssembledMatrix& m, const std::filesystem::path& path);
void export_manifest(const std::vector<std::string>& manifest, const std::filesystem::path& path);

}  // namespace veridict::features

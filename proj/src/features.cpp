#include "veridict/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "veridict/utf8.hpp"
#include "veridict/util.hpp"

namespace veridict::features {

namespace {

bool is_countable(const textproc::Token& t) {
    return t.kind == textproc::TokenKind::Word || t.kind == textproc::TokenKind::Number;
}

std::vector<std::string> lowered_words(const textproc::Sentence& s) {
    std::vector<std::string> out;
    for (const auto& t : s.tokens)
        if (is_countable(t)) out.push_back(utf8::fold_case(t.text));
    return out;
}

template <typename Fn>
void for_each_sentence(const textproc::TokenizedDocument& doc, Fn&& fn) {
    for (const auto& para : doc.paragraphs)
        for (const auto& sent : para.sentences) fn(sent);
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

std::string to_string(Category c) {
    switch (c) {
        case Category::Perplexity: return "Perplexity";
        case Category::Semantic: return "Semantic";
        case Category::ListLookup: return "ListLookup";
        case Category::Document: return "Document";
        case Category::ErrorBased: return "ErrorBased";
        case Category::Readability: return "Readability";
        case Category::AIFeedback: return "AIFeedback";
        case Category::TextVector: return "TextVector";
    }
    throw std::logic_error("bad Category value");
}

Category parse_category(std::string_view s) {
    std::string low(s);
    for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (Category c : kAllCategories) {
        std::string name = to_string(c);
        for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (low == name) return c;
    }
    throw std::invalid_argument("unknown feature category: \"" + std::string(s) + "\"");
}

// -------------------------------------------------------------- tf-idf -----

namespace {

/// 1-grams and within-sentence 2-grams of lowercased Word/Number tokens.
template <typename Fn>
void for_each_gram(const textproc::TokenizedDocument& doc, Fn&& fn) {
    for_each_sentence(doc, [&](const textproc::Sentence& sent) {
        const auto words = lowered_words(sent);
        for (std::size_t i = 0; i < words.size(); ++i) {
            fn(words[i]);
            if (i + 1 < words.size()) fn(words[i] + " " + words[i + 1]);
        }
    });
}

}  // namespace

void FittedVectorizer::rebuild_index() {
    index.clear();
    for (std::size_t i = 0; i < vocabulary.size(); ++i)
        index.emplace(vocabulary[i], static_cast<int>(i));
}

FittedVectorizer fit_tfidf(const std::vector<const textproc::TokenizedDocument*>& train_docs) {
    if (train_docs.empty()) throw std::invalid_argument("fit_tfidf: empty training set");

    std::map<std::string, std::int64_t> df;
    for (const auto* doc : train_docs) {
        std::set<std::string> seen;
        for_each_gram(*doc, [&](const std::string& g) { seen.insert(g); });
        for (const auto& g : seen) df[g] += 1;
    }

    std::vector<std::pair<std::string, std::int64_t>> ranked(df.begin(), df.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > FittedVectorizer::kDim) ranked.resize(FittedVectorizer::kDim);

    FittedVectorizer v;
    const double n = static_cast<double>(train_docs.size());
    for (const auto& [gram, count] : ranked) {
        v.vocabulary.push_back(gram);
        v.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    v.rebuild_index();
    return v;
}

std::vector<double> transform_tfidf(const textproc::TokenizedDocument& doc,
                                    const FittedVectorizer& v) {
    std::vector<double> out(FittedVectorizer::kDim, 0.0);
    for_each_gram(doc, [&](const std::string& g) {
        auto it = v.index.find(g);
        if (it != v.index.end()) out[it->second] += 1.0;
    });
    double norm2 = 0.0;
    for (std::size_t i = 0; i < v.vocabulary.size(); ++i) {
        out[i] *= v.idf[i];
        norm2 += out[i] * out[i];
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : out) x *= inv;
    }
    return out;
}

// ------------------------------------------------------------ bigram LM ----

void BigramLm::fit(const std::vector<const textproc::TokenizedDocument*>& train_docs) {
    word_ids.clear();
    unigram_counts.assign(1, 0);  // slot 0 = UNK, never counted in training
    bigram_counts.clear();
    context_counts.assign(1, 0);
    total_tokens = 0;
    sentence_starts = 0;

    auto id_of = [&](const std::string& w) {
        auto [it, inserted] = word_ids.emplace(w, static_cast<int>(unigram_counts.size()));
        if (inserted) {
            unigram_counts.push_back(0);
            context_counts.push_back(0);
        }
        return it->second;
    };

    for (const auto* doc : train_docs) {
        for_each_sentence(*doc, [&](const textproc::Sentence& sent) {
            const auto words = lowered_words(sent);
            if (words.empty()) return;
            int prev = -1;  // -1 = sentence start
            for (const auto& w : words) {
                const int id = id_of(w);
                unigram_counts[id] += 1;
                total_tokens += 1;
                bigram_counts[{prev, id}] += 1;
                if (prev == -1)
                    sentence_starts += 1;
                else
                    context_counts[prev] += 1;
                prev = id;
            }
        });
    }
}

double BigramLm::sentence_ppl(const std::vector<std::string>& lowered) const {
    if (lowered.empty()) return 1.0;
    const double v = static_cast<double>(word_ids.size()) + 1.0;  // + UNK
    const double k = kAddK;

    double neg_log_sum = 0.0;
    int prev = -1;
    for (const auto& w : lowered) {
        auto it = word_ids.find(w);
        const int id = it == word_ids.end() ? 0 : it->second;

        const double uni_num = static_cast<double>(unigram_counts[id]) + k;
        const double uni_den = static_cast<double>(total_tokens) + k * v;
        const double p_uni = uni_num / uni_den;

        auto bit = bigram_counts.find({prev, id});
        const double bi_count = bit == bigram_counts.end() ? 0.0 : static_cast<double>(bit->second);
        const double ctx_count = prev == -1 ? static_cast<double>(sentence_starts)
                                            : static_cast<double>(context_counts[prev]);
        const double p_bi = (bi_count + k) / (ctx_count + k * v);

        const double p = kLambda * p_bi + (1.0 - kLambda) * p_uni;
        neg_log_sum -= std::log(p);
        prev = id;
    }
    return std::exp(neg_log_sum / static_cast<double>(lowered.size()));
}

double BigramLm::sentence_ppl(const textproc::Sentence& sentence) const {
    return sentence_ppl(lowered_words(sentence));
}

// -------------------------------------------------------- hashed embedder --

std::vector<double> HashedEmbedder::embed_one(const std::string& sentence, int dim) {
    std::vector<double> vec(static_cast<std::size_t>(dim), 0.0);
    const auto cps = utf8::decode_all(utf8::fold_case(sentence));
    for (std::size_t n = 3; n <= 5; ++n) {
        if (cps.size() < n) break;
        for (std::size_t i = 0; i + n <= cps.size(); ++i) {
            std::uint64_t h = kHashSeed;
            for (std::size_t j = i; j < i + n; ++j)
                h = mix_seed(h, static_cast<std::uint64_t>(cps[j]));
            const auto bucket = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim));
            vec[bucket] += (h >> 63) ? -1.0 : 1.0;
        }
    }
    double norm2 = 0.0;
    for (double x : vec) norm2 += x * x;
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : vec) x *= inv;
    }
    return vec;
}

std::vector<std::vector<double>> HashedEmbedder::embed_sentences(
    const std::vector<std::string>& sentences, Language) {
    std::vector<std::vector<double>> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(embed_one(s, dim_));
    return out;
}

// ------------------------------------------------------- local providers ---

long DictionaryGrammar::check_grammar(const std::string& text, Language language) {
    if (language != pack_->language)
        throw std::invalid_argument("grammar checker language mismatch");
    long misses = 0;
    for (const auto& tok : textproc::tokenize(text)) {
        if (tok.kind != textproc::TokenKind::Word) continue;
        const auto cps = utf8::decode_all(tok.text);
        if (cps.size() < 2) continue;
        if (!std::all_of(cps.begin(), cps.end(), [](char32_t c) { return utf8::is_letter(c); }))
            continue;
        if (!pack_->word_list.count(utf8::fold_case(tok.text))) ++misses;
    }
    return misses;
}

std::vector<double> LmScorer::score_perplexity(const std::vector<std::string>& sentences,
                                               Language language) {
    if (language != language_) throw std::invalid_argument("perplexity scorer language mismatch");
    if (!lm_->fitted()) throw std::runtime_error("perplexity model not fitted");
    std::vector<double> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
        std::vector<std::string> words;
        for (const auto& tok : textproc::tokenize(s))
            if (is_countable(tok)) words.push_back(utf8::fold_case(tok.text));
        out.push_back(lm_->sentence_ppl(words));
    }
    return out;
}

// ----------------------------------------------------------- categories ----

NamedValues perplexity_features(const textproc::TokenizedDocument& doc,
                                providers::PerplexityScorer& scorer, Language language,
                                bool* warning) {
    std::vector<std::string> scoreable;
    for_each_sentence(doc, [&](const textproc::Sentence& sent) {
        if (std::any_of(sent.tokens.begin(), sent.tokens.end(), is_countable))
            scoreable.push_back(sent.raw);
    });
    if (scoreable.empty()) {
        if (warning) *warning = true;
        return {{"PPL_mean", 0.0}, {"PPL_max", 0.0}};
    }
    const auto ppls = scorer.score_perplexity(scoreable, language);
    if (ppls.size() != scoreable.size())
        throw std::runtime_error("perplexity scorer returned wrong count");
    return {{"PPL_mean", mean_of(ppls)},
            {"PPL_max", *std::max_element(ppls.begin(), ppls.end())}};
}

NamedValues semantic_features(const textproc::TokenizedDocument& doc,
                              const textproc::LanguagePack& pack) {
    double pol_sum = 0.0, subj_sum = 0.0;
    std::int64_t pol_n = 0, subj_n = 0;
    for_each_sentence(doc, [&](const textproc::Sentence& sent) {
        const auto& toks = sent.tokens;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (toks[i].kind != textproc::TokenKind::Word) continue;
            const auto w = utf8::fold_case(toks[i].text);
            if (auto it = pack.polarity_lexicon.find(w); it != pack.polarity_lexicon.end()) {
                double score = it->second;
                for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
                    if (pack.negators.count(utf8::fold_case(toks[i - back].text))) {
                        score = -score;
                        break;
                    }
                }
                pol_sum += score;
                pol_n += 1;
            }
            if (auto it = pack.subjectivity_lexicon.find(w);
                it != pack.subjectivity_lexicon.end()) {
                subj_sum += it->second;
                subj_n += 1;
            }
        }
    });
    return {{"sentiment_polarity", pol_n ? pol_sum / static_cast<double>(pol_n) : 0.0},
            {"sentiment_subjectivity", subj_n ? subj_sum / static_cast<double>(subj_n) : 0.0}};
}

NamedValues listlookup_features(const textproc::TokenizedDocument& doc, const std::string& title,
                                const textproc::LanguagePack& pack) {
    std::int64_t stop_n = 0, pronoun_n = 0, discourse_n = 0;
    std::int64_t words_n = 0;

    // multiword discourse markers as token sequences, longest first per head
    std::map<std::string, std::vector<std::vector<std::string>>> marker_heads;
    for (const auto& m : pack.discourse_markers) {
        auto parts = split(m, ' ');
        parts.erase(std::remove_if(parts.begin(), parts.end(),
                                   [](const std::string& p) { return p.empty(); }),
                    parts.end());
        if (!parts.empty()) marker_heads[parts.front()].push_back(parts);
    }
    for (auto& [head, seqs] : marker_heads)
        std::sort(seqs.begin(), seqs.end(),
                  [](const auto& a, const auto& b) { return a.size() > b.size(); });

    for_each_sentence(doc, [&](const textproc::Sentence& sent) {
        std::vector<std::string> low;
        low.reserve(sent.tokens.size());
        for (const auto& t : sent.tokens) {
            low.push_back(utf8::fold_case(t.text));
            if (is_countable(t)) ++words_n;
        }
        for (std::size_t i = 0; i < low.size(); ++i) {
            if (pack.stop_words.count(low[i])) ++stop_n;
            if (pack.personal_pronouns.count(low[i])) ++pronoun_n;
        }
        for (std::size_t i = 0; i < low.size();) {
            auto it = marker_heads.find(low[i]);
            std::size_t consumed = 0;
            if (it != marker_heads.end()) {
                for (const auto& seq : it->second) {
                    if (i + seq.size() > low.size()) continue;
                    if (std::equal(seq.begin(), seq.end(), low.begin() + i)) {
                        consumed = seq.size();
                        break;
                    }
                }
            }
            if (consumed) {
                ++discourse_n;
                i += consumed;
            } else {
                ++i;
            }
        }
    });

    std::int64_t title_n = 0;
    const std::string title_l = utf8::fold_case(trim(title));
    if (!title_l.empty()) {
        for (const auto& para : doc.paragraphs) {
            const std::string hay = utf8::fold_case(para.raw);
            std::size_t pos = 0;
            while ((pos = hay.find(title_l, pos)) != std::string::npos) {
                ++title_n;
                pos += title_l.size();
            }
        }
    }

    const double words = static_cast<double>(words_n);
    return {
        {"stopWord_count", static_cast<double>(stop_n)},
        {"discourseMarker_count", static_cast<double>(discourse_n)},
        {"titleRepetition_count", static_cast<double>(title_n)},
        {"titleRepetition_relative",
         words_n ? clamp01(static_cast<double>(title_n) / words) : 0.0},
        {"personalPronoun_count", static_cast<double>(pronoun_n)},
        {"personalPronoun_relative", words_n ? static_cast<double>(pronoun_n) / words : 0.0},
    };
}

NamedValues document_features(const textproc::TokenizedDocument& doc, const std::string& body) {
    std::vector<double> words_per_para, sents_per_para, words_per_sent, uniq_per_sent;
    std::vector<double> pos_per_sent;
    std::set<std::string> uniq_words;
    std::int64_t words_n = 0, punct_n = 0, quote_n = 0, special_n = 0;
    std::int64_t word_tokens = 0, upper_words = 0;

    for (const auto& para : doc.paragraphs) {
        std::int64_t para_words = 0;
        for (const auto& sent : para.sentences) {
            std::int64_t sent_words = 0;
            std::set<std::string> sent_uniq;
            std::set<textproc::PosTag> sent_tags;
            for (const auto& t : sent.tokens) {
                switch (t.kind) {
                    case textproc::TokenKind::Word: {
                        ++sent_words;
                        ++word_tokens;
                        const auto cps = utf8::decode_all(t.text);
                        bool any_cased = false, all_upper = true;
                        for (char32_t c : cps) {
                            if (utf8::is_upper(c) || utf8::is_lower(c)) {
                                any_cased = true;
                                if (!utf8::is_upper(c)) all_upper = false;
                            }
                        }
                        if (any_cased && all_upper) ++upper_words;
                        const auto folded = utf8::fold_case(t.text);
                        sent_uniq.insert(folded);
                        uniq_words.insert(folded);
                        break;
                    }
                    case textproc::TokenKind::Number: ++sent_words; break;
                    case textproc::TokenKind::Punct: ++punct_n; break;
                    case textproc::TokenKind::Quote: ++quote_n; break;
                    case textproc::TokenKind::Special: ++special_n; break;
                }
                if (t.pos) sent_tags.insert(*t.pos);
            }
            words_per_sent.push_back(static_cast<double>(sent_words));
            uniq_per_sent.push_back(static_cast<double>(sent_uniq.size()));
            pos_per_sent.push_back(static_cast<double>(sent_tags.size()));
            para_words += sent_words;
            words_n += sent_words;
        }
        words_per_para.push_back(static_cast<double>(para_words));
        sents_per_para.push_back(static_cast<double>(para.sentences.size()));
    }

    std::int64_t char_n = 0;
    for (char32_t c : utf8::decode_all(body))
        if (!utf8::is_whitespace(c)) ++char_n;

    const double words = static_cast<double>(words_n);
    return {
        {"wordsPerParagraph_mean", mean_of(words_per_para)},
        {"wordsPerParagraph_stdev", population_stdev(words_per_para)},
        {"sentencesPerParagraph_mean", mean_of(sents_per_para)},
        {"sentencesPerParagraph_stdev", population_stdev(sents_per_para)},
        {"wordsPerSentence_mean", mean_of(words_per_sent)},
        {"wordsPerSentence_stdev", population_stdev(words_per_sent)},
        {"uniqWordsPerSentence_mean", mean_of(uniq_per_sent)},
        {"uniqWordsPerSentence_stdev", population_stdev(uniq_per_sent)},
        {"words_count", words},
        {"uniqWords_count", static_cast<double>(uniq_words.size())},
        {"uniqWords_relative", words_n ? static_cast<double>(uniq_words.size()) / words : 0.0},
        {"paragraph_count", static_cast<double>(doc.paragraphs.size())},
        {"sentence_count", static_cast<double>(doc.sentence_count())},
        {"punctuation_count", static_cast<double>(punct_n)},
        {"quotation_count", static_cast<double>(quote_n)},
        {"character_count", static_cast<double>(char_n)},
        {"uppercaseWords_relative",
         word_tokens ? static_cast<double>(upper_words) / static_cast<double>(word_tokens) : 0.0},
        {"POSPerSentence_mean", mean_of(pos_per_sent)},
        {"specialChar_count", static_cast<double>(special_n)},
    };
}

NamedValues errorbased_features(const std::string& body, providers::GrammarChecker& checker,
                                Language language) {
    std::int64_t runs = 0;
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == ' ') {
            std::size_t j = i;
            while (j < body.size() && body[j] == ' ') ++j;
            if (j - i >= 2) ++runs;
            i = j;
        } else {
            ++i;
        }
    }
    return {{"grammarError_count", static_cast<double>(checker.check_grammar(body, language))},
            {"multiBlank_count", static_cast<double>(runs)}};
}

NamedValues readability_features(const textproc::TokenizedDocument& doc,
                                 const textproc::LanguagePack& pack, bool* warning) {
    const auto words = static_cast<double>(doc.word_count());
    const auto sents = static_cast<double>(doc.sentence_count());
    if (words < 1.0 || sents < 1.0) {
        if (warning) *warning = true;
        return {{"fleschReadingEase", 0.0}, {"fleschKincaidGradeLevel", 0.0}};
    }
    double syllables = 0.0;
    for_each_sentence(doc, [&](const textproc::Sentence& sent) {
        for (const auto& t : sent.tokens)
            if (t.kind == textproc::TokenKind::Word)
                syllables += static_cast<double>(textproc::count_syllables(t.text, pack));
    });
    const double wps = words / sents;
    const double spw = syllables / words;
    const double fre = 206.835 - 1.015 * wps - 84.6 * spw;
    const double fkgl = 0.39 * wps + 11.8 * spw - 15.59;
    auto clamp100 = [](double v) { return std::min(100.0, std::max(0.0, v)); };
    return {{"fleschReadingEase", clamp100(fre)}, {"fleschKincaidGradeLevel", clamp100(fkgl)}};
}

double map_feedback_response(const std::string& reply) {
    static const std::set<std::string> kYes = {"yes", "oui", "ja", "si"};
    static const std::set<std::string> kNo = {"no", "non", "nein"};
    const auto tokens = textproc::tokenize(reply);
    const std::size_t upto = std::min<std::size_t>(5, tokens.size());
    for (std::size_t i = 0; i < upto; ++i) {
        const auto w = utf8::fold_accents(utf8::fold_case(tokens[i].text));
        if (kYes.count(w)) return 1.0;
        if (kNo.count(w)) return 0.0;
    }
    return 0.5;
}

NamedValues aifeedback_feature(const std::string& body, providers::ChatFeedback& oracle,
                               Language language) {
    const auto reply = oracle.ask_chat(providers::feedback_prompt(language), body, language);
    return {{"AIFeedback", map_feedback_response(reply)}};
}

NamedValues embedding_features(const textproc::TokenizedDocument& doc,
                               providers::SentenceEmbedder& embedder, Language language) {
    std::vector<std::string> raws;
    for_each_sentence(doc, [&](const textproc::Sentence& s) { raws.push_back(s.raw); });

    const int dim = embedder.dim();
    std::vector<std::vector<double>> vecs;
    if (!raws.empty()) {
        vecs = embedder.embed_sentences(raws, language);
        if (vecs.size() != raws.size())
            throw std::runtime_error("embedding provider returned wrong count");
        for (const auto& v : vecs)
            if (static_cast<int>(v.size()) != dim)
                throw std::runtime_error("embedding provider returned wrong width");
    }

    NamedValues out;
    char name[32];
    for (int d = 0; d < dim; ++d) {
        double sum = 0.0;
        for (const auto& v : vecs) sum += v[d];
        std::snprintf(name, sizeof name, "emb_mean_%02d", d);
        out.emplace_back(name, vecs.empty() ? 0.0 : sum / static_cast<double>(vecs.size()));
    }

    auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            dot += a[i] * b[i];
            na += a[i] * a[i];
            nb += b[i] * b[i];
        }
        if (na == 0.0 && nb == 0.0) return 1.0;  // equal (zero) vectors
        if (na == 0.0 || nb == 0.0) return 0.0;
        return dot / (std::sqrt(na) * std::sqrt(nb));
    };

    double dist = 0.0;
    if (vecs.size() >= 2) {
        double sum = 0.0;
        std::int64_t pairs = 0;
        for (std::size_t i = 0; i < vecs.size(); ++i)
            for (std::size_t j = i + 1; j < vecs.size(); ++j) {
                sum += 1.0 - cosine(vecs[i], vecs[j]);
                ++pairs;
            }
        dist = sum / static_cast<double>(pairs);
    }
    out.emplace_back("embedding_dist", dist);
    return out;
}

// -------------------------------------------------------------- assembly ---

namespace {

std::vector<std::string> category_names(Category c, int embedding_dim) {
    switch (c) {
        case Category::Perplexity: return {"PPL_mean", "PPL_max"};
        case Category::Semantic: return {"sentiment_polarity", "sentiment_subjectivity"};
        case Category::ListLookup:
            return {"stopWord_count",          "discourseMarker_count",
                    "titleRepetition_count",   "titleRepetition_relative",
                    "personalPronoun_count",   "personalPronoun_relative"};
        case Category::Document:
            return {"wordsPerParagraph_mean",     "wordsPerParagraph_stdev",
                    "sentencesPerParagraph_mean", "sentencesPerParagraph_stdev",
                    "wordsPerSentence_mean",      "wordsPerSentence_stdev",
                    "uniqWordsPerSentence_mean",  "uniqWordsPerSentence_stdev",
                    "words_count",                "uniqWords_count",
                    "uniqWords_relative",         "paragraph_count",
                    "sentence_count",             "punctuation_count",
                    "quotation_count",            "character_count",
                    "uppercaseWords_relative",    "POSPerSentence_mean",
                    "specialChar_count"};
        case Category::ErrorBased: return {"grammarError_count", "multiBlank_count"};
        case Category::Readability: return {"fleschReadingEase", "fleschKincaidGradeLevel"};
        case Category::AIFeedback: return {"AIFeedback"};
        case Category::TextVector: {
            std::vector<std::string> names;
            char buf[32];
            for (std::size_t i = 0; i < FittedVectorizer::kDim; ++i) {
                std::snprintf(buf, sizeof buf, "tfidf_%03zu", i);
                names.emplace_back(buf);
            }
            for (int d = 0; d < embedding_dim; ++d) {
                std::snprintf(buf, sizeof buf, "emb_mean_%02d", d);
                names.emplace_back(buf);
            }
            names.emplace_back("embedding_dist");
            return names;
        }
    }
    throw std::logic_error("bad Category value");
}

}  // namespace

std::size_t category_width(Category c, int embedding_dim) {
    if (c == Category::TextVector)
        return FittedVectorizer::kDim + static_cast<std::size_t>(embedding_dim) + 1;
    return category_names(c, embedding_dim).size();
}

std::vector<std::string> build_manifest(const CategorySet& config, int embedding_dim) {
    std::vector<std::string> manifest;
    for (Category c : kAllCategories) {
        if (!config.count(c)) continue;
        auto names = category_names(c, embedding_dim);
        manifest.insert(manifest.end(), names.begin(), names.end());
    }
    return manifest;
}

std::string manifest_fingerprint(const std::vector<std::string>& manifest) {
    return sha256_hex(join(manifest, "\n"));
}

FeatureVector extract(const corpus::Document& doc, const textproc::TokenizedDocument& tok,
                      const CategorySet& config, const ExtractionContext& ctx) {
    if (!ctx.pack) throw std::logic_error("extract: missing language pack");

    FeatureVector fv;
    auto append = [&](const NamedValues& vals) {
        for (const auto& [name, value] : vals) {
            fv.manifest.push_back(name);
            fv.values.push_back(value);
        }
    };

    for (Category c : kAllCategories) {
        if (!config.count(c)) continue;
        switch (c) {
            case Category::Perplexity: {
                if (!ctx.perplexity) throw providers::ProviderUnavailable("provider:perplexity");
                bool warn = false;
                append(perplexity_features(tok, *ctx.perplexity, doc.language, &warn));
                fv.warning = fv.warning || warn;
                break;
            }
            case Category::Semantic: append(semantic_features(tok, *ctx.pack)); break;
            case Category::ListLookup:
                append(listlookup_features(tok, doc.title, *ctx.pack));
                break;
            case Category::Document: append(document_features(tok, doc.body)); break;
            case Category::ErrorBased:
                if (!ctx.grammar) throw providers::ProviderUnavailable("provider:grammar");
                append(errorbased_features(doc.body, *ctx.grammar, doc.language));
                break;
            case Category::Readability: {
                bool warn = false;
                append(readability_features(tok, *ctx.pack, &warn));
                fv.warning = fv.warning || warn;
                break;
            }
            case Category::AIFeedback:
                if (!ctx.chat) throw providers::ProviderUnavailable("provider:chat");
                append(aifeedback_feature(doc.body, *ctx.chat, doc.language));
                break;
            case Category::TextVector: {
                if (!ctx.vectorizer) throw std::logic_error("extract: vectorizer not fitted");
                if (!ctx.embedder) throw providers::ProviderUnavailable("provider:embedding");
                const auto tfidf = transform_tfidf(tok, *ctx.vectorizer);
                char buf[32];
                for (std::size_t i = 0; i < tfidf.size(); ++i) {
                    std::snprintf(buf, sizeof buf, "tfidf_%03zu", i);
                    fv.manifest.emplace_back(buf);
                    fv.values.push_back(tfidf[i]);
                }
                append(embedding_features(tok, *ctx.embedder, doc.language));
                break;
            }
        }
    }

    for (std::size_t i = 0; i < fv.values.size(); ++i)
        if (!std::isfinite(fv.values[i]))
            throw std::runtime_error("non-finite feature value: " + fv.manifest[i] + " in doc " +
                                     doc.id);
    return fv;
}

AssembledMatrix assemble_matrix(const std::vector<const corpus::Document*>& docs,
                                const std::vector<const textproc::TokenizedDocument*>& toks,
                                const CategorySet& config, const ExtractionContext& ctx,
                                Task task) {
    if (docs.size() != toks.size())
        throw std::logic_error("assemble_matrix: docs/tokenized size mismatch");
    const int dim = ctx.embedder ? ctx.embedder->dim() : HashedEmbedder::kDefaultDim;

    AssembledMatrix out;
    out.manifest = build_manifest(config, dim);
    out.X = Matrix(docs.size(), out.manifest.size());
    const Label positive = ai_label(task);

    for (std::size_t r = 0; r < docs.size(); ++r) {
        const auto fv = extract(*docs[r], *toks[r], config, ctx);
        if (fv.manifest != out.manifest)
            throw std::runtime_error("feature manifest mismatch for doc " + docs[r]->id);
        std::copy(fv.values.begin(), fv.values.end(), out.X.row(r));
        out.ids.push_back(docs[r]->id);
        out.y.push_back(docs[r]->label == positive ? 1 : 0);
    }
    return out;
}

AssembledMatrix slice_categories(const AssembledMatrix& master, const CategorySet& master_config,
                                 const CategorySet& want, int embedding_dim) {
    std::vector<std::size_t> keep;
    std::size_t offset = 0;
    for (Category c : kAllCategories) {
        if (!master_config.count(c)) {
            if (want.count(c))
                throw std::logic_error("slice_categories: category missing from master: " +
                                       to_string(c));
            continue;
        }
        const std::size_t width = category_width(c, embedding_dim);
        if (want.count(c))
            for (std::size_t i = 0; i < width; ++i) keep.push_back(offset + i);
        offset += width;
    }
    if (offset != master.X.cols)
        throw std::logic_error("slice_categories: master width mismatch");

    AssembledMatrix out;
    out.ids = master.ids;
    out.y = master.y;
    out.manifest.reserve(keep.size());
    for (auto c : keep) out.manifest.push_back(master.manifest[c]);
    out.X = Matrix(master.X.rows, keep.size());
    for (std::size_t r = 0; r < master.X.rows; ++r)
        for (std::size_t i = 0; i < keep.size(); ++i)
            out.X.at(r, i) = master.X.at(r, keep[i]);
    return out;
}

std::string train_fingerprint(std::vector<std::string> train_ids) {
    std::sort(train_ids.begin(), train_ids.end());
    return sha256_hex("train:" + join(train_ids, ","));
}

FittedState fit_state(const std::vector<const textproc::TokenizedDocument*>& train_docs,
                      std::vector<std::string> train_ids) {
    FittedState state;
    state.fitted_on = train_fingerprint(std::move(train_ids));
    state.vectorizer = fit_tfidf(train_docs);
    state.vectorizer.fitted_on = state.fitted_on;
    state.lm.fit(train_docs);
    return state;
}

void export_csv(const AssembledMatrix& m, const std::filesystem::path& path) {
    std::string out = "id";
    for (const auto& name : m.manifest) {
        out += ',';
        out += name;
    }
    out += ",label\n";
    for (std::size_t r = 0; r < m.X.rows; ++r) {
        out += m.ids[r];
        for (std::size_t c = 0; c < m.X.cols; ++c) {
            out += ',';
            out += format_double(m.X.at(r, c), 9);
        }
        out += ',';
        out += std::to_string(m.y[r]);
        out += '\n';
    }
    write_file_atomic(path, out);
}

void export_manifest(const std::vector<std::string>& manifest,
                     const std::filesystem::path& path) {
    std::string out;
    for (const auto& name : manifest) {
        out += name;
        out += '\n';
    }
    write_file_atomic(path, out);
}

}  // namespace veridict::features

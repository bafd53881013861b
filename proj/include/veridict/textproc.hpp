#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "veridict/lang.hpp"

namespace veridict::textproc {

enum class TokenKind { Word, Number, Punct, Quote, Special };

enum class PosTag { NOUN, VERB, ADJ, ADV, PRON, DET, ADP, CONJ, NUM, PART, INTJ, X };

std::string to_string(PosTag tag);

struct Token {
    std::string text;
    TokenKind kind;
    std::optional<PosTag> pos;
};

struct Sentence {
    std::string raw;
    std::vector<Token> tokens;
};

struct Paragraph {
    std::string raw;
    std::vector<Sentence> sentences;
};

struct TokenizedDocument {
    std::vector<Paragraph> paragraphs;

    std::size_t sentence_count() const;
    /// Word + Number tokens across the whole document.
    std::size_t word_count() const;
};

/// Per-language resources loaded from `resources/<lang>/`. Entries are
/// lowercase; multiword discourse markers keep single spaces.
struct LanguagePack {
    Language language = Language::EN;
    std::set<std::string> stop_words;
    std::set<std::string> discourse_markers;
    std::set<std::string> personal_pronouns;
    std::set<std::string> negators;
    std::map<std::string, double> polarity_lexicon;      // [-1, +1]
    std::map<std::string, double> subjectivity_lexicon;  // [0, +1]
    std::set<std::string> word_list;
    std::set<std::string> abbreviations;
    std::map<std::string, PosTag> pos_lexicon;
    std::set<char32_t> vowel_set;
};

LanguagePack load_pack(const std::filesystem::path& resources_dir, Language language);

/// Hash over the pack's source files, used as its version in run manifests.
std::string pack_fingerprint(const std::filesystem::path& resources_dir, Language language);

/// Splits on runs of blank lines (lines containing only whitespace).
/// Empty paragraphs are dropped.
std::vector<std::string> split_paragraphs(const std::string& body);

/// Rule-based splitter: breaks after . ! ? when followed by whitespace and
/// an uppercase letter, digit, opening quote, or inverted punctuation.
/// Abbreviations, single letters and digit-dotted enumerations do not end
/// sentences.
std::vector<std::string> split_sentences(const std::string& paragraph, const LanguagePack& pack);

std::vector<Token> tokenize(const std::string& sentence);

/// Tags Word and Number tokens in place; other kinds stay untagged.
void pos_tag(std::vector<Token>& sentence, const LanguagePack& pack);

/// Maximal vowel-group count, floored at 1. EN subtracts a trailing silent
/// "e" run unless the word ends in "le". Throws if the word has no letter.
int count_syllables(const std::string& word, const LanguagePack& pack);

/// Full pipeline: paragraphs -> sentences -> tokens -> POS tags.
TokenizedDocument analyze(const std::string& body, const LanguagePack& pack);

}  // namespace veridict::textproc

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "doctest.h"
#include "veridict/textproc.hpp"
#include "veridict/utf8.hpp"

using namespace veridict;
using namespace veridict::textproc;

namespace {

const LanguagePack& pack(Language lang) {
    static std::map<Language, LanguagePack> packs;
    auto it = packs.find(lang);
    if (it == packs.end()) it = packs.emplace(lang, load_pack(VERIDICT_RESOURCE_DIR, lang)).first;
    return it->second;
}

std::vector<std::string> kinds_of(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    for (const Token& t : tokens) {
        switch (t.kind) {
            case TokenKind::Word: out.push_back("Word"); break;
            case TokenKind::Number: out.push_back("Number"); break;
            case TokenKind::Punct: out.push_back("Punct"); break;
            case TokenKind::Quote: out.push_back("Quote"); break;
            case TokenKind::Special: out.push_back("Special"); break;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("case folding maps accented capitals and sharp s consistently") {
    CHECK(utf8::fold_case("Straße") == "straße");
    CHECK(utf8::fold_case("ÉTÉ") == "été");
    CHECK(utf8::fold_case("Überblick") == "überblick");
    CHECK(utf8::fold_case("L'Art") == "l'art");
}

TEST_CASE("split_paragraphs splits on blank lines and drops empties") {
    CHECK(split_paragraphs("A.\n\nB.") == std::vector<std::string>{"A.", "B."});
    CHECK(split_paragraphs("A.\n \n\nB.") == std::vector<std::string>{"A.", "B."});
    CHECK(split_paragraphs("A.") == std::vector<std::string>{"A."});
    CHECK(split_paragraphs("").empty());
    CHECK(split_paragraphs("\n\n \n").empty());
}

TEST_CASE("split_sentences applies the uppercase-follow rule") {
    const auto& en = pack(Language::EN);
    CHECK(split_sentences("I ran. He sat.", en) ==
          std::vector<std::string>{"I ran.", "He sat."});
    // "dr" is in the EN abbreviation list, so no break after "Dr."
    CHECK(split_sentences("Dr. Smith ran.", en) == std::vector<std::string>{"Dr. Smith ran."});
    const auto& es = pack(Language::ES);
    CHECK(split_sentences("¿Qué? Sí.", es) == std::vector<std::string>{"¿Qué?", "Sí."});
}

TEST_CASE("split_sentences keeps single letters and enumerations attached") {
    const auto& en = pack(Language::EN);
    CHECK(split_sentences("J. Smith ran. He sat.", en).size() == 2);
    // a bare digit before the period reads as an enumeration marker
    CHECK(split_sentences("See item 3. Then stop.", en).size() == 1);
    CHECK(split_sentences("It was 1995. Later it changed.", en).size() == 1);
    // lowercase after the period -> no break
    CHECK(split_sentences("the end. and more", en).size() == 1);
    // a digit after the break point still starts a sentence
    CHECK(split_sentences("It ended. 1995 was next.", en).size() == 2);
}

TEST_CASE("tokenize covers the frozen examples") {
    auto toks = tokenize("L'art, vite!");
    REQUIRE(toks.size() == 4);
    CHECK(toks[0].text == "L'art");
    CHECK(toks[1].text == ",");
    CHECK(toks[2].text == "vite");
    CHECK(toks[3].text == "!");
    CHECK(kinds_of(toks) == std::vector<std::string>{"Word", "Punct", "Word", "Punct"});

    toks = tokenize("3.14 m²");
    REQUIRE(toks.size() == 3);
    CHECK(toks[0].text == "3.14");
    CHECK(toks[0].kind == TokenKind::Number);
    CHECK(toks[1].text == "m");
    CHECK(toks[1].kind == TokenKind::Word);
    CHECK(toks[2].text == "²");
    CHECK(toks[2].kind == TokenKind::Special);

    CHECK(tokenize("").empty());
}

TEST_CASE("tokenize keeps hyphenated compounds and quotes separate") {
    auto toks = tokenize("well-known \"quote\"");
    REQUIRE(toks.size() == 4);
    CHECK(toks[0].text == "well-known");
    CHECK(toks[0].kind == TokenKind::Word);
    CHECK(toks[1].kind == TokenKind::Quote);
    CHECK(toks[2].text == "quote");
    CHECK(toks[3].kind == TokenKind::Quote);
}

TEST_CASE("tokenize totality: every non-whitespace char lands in one token") {
    const std::string inputs[] = {"L'art, vite!", "3.14 m² and «more»… 42,000 well-known",
                                  "A  b   c.", "¿Qué? ¡Sí! \"q\" 'r'"};
    for (const std::string& s : inputs) {
        std::size_t non_ws = 0;
        for (unsigned char c : s)
            if (!std::isspace(c)) ++non_ws;
        // multibyte chars: count bytes, not codepoints
        std::size_t covered = 0;
        for (const Token& t : tokenize(s)) covered += t.text.size();
        CHECK(covered == non_ws);
    }
}

TEST_CASE("tokenize idempotence over joined token texts") {
    const std::string inputs[] = {"L'art, vite!", "3.14 m75 x", "a-b c'd 12.5 !?"};
    for (const std::string& s : inputs) {
        auto first = tokenize(s);
        std::string joined;
        for (const Token& t : first) {
            if (!joined.empty()) joined += " ";
            joined += t.text;
        }
        auto second = tokenize(joined);
        REQUIRE(second.size() == first.size());
        for (std::size_t i = 0; i < first.size(); ++i) {
            CHECK(second[i].text == first[i].text);
            CHECK(second[i].kind == first[i].kind);
        }
    }
}

TEST_CASE("pos_tag uses lexicon, heuristics, capitalization, and NUM") {
    const auto& en = pack(Language::EN);
    auto toks = tokenize("the cat sat on 42 mats");
    pos_tag(toks, en);
    CHECK(toks[0].pos == PosTag::DET);   // lexicon
    CHECK(toks[4].pos == PosTag::NUM);   // number

    const auto& de = pack(Language::DE);
    auto detoks = tokenize("wir sehen das Haus dort");
    pos_tag(detoks, de);
    CHECK(detoks[3].text == "Haus");
    CHECK(detoks[3].pos == PosTag::NOUN);  // mid-sentence capitalization rule

    // every Word/Number token carries a tag
    for (const Token& t : detoks) {
        if (t.kind == TokenKind::Word || t.kind == TokenKind::Number) CHECK(t.pos.has_value());
    }
}

TEST_CASE("count_syllables frozen examples and floor") {
    const auto& en = pack(Language::EN);
    CHECK(count_syllables("cat", en) == 1);
    CHECK(count_syllables("table", en) == 2);  // silent-e exempt after "le"
    CHECK(count_syllables("make", en) == 1);   // trailing silent e subtracted
    CHECK(count_syllables("rhythm", en) == 1); // y counts; floor at 1 regardless
    const auto& de = pack(Language::DE);
    CHECK(count_syllables("Straße", de) == 2);
    CHECK_THROWS(count_syllables("123", en));
}

TEST_CASE("count_syllables >= 1 for anything with a letter") {
    const auto& en = pack(Language::EN);
    for (const char* w : {"a", "b", "xyz", "strengths", "queue", "e"})
        CHECK(count_syllables(w, en) >= 1);
}

TEST_CASE("analyze reassembles counts consistently") {
    const auto& en = pack(Language::EN);
    TokenizedDocument doc = analyze("Aa bb.\n\nCc dd. Ee ff.", en);
    CHECK(doc.paragraphs.size() == 2);
    CHECK(doc.sentence_count() == 3);
    CHECK(doc.word_count() == 6);

    // single-letter finals glue their sentences together
    TokenizedDocument glued = analyze("A b.\n\nC d.", en);
    CHECK(glued.paragraphs.size() == 2);
    CHECK(glued.sentence_count() == 2);
    CHECK(glued.word_count() == 4);
}

TEST_CASE("language packs load with nonempty sets for all four languages") {
    for (Language lang : kAllLanguages) {
        const auto& p = pack(lang);
        CHECK(!p.stop_words.empty());
        CHECK(!p.discourse_markers.empty());
        CHECK(!p.personal_pronouns.empty());
        CHECK(!p.negators.empty());
        CHECK(!p.polarity_lexicon.empty());
        CHECK(!p.subjectivity_lexicon.empty());
        CHECK(!p.word_list.empty());
        CHECK(!p.abbreviations.empty());
        CHECK(!p.pos_lexicon.empty());
        CHECK(!p.vowel_set.empty());
        for (const auto& [word, score] : p.polarity_lexicon) {
            CHECK(score >= -1.0);
            CHECK(score <= 1.0);
        }
        for (const auto& [word, score] : p.subjectivity_lexicon) {
            CHECK(score >= 0.0);
            CHECK(score <= 1.0);
        }
    }
}

TEST_CASE("pack fingerprints are stable and language-distinct") {
    const std::string a = pack_fingerprint(VERIDICT_RESOURCE_DIR, Language::EN);
    const std::string b = pack_fingerprint(VERIDICT_RESOURCE_DIR, Language::EN);
    const std::string c = pack_fingerprint(VERIDICT_RESOURCE_DIR, Language::FR);
    CHECK(a == b);
    CHECK(a != c);
}

#include "veridict/textproc.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "veridict/utf8.hpp"
#include "veridict/util.hpp"

namespace veridict::textproc {

namespace {

bool is_punct_char(char32_t cp) {
    switch (cp) {
        case U'.': case U',': case U';': case U':': case U'!': case U'?':
        case 0xBF:    // ¿
        case 0xA1:    // ¡
        case 0x2014:  // —
        case 0x2013:  // –
        case U'-':
            return true;
        default:
            return false;
    }
}

bool is_quote_char(char32_t cp) {
    switch (cp) {
        case U'"': case U'\'':
        case 0xAB: case 0xBB:              // « »
        case 0x201E: case 0x201C: case 0x201D:  // „ “ ”
        case 0x2018: case 0x2019:          // ‘ ’
            return true;
        default:
            return false;
    }
}

bool is_opening_quote(char32_t cp) {
    switch (cp) {
        case U'"': case U'\'':
        case 0xAB:    // «
        case 0x201E:  // „
        case 0x201C:  // “
        case 0x2018:  // ‘
            return true;
        default:
            return false;
    }
}

bool is_apostrophe(char32_t cp) {
    return cp == U'\'' || cp == 0x2019;
}

std::set<std::string> load_word_set(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("missing resource file: " + file.string());
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto entry = trim(line);
        if (entry.empty() || entry[0] == '#') continue;
        out.insert(utf8::fold_case(entry));
    }
    if (out.empty()) throw std::runtime_error("empty resource file: " + file.string());
    return out;
}

std::map<std::string, double> load_scored_lexicon(const std::filesystem::path& file, double lo,
                                                  double hi) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("missing resource file: " + file.string());
    std::map<std::string, double> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto entry = trim(line);
        if (entry.empty() || entry[0] == '#') continue;
        auto tab = entry.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                                     ": expected word<TAB>score");
        }
        const std::string word = utf8::fold_case(trim(entry.substr(0, tab)));
        const double score = std::stod(entry.substr(tab + 1));
        if (score < lo || score > hi) {
            throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                                     ": score out of range");
        }
        out[word] = score;
    }
    if (out.empty()) throw std::runtime_error("empty resource file: " + file.string());
    return out;
}

PosTag parse_pos_tag(const std::string& s) {
    static const std::map<std::string, PosTag> table = {
        {"NOUN", PosTag::NOUN}, {"VERB", PosTag::VERB}, {"ADJ", PosTag::ADJ},
        {"ADV", PosTag::ADV},   {"PRON", PosTag::PRON}, {"DET", PosTag::DET},
        {"ADP", PosTag::ADP},   {"CONJ", PosTag::CONJ}, {"NUM", PosTag::NUM},
        {"PART", PosTag::PART}, {"INTJ", PosTag::INTJ}, {"X", PosTag::X},
    };
    auto it = table.find(s);
    if (it == table.end()) throw std::runtime_error("unknown POS tag: " + s);
    return it->second;
}

const char* kPackFiles[] = {"stopwords.txt", "discourse.txt", "pronouns.txt", "negators.txt",
                            "polarity.tsv",  "subjectivity.tsv", "words.txt", "abbrev.txt",
                            "pos.tsv",       "vowels.txt"};

std::string lang_dir(Language language) {
    auto s = to_string(language);
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

std::string to_string(PosTag tag) {
    switch (tag) {
        case PosTag::NOUN: return "NOUN";
        case PosTag::VERB: return "VERB";
        case PosTag::ADJ: return "ADJ";
        case PosTag::ADV: return "ADV";
        case PosTag::PRON: return "PRON";
        case PosTag::DET: return "DET";
        case PosTag::ADP: return "ADP";
        case PosTag::CONJ: return "CONJ";
        case PosTag::NUM: return "NUM";
        case PosTag::PART: return "PART";
        case PosTag::INTJ: return "INTJ";
        case PosTag::X: return "X";
    }
    throw std::logic_error("bad PosTag value");
}

std::size_t TokenizedDocument::sentence_count() const {
    std::size_t n = 0;
    for (const auto& p : paragraphs) n += p.sentences.size();
    return n;
}

std::size_t TokenizedDocument::word_count() const {
    std::size_t n = 0;
    for (const auto& p : paragraphs) {
        for (const auto& s : p.sentences) {
            for (const auto& t : s.tokens) {
                if (t.kind == TokenKind::Word || t.kind == TokenKind::Number) ++n;
            }
        }
    }
    return n;
}

LanguagePack load_pack(const std::filesystem::path& resources_dir, Language language) {
    const auto dir = resources_dir / lang_dir(language);
    LanguagePack pack;
    pack.language = language;
    pack.stop_words = load_word_set(dir / "stopwords.txt");
    pack.discourse_markers = load_word_set(dir / "discourse.txt");
    pack.personal_pronouns = load_word_set(dir / "pronouns.txt");
    pack.negators = load_word_set(dir / "negators.txt");
    pack.polarity_lexicon = load_scored_lexicon(dir / "polarity.tsv", -1.0, 1.0);
    pack.subjectivity_lexicon = load_scored_lexicon(dir / "subjectivity.tsv", 0.0, 1.0);
    pack.word_list = load_word_set(dir / "words.txt");
    pack.abbreviations = load_word_set(dir / "abbrev.txt");

    std::ifstream pos_in(dir / "pos.tsv");
    if (!pos_in) throw std::runtime_error("missing resource file: " + (dir / "pos.tsv").string());
    std::string line;
    int lineno = 0;
    while (std::getline(pos_in, line)) {
        ++lineno;
        auto entry = trim(line);
        if (entry.empty() || entry[0] == '#') continue;
        auto tab = entry.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("pos.tsv:" + std::to_string(lineno) +
                                     ": expected word<TAB>TAG");
        }
        pack.pos_lexicon[utf8::fold_case(trim(entry.substr(0, tab)))] =
            parse_pos_tag(trim(entry.substr(tab + 1)));
    }
    if (pack.pos_lexicon.empty()) {
        throw std::runtime_error("empty resource file: " + (dir / "pos.tsv").string());
    }

    for (const auto& vline : load_word_set(dir / "vowels.txt")) {
        for (char32_t cp : utf8::decode_all(vline)) pack.vowel_set.insert(cp);
    }
    return pack;
}

std::string pack_fingerprint(const std::filesystem::path& resources_dir, Language language) {
    const auto dir = resources_dir / lang_dir(language);
    std::string acc;
    for (const char* name : kPackFiles) {
        acc += name;
        acc += ':';
        acc += sha256_file_hex(dir / name);
        acc += '\n';
    }
    return sha256_hex(acc);
}

std::vector<std::string> split_paragraphs(const std::string& body) {
    std::vector<std::string> paragraphs;
    std::string current;
    std::istringstream in(body);
    std::string line;
    auto flush = [&] {
        auto p = trim(current);
        if (!p.empty()) paragraphs.push_back(std::move(p));
        current.clear();
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) {
            flush();
        } else {
            if (!current.empty()) current += '\n';
            current += line;
        }
    }
    flush();
    return paragraphs;
}

namespace {

/// Word immediately before cps[pos] (exclusive), as lowercase UTF-8.
std::string preceding_word(const std::u32string& cps, std::size_t pos) {
    std::size_t end = pos;
    std::size_t begin = end;
    while (begin > 0) {
        const char32_t cp = cps[begin - 1];
        if (utf8::is_letter(cp) || utf8::is_digit(cp)) {
            --begin;
        } else {
            break;
        }
    }
    std::u32string w = cps.substr(begin, end - begin);
    std::string out;
    for (char32_t cp : w) utf8::encode(utf8::to_lower(cp), out);
    return out;
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& paragraph, const LanguagePack& pack) {
    const std::u32string cps = utf8::decode_all(paragraph);
    std::vector<std::string> sentences;
    std::size_t start = 0;

    auto emit = [&](std::size_t begin, std::size_t end) {
        std::string s = trim(utf8::encode_all(cps.substr(begin, end - begin)));
        if (!s.empty()) sentences.push_back(std::move(s));
    };

    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t cp = cps[i];
        if (cp != U'.' && cp != U'!' && cp != U'?') continue;

        std::size_t j = i + 1;
        // Trailing closing quotes stay with the sentence.
        while (j < cps.size() && is_quote_char(cps[j]) && !is_opening_quote(cps[j])) ++j;
        std::size_t after_ws = j;
        while (after_ws < cps.size() && utf8::is_whitespace(cps[after_ws])) ++after_ws;
        if (after_ws == j || after_ws >= cps.size()) continue;  // no whitespace follows

        const char32_t next = cps[after_ws];
        const bool starts_sentence = utf8::is_upper(next) || utf8::is_digit(next) ||
                                     is_opening_quote(next) || next == 0xBF || next == 0xA1;
        if (!starts_sentence) continue;

        if (cp == U'.') {
            const std::string prev = preceding_word(cps, i);
            if (pack.abbreviations.count(prev) > 0) continue;
            if (utf8::count_codepoints(prev) == 1 && !all_digits(prev)) continue;
            if (all_digits(prev)) continue;  // "1." enumeration
        }
        emit(start, j);
        start = after_ws;
        i = after_ws - 1;
    }
    emit(start, cps.size());
    return sentences;
}

std::vector<Token> tokenize(const std::string& sentence) {
    const std::u32string cps = utf8::decode_all(sentence);
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = cps.size();

    auto push = [&](std::size_t begin, std::size_t end, TokenKind kind) {
        tokens.push_back(Token{utf8::encode_all(cps.substr(begin, end - begin)), kind, {}});
    };

    while (i < n) {
        const char32_t cp = cps[i];
        if (utf8::is_whitespace(cp)) {
            ++i;
            continue;
        }
        if (utf8::is_letter(cp)) {
            std::size_t begin = i++;
            while (i < n) {
                if (utf8::is_letter(cps[i])) {
                    ++i;
                } else if ((is_apostrophe(cps[i]) || cps[i] == U'-') && i + 1 < n &&
                           utf8::is_letter(cps[i + 1])) {
                    i += 2;  // internal apostrophe/hyphen plus the letter after it
                } else {
                    break;
                }
            }
            push(begin, i, TokenKind::Word);
            continue;
        }
        if (utf8::is_digit(cp)) {
            std::size_t begin = i++;
            while (i < n) {
                if (utf8::is_digit(cps[i])) {
                    ++i;
                } else if ((cps[i] == U'.' || cps[i] == U',') && i + 1 < n &&
                           utf8::is_digit(cps[i + 1])) {
                    i += 2;
                } else {
                    break;
                }
            }
            push(begin, i, TokenKind::Number);
            continue;
        }
        if (is_quote_char(cp)) {
            push(i, i + 1, TokenKind::Quote);
        } else if (is_punct_char(cp)) {
            push(i, i + 1, TokenKind::Punct);
        } else {
            push(i, i + 1, TokenKind::Special);
        }
        ++i;
    }
    return tokens;
}

namespace {

PosTag suffix_heuristic(const std::string& lower, Language language) {
    auto ends = [&](std::string_view suf) {
        return lower.size() >= suf.size() &&
               lower.compare(lower.size() - suf.size(), suf.size(), suf) == 0;
    };
    switch (language) {
        case Language::EN:
            if (ends("ly")) return PosTag::ADV;
            if (ends("ing") || ends("ed") || ends("ize") || ends("ise")) return PosTag::VERB;
            if (ends("ous") || ends("ful") || ends("ive") || ends("able") || ends("al") ||
                ends("ic"))
                return PosTag::ADJ;
            if (ends("tion") || ends("ness") || ends("ment") || ends("ity") || ends("ism") ||
                ends("er") || ends("ist"))
                return PosTag::NOUN;
            break;
        case Language::FR:
            if (ends("ment") && lower.size() > 5) return PosTag::ADV;
            if (ends("tion") || ends("sion") || ends("té") || ends("isme") || ends("eur") ||
                ends("age"))
                return PosTag::NOUN;
            if (ends("eux") || ends("euse") || ends("ique") || ends("ive") || ends("able") ||
                ends("elle"))
                return PosTag::ADJ;
            if (ends("er") || ends("ir") || ends("ait") || ends("ent") || ends("ons"))
                return PosTag::VERB;
            break;
        case Language::DE:
            if (ends("ung") || ends("heit") || ends("keit") || ends("schaft") || ends("tät") ||
                ends("chen"))
                return PosTag::NOUN;
            if (ends("lich") || ends("ig") || ends("isch") || ends("sam") || ends("bar"))
                return PosTag::ADJ;
            if (ends("en") || ends("st") || ends("te") || ends("iert")) return PosTag::VERB;
            break;
        case Language::ES:
            if (ends("mente")) return PosTag::ADV;
            if (ends("ción") || ends("dad") || ends("ismo") || ends("ura") || ends("aje"))
                return PosTag::NOUN;
            if (ends("oso") || ends("osa") || ends("ivo") || ends("iva") || ends("able") ||
                ends("ante"))
                return PosTag::ADJ;
            if (ends("ar") || ends("er") || ends("ir") || ends("aba") || ends("aron"))
                return PosTag::VERB;
            break;
    }
    return PosTag::X;
}

}  // namespace

void pos_tag(std::vector<Token>& sentence, const LanguagePack& pack) {
    for (std::size_t idx = 0; idx < sentence.size(); ++idx) {
        Token& tok = sentence[idx];
        if (tok.kind == TokenKind::Number) {
            tok.pos = PosTag::NUM;
            continue;
        }
        if (tok.kind != TokenKind::Word) continue;

        const std::string lower = utf8::fold_case(tok.text);
        if (auto it = pack.pos_lexicon.find(lower); it != pack.pos_lexicon.end()) {
            tok.pos = it->second;
            continue;
        }
        if (PosTag tag = suffix_heuristic(lower, pack.language); tag != PosTag::X) {
            tok.pos = tag;
            continue;
        }
        std::size_t p = 0;
        const char32_t first = utf8::decode(tok.text, p);
        if (idx > 0 && utf8::is_upper(first)) {
            tok.pos = PosTag::NOUN;
            continue;
        }
        tok.pos = PosTag::X;
    }
}

int count_syllables(const std::string& word, const LanguagePack& pack) {
    std::u32string cps;
    for (char32_t cp : utf8::decode_all(word)) cps.push_back(utf8::to_lower(cp));
    const bool has_letter =
        std::any_of(cps.begin(), cps.end(), [](char32_t c) { return utf8::is_letter(c); });
    if (!has_letter) throw std::invalid_argument("count_syllables: no letter in input: " + word);

    if (pack.language == Language::EN && cps.size() >= 2 && cps.back() == U'e') {
        const bool ends_le = cps[cps.size() - 2] == U'l';
        if (!ends_le) {
            while (!cps.empty() && cps.back() == U'e') cps.pop_back();
        }
    }

    int groups = 0;
    bool in_group = false;
    for (char32_t cp : cps) {
        if (pack.vowel_set.count(cp) > 0) {
            if (!in_group) {
                ++groups;
                in_group = true;
            }
        } else {
            in_group = false;
        }
    }
    return std::max(groups, 1);
}

TokenizedDocument analyze(const std::string& body, const LanguagePack& pack) {
    TokenizedDocument doc;
    for (auto& para_text : split_paragraphs(body)) {
        Paragraph para;
        para.raw = para_text;
        for (auto& sent_text : split_sentences(para_text, pack)) {
            Sentence sent;
            sent.raw = sent_text;
            sent.tokens = tokenize(sent_text);
            pos_tag(sent.tokens, pack);
            para.sentences.push_back(std::move(sent));
        }
        doc.paragraphs.push_back(std::move(para));
    }
    return doc;
}

}  // namespace veridict::textproc

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "veridict/corpus.hpp"
#include "veridict/syncorpus.hpp"
#include "veridict/utf8.hpp"
#include "veridict/util.hpp"

using namespace veridict;
using namespace veridict::corpus;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("veridict_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

Document make_doc(std::string id, Language lang, std::string topic, Label label) {
    Document d;
    d.id = std::move(id);
    d.language = lang;
    d.topic = std::move(topic);
    d.label = label;
    d.title = "Title";
    d.body = "Alpha beta gamma. Delta epsilon.\n\nZeta eta theta.";
    return d;
}

/// 100 docs per label over 10 topics, mirroring the benchmark cell shape.
std::vector<Document> two_class_corpus(Language lang, Label ai_label) {
    std::vector<Document> docs;
    for (int t = 0; t < 10; ++t) {
        for (int i = 0; i < 10; ++i) {
            const std::string topic(kTopics[static_cast<std::size_t>(t)]);
            std::string suffix = topic + "_" + std::to_string(i);
            docs.push_back(make_doc("h-" + suffix, lang, topic, Label::Human));
            docs.push_back(make_doc("a-" + suffix, lang, topic, ai_label));
        }
    }
    return docs;
}

const PackSet& packs() {
    static const PackSet p = load_packs(VERIDICT_RESOURCE_DIR);
    return p;
}

}  // namespace

TEST_CASE("jsonl line maps directly onto a Document") {
    auto dir = temp_dir("jsonl_map");
    const char* line =
        R"({"id":"en-h-001","language":"EN","topic":"biology","label":"Human","title":"T","body":"A.\n\nB."})";
    write_file(dir / "c.jsonl", std::string(line) + "\n");
    auto docs = load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].id == "en-h-001");
    CHECK(docs[0].language == Language::EN);
    CHECK(docs[0].topic == "biology");
    CHECK(docs[0].label == Label::Human);
    CHECK(docs[0].title == "T");
    CHECK(docs[0].body == "A.\n\nB.");
}

TEST_CASE("empty jsonl file loads as an empty corpus") {
    auto dir = temp_dir("jsonl_empty");
    write_file(dir / "c.jsonl", "");
    CHECK(load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl).empty());
}

TEST_CASE("duplicate ids are rejected with the line number") {
    auto dir = temp_dir("jsonl_dup");
    std::string line =
        R"({"id":"x","language":"EN","topic":"biology","label":"Human","title":"","body":"A."})";
    write_file(dir / "c.jsonl", line + "\n" + line + "\n");
    CHECK_THROWS_WITH_AS(load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl),
                         doctest::Contains("2"), std::runtime_error);
}

TEST_CASE("malformed jsonl names the offending line") {
    auto dir = temp_dir("jsonl_bad");
    write_file(dir / "c.jsonl",
               R"({"id":"a","language":"EN","topic":"biology","label":"Human","title":"","body":"A."})"
               "\nnot json\n");
    CHECK_THROWS_WITH_AS(load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl),
                         doctest::Contains("2"), std::runtime_error);
}

TEST_CASE("unknown language or label raises") {
    auto dir = temp_dir("jsonl_lang");
    write_file(dir / "c.jsonl",
               R"({"id":"a","language":"XX","topic":"biology","label":"Human","title":"","body":"A."})"
               "\n");
    CHECK_THROWS(load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl));
}

TEST_CASE("line endings normalize to \\n") {
    auto dir = temp_dir("jsonl_crlf");
    write_file(dir / "c.jsonl",
               R"({"id":"a","language":"EN","topic":"biology","label":"Human","title":"","body":"A.\r\n\r\nB."})"
               "\n");
    auto docs = load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].body == "A.\n\nB.");
}

TEST_CASE("jsonl round trip preserves documents exactly") {
    auto dir = temp_dir("jsonl_rt");
    std::vector<Document> docs = two_class_corpus(Language::FR, Label::AIGenerated);
    docs[0].body = "Accents: été straße.\n\nSecond.";
    write_jsonl(docs, dir / "c.jsonl");
    auto loaded = load_corpus(dir / "c.jsonl", CorpusFormat::Jsonl);
    REQUIRE(loaded.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) CHECK(loaded[i] == docs[i]);
}

TEST_CASE("directory round trip preserves documents and ids") {
    auto dir = temp_dir("dir_rt");
    // generator-style ids so file naming and ids agree
    std::vector<Document> docs;
    for (int i = 0; i < 3; ++i) {
        char nn[8];
        std::snprintf(nn, sizeof nn, "%02d", i);
        docs.push_back(make_doc("en-human-visual_arts_" + std::string(nn), Language::EN,
                                "visual arts", Label::Human));
        docs.back().body = "Par one line.\n\nPar two line " + std::to_string(i) + ".";
    }
    write_directory(docs, dir / "corpus");
    auto loaded = load_corpus(dir / "corpus", CorpusFormat::Directory);
    REQUIRE(loaded.size() == docs.size());
    std::sort(loaded.begin(), loaded.end(),
              [](const Document& a, const Document& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < docs.size(); ++i) CHECK(loaded[i] == docs[i]);
}

TEST_CASE("format sniffing picks directory for directories") {
    auto dir = temp_dir("sniff");
    std::vector<Document> docs = {make_doc("en-human-biology_00", Language::EN, "biology",
                                           Label::Human)};
    write_directory(docs, dir / "corpus");
    CHECK(load_corpus(dir / "corpus").size() == 1);
    write_jsonl(docs, dir / "c.jsonl");
    CHECK(load_corpus(dir / "c.jsonl").size() == 1);
}

TEST_CASE("corpus_stats counts the frozen two-paragraph example") {
    Document d = make_doc("a", Language::EN, "biology", Label::Human);
    d.body = "Aa bb.\n\nCc dd.";
    auto stats = corpus_stats({d}, packs());
    const CellStats& s = stats.at({Language::EN, Label::Human});
    CHECK(s.documents == 1);
    CHECK(s.paragraphs == 2);
    CHECK(s.sentences == 2);
    CHECK(s.words == 4);
}

TEST_CASE("corpus_stats on an empty corpus is empty") {
    CHECK(corpus_stats({}, packs()).empty());
}

TEST_CASE("validate_corpus flags duplicates, empty bodies, and foreign topics") {
    std::vector<Document> docs = {make_doc("a", Language::EN, "biology", Label::Human),
                                  make_doc("a", Language::EN, "biology", Label::Human)};
    auto violations = validate_corpus(docs);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("duplicate") != std::string::npos);

    docs[1].id = "b";
    docs[1].body = "   ";
    violations = validate_corpus(docs);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("empty body") != std::string::npos);

    docs[1].body = "Fine.";
    docs[1].topic = "astrology";
    CHECK(validate_corpus(docs, false).empty());
    violations = validate_corpus(docs, true);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("topic") != std::string::npos);
}

TEST_CASE("make_split produces a stratified 160/20/20 partition") {
    auto docs = two_class_corpus(Language::EN, Label::AIGenerated);
    SplitPlan plan = make_split(docs, Task::Generated, Language::EN, 0);
    CHECK(plan.train_ids.size() == 160);
    CHECK(plan.val_ids.size() == 20);
    CHECK(plan.test_ids.size() == 20);

    std::set<std::string> all;
    all.insert(plan.train_ids.begin(), plan.train_ids.end());
    all.insert(plan.val_ids.begin(), plan.val_ids.end());
    all.insert(plan.test_ids.begin(), plan.test_ids.end());
    CHECK(all.size() == 200);  // disjoint and covering

    // per-class balance: both classes appear 10x in test
    auto count_class = [&](const std::vector<std::string>& ids, char prefix) {
        return std::count_if(ids.begin(), ids.end(),
                             [&](const std::string& id) { return id[0] == prefix; });
    };
    CHECK(count_class(plan.test_ids, 'h') == 10);
    CHECK(count_class(plan.test_ids, 'a') == 10);
    CHECK(count_class(plan.val_ids, 'h') == 10);
    CHECK(count_class(plan.val_ids, 'a') == 10);
}

TEST_CASE("make_split fraction invariants hold across seeds") {
    auto docs = two_class_corpus(Language::DE, Label::AIRephrased);
    for (int seed : {0, 1, 2, 3, 4}) {
        SplitPlan plan = make_split(docs, Task::Rephrased, Language::DE, seed);
        const double n = 200.0;
        CHECK(plan.train_ids.size() / n >= 0.78);
        CHECK(plan.train_ids.size() / n <= 0.82);
        CHECK(plan.val_ids.size() / n >= 0.08);
        CHECK(plan.val_ids.size() / n <= 0.12);
        CHECK(plan.test_ids.size() / n >= 0.08);
        CHECK(plan.test_ids.size() / n <= 0.12);
    }
}

TEST_CASE("make_split is deterministic and seed-sensitive") {
    auto docs = two_class_corpus(Language::ES, Label::AIGenerated);
    SplitPlan a = make_split(docs, Task::Generated, Language::ES, 0);
    SplitPlan b = make_split(docs, Task::Generated, Language::ES, 0);
    CHECK(a.train_ids == b.train_ids);
    CHECK(a.val_ids == b.val_ids);
    CHECK(a.test_ids == b.test_ids);
    CHECK(split_fingerprint(a) == split_fingerprint(b));

    SplitPlan c = make_split(docs, Task::Generated, Language::ES, 1);
    CHECK(a.test_ids != c.test_ids);
    CHECK(split_fingerprint(a) != split_fingerprint(c));
}

TEST_CASE("make_split selects only the task's two labels and the language") {
    auto docs = two_class_corpus(Language::EN, Label::AIGenerated);
    auto extra = two_class_corpus(Language::FR, Label::AIGenerated);
    for (auto& d : extra) d.id = "fr-" + d.id;
    docs.insert(docs.end(), extra.begin(), extra.end());
    for (int i = 0; i < 20; ++i)
        docs.push_back(make_doc("reph-" + std::to_string(i), Language::EN,
                                "biology", Label::AIRephrased));

    SplitPlan plan = make_split(docs, Task::Generated, Language::EN, 0);
    std::set<std::string> all;
    all.insert(plan.train_ids.begin(), plan.train_ids.end());
    all.insert(plan.val_ids.begin(), plan.val_ids.end());
    all.insert(plan.test_ids.begin(), plan.test_ids.end());
    CHECK(all.size() == 200);
    for (const std::string& id : all) {
        CHECK(id.rfind("fr-", 0) != 0);
        CHECK(id.rfind("reph-", 0) != 0);
    }
}

TEST_CASE("make_split refuses classes below 10 documents") {
    std::vector<Document> docs;
    for (int i = 0; i < 9; ++i)
        docs.push_back(make_doc("h" + std::to_string(i), Language::EN, "biology", Label::Human));
    for (int i = 0; i < 30; ++i)
        docs.push_back(
            make_doc("a" + std::to_string(i), Language::EN, "biology", Label::AIGenerated));
    CHECK_THROWS(make_split(docs, Task::Generated, Language::EN, 0));
}

// ------------------------------------------------------- generated corpus --

TEST_CASE("generated corpus hits the published cell totals exactly") {
    auto docs = syncorpus::generate(packs(), 0);
    CHECK(docs.size() == 1200);
    auto stats = corpus_stats(docs, packs());
    for (Language lang : kAllLanguages) {
        for (Label label : {Label::Human, Label::AIGenerated, Label::AIRephrased}) {
            const auto targets = syncorpus::targets_for(lang, label);
            const CellStats& s = stats.at({lang, label});
            CHECK(s.documents == targets.documents);
            CHECK(s.paragraphs == targets.paragraphs);
            CHECK(s.sentences == targets.sentences);
            CHECK(s.words == targets.words);
        }
    }
}

TEST_CASE("generated corpus is valid, complete, and deterministic") {
    auto docs = syncorpus::generate(packs(), 0);
    CHECK(validate_corpus(docs, true).empty());
    auto again = syncorpus::generate(packs(), 0);
    REQUIRE(again.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) CHECK(again[i] == docs[i]);
    auto other = syncorpus::generate(packs(), 1);
    CHECK(other != docs);

    // 10 docs per (language, label, topic)
    std::map<std::tuple<Language, Label, std::string>, int> cells;
    for (const auto& d : docs) ++cells[{d.language, d.label, d.topic}];
    CHECK(cells.size() == 4 * 3 * 10);
    for (const auto& [cell, n] : cells) CHECK(n == 10);
}

TEST_CASE("generator vocabulary is covered by the spelling dictionaries") {
    for (Language lang : kAllLanguages) {
        const auto& dict = packs().at(lang).word_list;
        for (const std::string& w : syncorpus::vocabulary(lang)) {
            CAPTURE(w);
            CHECK(dict.count(utf8::fold_case(w)) == 1);
        }
        for (const std::string& a : syncorpus::acronym_pool(lang)) {
            CAPTURE(a);
            CHECK(dict.count(utf8::fold_case(a)) == 0);
        }
    }
}

TEST_CASE("partition_exact preserves totals and respects the floor") {
    Rng rng(7);
    for (auto [total, n, min_each, jitter] :
         {std::tuple<int, int, int, double>{415, 100, 1, 0.8},
          {1700, 415, 2, 0.7},
          {38300, 1700, 5, 0.55},
          {157, 100, 1, 0.4},
          {100, 100, 1, 0.9}}) {
        auto parts = syncorpus::partition_exact(total, n, min_each, jitter, rng);
        REQUIRE(static_cast<int>(parts.size()) == n);
        int sum = 0;
        for (int p : parts) {
            CHECK(p >= min_each);
            sum += p;
        }
        CHECK(sum == total);
    }
    CHECK_THROWS(syncorpus::partition_exact(5, 10, 1, 0.0, rng));
}

TEST_CASE("generated corpus round trips through both formats") {
    auto docs = syncorpus::generate(packs(), 0);
    auto dir = temp_dir("syn_rt");
    write_jsonl(docs, dir / "c.jsonl");
    auto loaded = load_corpus(dir / "c.jsonl");
    REQUIRE(loaded.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) CHECK(loaded[i] == docs[i]);

    write_directory(docs, dir / "corpus");
    auto from_dir = load_corpus(dir / "corpus");
    REQUIRE(from_dir.size() == docs.size());
    std::map<std::string, const Document*> by_id;
    for (const auto& d : from_dir) by_id[d.id] = &d;
    for (const auto& d : docs) {
        REQUIRE(by_id.count(d.id) == 1);
        CHECK(*by_id.at(d.id) == d);
    }
}

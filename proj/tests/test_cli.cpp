#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "veridict/util.hpp"

using namespace veridict;

namespace {

namespace fs = std::filesystem;

const std::string kBin = std::string(VERIDICT_BIN_DIR) + "/veridict";
const std::string kResources = VERIDICT_RESOURCE_DIR;
const std::string kCorpus = kResources + "/../corpus.jsonl";

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> seq{0};
        path = fs::temp_directory_path() /
               ("veridict-cli-" + std::to_string(::getpid()) + "-" + std::to_string(seq++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct CmdResult {
    int code = -1;
    std::string out;
    std::string err;
};

CmdResult run_cli(const std::string& args, const std::string& stdin_file = "") {
    static std::atomic<int> seq{0};
    auto base = fs::temp_directory_path() /
                ("veridict-out-" + std::to_string(::getpid()) + "-" + std::to_string(seq++));
    auto out_f = base.string() + ".out";
    auto err_f = base.string() + ".err";
    std::string cmd = kBin + " " + args + " >" + out_f + " 2>" + err_f;
    if (!stdin_file.empty()) cmd += " <" + stdin_file;
    int rc = std::system(cmd.c_str());
    CmdResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = read_file(out_f);
    r.err = read_file(err_f);
    fs::remove(out_f);
    fs::remove(err_f);
    return r;
}

fs::path write_tmp(const TempDir& dir, const std::string& name, const std::string& content) {
    auto p = dir.path / name;
    write_file(p, content);
    return p;
}

}  // namespace

TEST_CASE("corpus stats prints the full size table") {
    auto r = run_cli("corpus stats --input " + kCorpus + " --resources " + kResources);
    CHECK(r.code == 0);
    CHECK(r.out.find("EN") != std::string::npos);
    CHECK(r.out.find("415") != std::string::npos);  // EN human paragraph count
    CHECK(r.out.find("TOTAL") != std::string::npos);
}

TEST_CASE("corpus stats emits machine-readable json on request") {
    auto r = run_cli("corpus stats --json --input " + kCorpus + " --resources " + kResources);
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["EN"]["Human"]["documents"] == 100);
    CHECK(j["EN"]["Human"]["paragraphs"] == 415);
    CHECK(j["ES"]["AIRephrased"]["documents"] == 100);
}

TEST_CASE("corpus stats on an empty corpus prints a zero table") {
    TempDir tmp;
    auto empty = write_tmp(tmp, "empty.jsonl", "");
    auto r = run_cli("corpus stats --input " + empty.string() + " --resources " + kResources);
    CHECK(r.code == 0);
    CHECK(r.out.find("TOTAL") != std::string::npos);
}

TEST_CASE("corrupt jsonl is reported with its line number on exit 2") {
    TempDir tmp;
    auto bad = write_tmp(tmp, "bad.jsonl",
                         R"({"id":"x1","language":"EN","label":"Human","topic":"biology",)"
                         R"("title":"T","body":"Some text."})"
                         "\nnot json at all\n");
    auto r = run_cli("corpus validate --input " + bad.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("2") != std::string::npos);  // offending line number
}

TEST_CASE("corpus validate accepts the shipped corpus") {
    auto r = run_cli("corpus validate --input " + kCorpus + " --complete");
    CHECK(r.code == 0);
    CHECK(r.out.find("ok: 1200 documents") != std::string::npos);
}

TEST_CASE("incomplete corpora fail the complete check but pass the basic one") {
    TempDir tmp;
    // two valid documents, far short of 100 per cell
    std::string two =
        R"({"id":"a","language":"EN","label":"Human","topic":"biology","title":"T","body":"One."})"
        "\n"
        R"({"id":"b","language":"EN","label":"AIGenerated","topic":"biology","title":"U","body":"Two."})"
        "\n";
    auto p = write_tmp(tmp, "two.jsonl", two);
    CHECK(run_cli("corpus validate --input " + p.string()).code == 0);
    auto strict = run_cli("corpus validate --input " + p.string() + " --complete");
    CHECK(strict.code == 2);
    CHECK_FALSE(strict.err.empty());
}

TEST_CASE("extract writes split csvs plus a manifest") {
    TempDir out;
    auto r = run_cli("extract --input " + kCorpus + " --lang EN --features document --seed 0" +
                     " --out " + out.path.string() + " --resources " + kResources);
    CHECK(r.code == 0);
    for (const char* name : {"train.csv", "val.csv", "test.csv", "manifest.json"})
        CHECK(fs::exists(out.path / name));

    auto header = read_file(out.path / "train.csv");
    auto first_line = header.substr(0, header.find('\n'));
    // id + 19 document columns + trailing label
    CHECK(std::count(first_line.begin(), first_line.end(), ',') == 20);
    CHECK(first_line.find("id,") == 0);
    CHECK(first_line.rfind(",label") == first_line.size() - 6);
    CHECK(first_line.find("wordsPerParagraph_mean") != std::string::npos);

    auto manifest = nlohmann::json::parse(read_file(out.path / "manifest.json"));
    CHECK(manifest["columns"].size() == 19);
    CHECK(manifest["task"] == "Generated");
    CHECK(manifest["language"] == "EN");
    CHECK(manifest["seed"] == 0);
}

TEST_CASE("extract joins multiple categories in canonical order") {
    TempDir out;
    auto r = run_cli("extract --input " + kCorpus +
                     " --lang FR --features readability,semantic --seed 1 --out " +
                     out.path.string() + " --resources " + kResources);
    CHECK(r.code == 0);
    auto manifest = nlohmann::json::parse(read_file(out.path / "manifest.json"));
    REQUIRE(manifest["columns"].size() == 4);
    CHECK(manifest["columns"][0] == "sentiment_polarity");  // semantic precedes readability
    CHECK(manifest["columns"][3] == "fleschKincaidGradeLevel");
}

TEST_CASE("extract is deterministic") {
    TempDir out1, out2;
    std::string args = "extract --input " + kCorpus +
                       " --lang DE --features document,listlookup --seed 2 --resources " +
                       kResources + " --out ";
    CHECK(run_cli(args + out1.path.string()).code == 0);
    CHECK(run_cli(args + out2.path.string()).code == 0);
    for (const char* name : {"train.csv", "val.csv", "test.csv", "manifest.json"})
        CHECK(read_file(out1.path / name) == read_file(out2.path / name));
}

TEST_CASE("unknown feature categories are a usage error") {
    TempDir out;
    auto r = run_cli("extract --input " + kCorpus + " --lang EN --features nosuch --out " +
                     out.path.string() + " --resources " + kResources);
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("missing corpus paths are a usage error") {
    TempDir out;
    auto r = run_cli("extract --input /nonexistent.jsonl --lang EN --out " + out.path.string() +
                     " --resources " + kResources);
    CHECK(r.code == 2);

    auto cfg = nlohmann::json{{"corpus", "/nonexistent.jsonl"},
                              {"resources", kResources},
                              {"tasks", {"generated"}},
                              {"languages", {"EN"}},
                              {"models", {"rf"}},
                              {"seeds", {0}},
                              {"feature_configs",
                               nlohmann::json::array({{{"name", "Document"},
                                                       {"categories", {"Document"}}}})}};
    TempDir tmp;
    auto cfg_path = write_tmp(tmp, "grid.json", cfg.dump());
    auto rr = run_cli("run --config " + cfg_path.string() + " --out " + out.path.string());
    CHECK(rr.code == 2);
}

TEST_CASE("malformed grid configs exit with a usage error") {
    TempDir tmp, out;
    auto cfg_path = write_tmp(tmp, "grid.json", "{\"tasks\": []}");
    auto r = run_cli("run --config " + cfg_path.string() + " --out " + out.path.string());
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("run executes a one-cell grid and detect scores documents with its bundle") {
    TempDir tmp, out;
    auto cfg = nlohmann::json{{"corpus", kCorpus},
                              {"resources", kResources},
                              {"tasks", {"generated"}},
                              {"languages", {"EN"}},
                              {"models", {"rf"}},
                              {"seeds", {0}},
                              {"feature_configs",
                               nlohmann::json::array({{{"name", "Document"},
                                                       {"categories", {"Document"}}}})}};
    auto cfg_path = write_tmp(tmp, "grid.json", cfg.dump());
    auto r = run_cli("run --config " + cfg_path.string() + " --save-models --out " +
                     out.path.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("run: 1 cells (0 skipped)") != std::string::npos);
    CHECK(fs::exists(out.path / "report.csv"));
    CHECK(fs::exists(out.path / "report.md"));
    CHECK(fs::exists(out.path / "run_manifest.json"));

    auto manifest = nlohmann::json::parse(read_file(out.path / "run_manifest.json"));
    CHECK(manifest["corpus"]["documents"] == 1200);
    CHECK(manifest["config"]["sha256"] == sha256_file_hex(cfg_path));
    CHECK(manifest["seeds"] == nlohmann::json::array({0}));
    CHECK(manifest["provider_modes"]["chat"] == "none");
    CHECK(manifest["provider_modes"]["perplexity"] == "local");

    auto report = read_file(out.path / "report.csv");
    CHECK(report.find("Generated,EN,Document,rf,") != std::string::npos);

    // ---- detect against the saved bundle
    auto model = out.path / "models" / "Generated_EN_Document_rf.vrd";
    REQUIRE(fs::exists(model));

    TempDir texts;
    auto ai_text = write_tmp(texts, "ai.txt",
                             "Moreover, the analysis demonstrates the framework. "
                             "Furthermore, the approach ensures the methodology. "
                             "Consequently, the system illustrates the result.");
    auto d = run_cli("detect --model " + model.string() + " --text " + ai_text.string() +
                     " --lang EN --resources " + kResources);
    CHECK(d.code == 0);
    auto j = nlohmann::json::parse(d.out);
    REQUIRE(j.contains("proba_ai"));
    REQUIRE(j.contains("label"));
    REQUIRE(j.contains("top_features"));
    CHECK(j["proba_ai"].is_number());
    CHECK(j["proba_ai"].get<double>() >= 0.0);
    CHECK(j["proba_ai"].get<double>() <= 1.0);
    CHECK((j["label"] == "AIGenerated" || j["label"] == "Human"));
    CHECK(j["top_features"].size() == 5);
    for (const auto& f : j["top_features"]) {
        CHECK(f.contains("name"));
        CHECK(f.contains("value"));
        CHECK(f.contains("zscore"));
    }

    // stdin path: "-" reads the document from standard input
    auto s = run_cli("detect --model " + model.string() + " --text - --lang EN --resources " +
                         kResources,
                     ai_text.string());
    CHECK(s.code == 0);
    CHECK(nlohmann::json::parse(s.out)["proba_ai"] == j["proba_ai"]);

    // empty document is a usage error
    auto empty = write_tmp(texts, "empty.txt", "  \n ");
    auto e = run_cli("detect --model " + model.string() + " --text " + empty.string() +
                     " --lang EN --resources " + kResources);
    CHECK(e.code == 2);
    CHECK(e.err.find("empty document") != std::string::npos);

    // declared language must match the bundle
    auto w = run_cli("detect --model " + model.string() + " --text " + ai_text.string() +
                     " --lang FR --resources " + kResources);
    CHECK(w.code == 2);
    CHECK(w.err.find("language mismatch") != std::string::npos);

    // missing bundle path
    auto m = run_cli("detect --model /nonexistent.vrd --text " + ai_text.string() +
                     " --lang EN --resources " + kResources);
    CHECK(m.code == 2);
}

TEST_CASE("usage problems and unknown flags exit 2") {
    CHECK(run_cli("corpus stats").code == 2);          // missing --input
    CHECK(run_cli("extract --lang EN").code == 2);     // missing required options
    CHECK(run_cli("frobnicate").code == 2);            // unknown subcommand
    CHECK(run_cli("run --config x --out y --bogus").code == 2);
}

TEST_CASE("version flag prints the tool version") {
    auto r = run_cli("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find("0.1.0") != std::string::npos);
}

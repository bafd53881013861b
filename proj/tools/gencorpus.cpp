// Builds the bundled evaluation corpus: deterministic documents whose
// paragraph/sentence/word totals match the published per-cell counts.
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "veridict/corpus.hpp"
#include "veridict/lang.hpp"
#include "veridict/syncorpus.hpp"

using namespace veridict;

int main(int argc, char** argv) {
    CLI::App app{"gencorpus: emit the deterministic evaluation corpus"};
    std::string resources = "resources";
    std::string out;
    std::string format = "jsonl";
    std::uint64_t seed = 0;
    std::string dump_vocab;
    app.add_option("--resources", resources, "language resource directory");
    app.add_option("--out", out, "output path (.jsonl file or directory)");
    app.add_option("--format", format, "jsonl|directory")
        ->check(CLI::IsMember({"jsonl", "directory"}));
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--dump-vocab", dump_vocab,
                   "print the generator vocabulary for a language (en|fr|de|es) and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!dump_vocab.empty()) {
            for (const std::string& w : syncorpus::vocabulary(parse_language(dump_vocab)))
                std::printf("%s\n", w.c_str());
            return 0;
        }
        if (out.empty()) {
            std::fprintf(stderr, "gencorpus: --out is required\n");
            return 2;
        }
        corpus::PackSet packs = corpus::load_packs(resources);
        std::vector<corpus::Document> docs = syncorpus::generate(packs, seed);
        if (format == "jsonl") {
            corpus::write_jsonl(docs, out);
        } else {
            corpus::write_directory(docs, out);
        }
        std::printf("wrote %zu documents to %s\n", docs.size(), out.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "gencorpus: %s\n", e.what());
        return 1;
    }
}

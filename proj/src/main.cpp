// veridict: corpus statistics, feature extraction, evaluation grids, and
// single-document detection from the command line.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "veridict/classifiers.hpp"
#include "veridict/corpus.hpp"
#include "veridict/eval.hpp"
#include "veridict/features.hpp"
#include "veridict/lang.hpp"
#include "veridict/provider_iface.hpp"
#include "veridict/providers.hpp"
#include "veridict/textproc.hpp"
#include "veridict/util.hpp"

using namespace veridict;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

/// Bad user input: wrong flags, malformed corpora, mismatched metadata.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

corpus::CorpusFormat parse_format_or_sniff(const std::string& format,
                                           const std::filesystem::path& path) {
    if (format == "jsonl") return corpus::CorpusFormat::Jsonl;
    if (format == "directory") return corpus::CorpusFormat::Directory;
    return std::filesystem::is_directory(path) ? corpus::CorpusFormat::Directory
                                               : corpus::CorpusFormat::Jsonl;
}

std::vector<corpus::Document> load_corpus_checked(const std::filesystem::path& path,
                                                  const std::string& format) {
    if (!std::filesystem::exists(path))
        throw UsageError("corpus not found: " + path.string());
    try {
        return corpus::load_corpus(path, parse_format_or_sniff(format, path));
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

/// Content hash over the canonical JSON serialization, independent of the
/// on-disk format the corpus was loaded from.
std::string corpus_sha256(const std::vector<corpus::Document>& docs) {
    std::string blob;
    for (const corpus::Document& doc : docs) {
        json j{{"id", doc.id},       {"language", to_string(doc.language)},
               {"label", to_string(doc.label)}, {"topic", doc.topic},
               {"title", doc.title}, {"body", doc.body}};
        blob += j.dump();
        blob += '\n';
    }
    return sha256_hex(blob);
}

features::CategorySet parse_feature_list(const std::string& arg) {
    features::CategorySet out;
    for (const std::string& part : split(arg, ',')) {
        const std::string name = trim(part);
        if (name.empty()) continue;
        if (name == "all") {
            for (features::Category c : features::kAllCategories)
                if (c != features::Category::AIFeedback) out.insert(c);
            continue;
        }
        try {
            out.insert(features::parse_category(name));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (out.empty()) throw UsageError("no feature categories selected");
    return out;
}

// ------------------------------------------------------------- cmd corpus --

int cmd_corpus_stats(const std::string& input, const std::string& format,
                     const std::string& resources, bool as_json) {
    const auto docs = load_corpus_checked(input, format);
    const auto packs = corpus::load_packs(resources);
    const auto stats = corpus::corpus_stats(docs, packs);

    if (as_json) {
        json out = json::object();
        for (const auto& [cell, s] : stats) {
            out[to_string(cell.first)][to_string(cell.second)] = {
                {"documents", s.documents},
                {"paragraphs", s.paragraphs},
                {"sentences", s.sentences},
                {"words", s.words}};
        }
        std::printf("%s\n", out.dump(2).c_str());
        return 0;
    }

    std::printf("%-8s %-12s %10s %10s %10s %10s\n", "language", "label", "documents",
                "paragraphs", "sentences", "words");
    corpus::CellStats total;
    for (const auto& [cell, s] : stats) {
        std::printf("%-8s %-12s %10lld %10lld %10lld %10lld\n",
                    to_string(cell.first).c_str(), to_string(cell.second).c_str(),
                    static_cast<long long>(s.documents), static_cast<long long>(s.paragraphs),
                    static_cast<long long>(s.sentences), static_cast<long long>(s.words));
        total.documents += s.documents;
        total.paragraphs += s.paragraphs;
        total.sentences += s.sentences;
        total.words += s.words;
    }
    std::printf("%-8s %-12s %10lld %10lld %10lld %10lld\n", "TOTAL", "",
                static_cast<long long>(total.documents), static_cast<long long>(total.paragraphs),
                static_cast<long long>(total.sentences), static_cast<long long>(total.words));
    return 0;
}

int cmd_corpus_validate(const std::string& input, const std::string& format, bool complete) {
    const auto docs = load_corpus_checked(input, format);
    std::vector<std::string> violations = corpus::validate_corpus(docs, complete);
    if (complete) {
        std::map<std::pair<Language, Label>, int> counts;
        for (const auto& doc : docs) ++counts[{doc.language, doc.label}];
        for (Language lang : kAllLanguages) {
            for (Label label : {Label::Human, Label::AIGenerated, Label::AIRephrased}) {
                const int n = counts.count({lang, label}) ? counts[{lang, label}] : 0;
                if (n != 100)
                    violations.push_back("cell " + to_string(lang) + "/" + to_string(label) +
                                         ": expected 100 documents, found " + std::to_string(n));
            }
        }
    }
    if (!violations.empty()) {
        for (const std::string& v : violations) std::fprintf(stderr, "%s\n", v.c_str());
        return 2;
    }
    std::printf("ok: %zu documents\n", docs.size());
    return 0;
}

// ------------------------------------------------------------ cmd extract --

int cmd_extract(const std::string& input, const std::string& format, const std::string& lang_s,
                const std::string& task_s, const std::string& features_s, int seed,
                const std::string& out_dir, const std::string& resources) {
    Language language;
    Task task;
    try {
        language = parse_language(lang_s);
        task = parse_task(task_s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const features::CategorySet config = parse_feature_list(features_s);

    const auto docs = load_corpus_checked(input, format);
    const auto pack = textproc::load_pack(resources, language);

    corpus::SplitPlan plan;
    try {
        plan = corpus::make_split(docs, task, language, seed);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }

    std::map<std::string, const corpus::Document*> by_id;
    for (const auto& doc : docs) by_id[doc.id] = &doc;
    std::map<std::string, textproc::TokenizedDocument> toks;
    auto tokenized = [&](const std::string& id) -> const textproc::TokenizedDocument* {
        auto it = toks.find(id);
        if (it == toks.end())
            it = toks.emplace(id, textproc::analyze(by_id.at(id)->body, pack)).first;
        return &it->second;
    };

    std::vector<const textproc::TokenizedDocument*> train_toks;
    for (const std::string& id : plan.train_ids) train_toks.push_back(tokenized(id));
    features::FittedState state = features::fit_state(train_toks, plan.train_ids);

    features::LmScorer scorer(state.lm, language);
    features::HashedEmbedder embedder;
    features::DictionaryGrammar grammar(pack);
    features::ExtractionContext ctx;
    ctx.pack = &pack;
    ctx.perplexity = &scorer;
    ctx.embedder = &embedder;
    ctx.grammar = &grammar;
    ctx.vectorizer = &state.vectorizer;

    std::filesystem::create_directories(out_dir);
    bool manifest_written = false;
    for (const auto& [name, ids] :
         {std::pair<std::string, const std::vector<std::string>*>{"train", &plan.train_ids},
          {"val", &plan.val_ids},
          {"test", &plan.test_ids}}) {
        std::vector<const corpus::Document*> subset;
        std::vector<const textproc::TokenizedDocument*> subset_toks;
        for (const std::string& id : *ids) {
            subset.push_back(by_id.at(id));
            subset_toks.push_back(tokenized(id));
        }
        features::AssembledMatrix m =
            features::assemble_matrix(subset, subset_toks, config, ctx, task);
        features::export_csv(m, std::filesystem::path(out_dir) / (name + ".csv"));
        if (!manifest_written) {
            nlohmann::json meta;
            meta["columns"] = m.manifest;
            meta["task"] = to_string(task);
            meta["language"] = to_string(language);
            meta["seed"] = seed;
            std::vector<std::string> cats;
            for (features::Category c : config) cats.push_back(features::to_string(c));
            meta["categories"] = cats;
            meta["fingerprint"] = features::manifest_fingerprint(m.manifest);
            write_file_atomic(std::filesystem::path(out_dir) / "manifest.json",
                              meta.dump(2) + "\n");
            manifest_written = true;
        }
    }
    std::fprintf(stderr, "extract: wrote train/val/test CSVs to %s\n", out_dir.c_str());
    return 0;
}

// ---------------------------------------------------------------- cmd run --

int cmd_run(const std::string& config_path, const std::string& out_dir, bool save_models) {
    if (!std::filesystem::exists(config_path))
        throw UsageError("config not found: " + config_path);
    eval::GridSpec spec;
    try {
        spec = eval::load_grid_spec(config_path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("config error: ") + e.what());
    }
    if (!std::filesystem::exists(spec.corpus))
        throw UsageError("corpus not found: " + spec.corpus.string());

    const auto docs = load_corpus_checked(spec.corpus, spec.corpus_format);
    corpus::PackSet packs;
    try {
        packs = corpus::load_packs(spec.resources);
    } catch (const std::exception& e) {
        throw UsageError(std::string("resource error: ") + e.what());
    }

    eval::RunOptions options;
    options.out_dir = out_dir;
    options.save_models = save_models;
    const eval::EvalReport report = run_grid(spec, docs, packs, options);

    std::filesystem::create_directories(out_dir);
    const auto out = std::filesystem::path(out_dir);
    write_file_atomic(out / "report.csv", eval::render_report(report, eval::ReportFormat::Csv));
    write_file_atomic(out / "report.md",
                      eval::render_report(report, eval::ReportFormat::Markdown));

    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["config"] = {{"path", config_path},
                          {"sha256", sha256_hex(read_file(config_path))}};
    manifest["corpus"] = {{"path", spec.corpus.string()},
                          {"sha256", corpus_sha256(docs)},
                          {"documents", docs.size()}};
    json packs_j = json::object();
    for (Language lang : spec.languages)
        packs_j[to_string(lang)] = textproc::pack_fingerprint(spec.resources, lang);
    manifest["resource_packs"] = packs_j;
    json modes = json::object();
    for (providers::ProviderKind kind :
         {providers::ProviderKind::perplexity, providers::ProviderKind::embedding,
          providers::ProviderKind::grammar, providers::ProviderKind::chat}) {
        const bool remote = spec.remote.count(kind) != 0;
        modes[providers::to_string(kind)] =
            remote ? "remote" : (kind == providers::ProviderKind::chat ? "none" : "local");
    }
    manifest["provider_modes"] = modes;
    manifest["seeds"] = spec.seeds;
    write_file_atomic(out / "run_manifest.json", manifest.dump(2) + "\n");

    int skipped = 0;
    for (const auto& row : report.rows) skipped += row.skipped ? 1 : 0;
    std::printf("run: %zu cells (%d skipped) -> %s\n", report.rows.size(), skipped,
                out_dir.c_str());
    return 0;
}

// ------------------------------------------------------------- cmd detect --

int cmd_detect(const std::string& model_path, const std::string& text_path,
               const std::string& lang_s, const std::string& resources) {
    if (!std::filesystem::exists(model_path))
        throw UsageError("model not found: " + model_path);
    eval::DetectorBundle bundle;
    try {
        bundle = eval::load_bundle(model_path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("model error: ") + e.what());
    }

    if (!lang_s.empty()) {
        Language given;
        try {
            given = parse_language(lang_s);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (given != bundle.language)
            throw UsageError("language mismatch: model expects " + to_string(bundle.language) +
                             ", got " + to_string(given));
    }

    std::string body;
    if (text_path.empty() || text_path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        body = ss.str();
    } else {
        if (!std::filesystem::exists(text_path))
            throw UsageError("text file not found: " + text_path);
        body = read_file(text_path);
    }
    if (trim(body).empty()) throw UsageError("empty document");

    const std::string fp = textproc::pack_fingerprint(resources, bundle.language);
    if (fp != bundle.pack_fingerprint)
        throw UsageError("resource pack mismatch: model was built against different packs");

    const auto pack = textproc::load_pack(resources, bundle.language);
    corpus::Document doc;
    doc.id = "input";
    doc.language = bundle.language;
    doc.label = Label::Human;  // placeholder; never used for scoring
    doc.body = body;
    const auto tok = textproc::analyze(body, pack);
    if (tok.word_count() == 0) throw UsageError("empty document");

    features::LmScorer scorer(bundle.lm, bundle.language);
    features::HashedEmbedder embedder(bundle.embedding_dim);
    features::DictionaryGrammar grammar(pack);
    features::ExtractionContext ctx;
    ctx.pack = &pack;
    ctx.perplexity = &scorer;
    ctx.embedder = &embedder;
    ctx.grammar = &grammar;
    ctx.vectorizer = &bundle.vectorizer;

    const features::FeatureVector fv = features::extract(doc, tok, bundle.categories, ctx);
    if (fv.manifest != bundle.manifest)
        throw UsageError("feature manifest mismatch between model and extraction");

    Matrix X(1, fv.values.size());
    for (std::size_t i = 0; i < fv.values.size(); ++i) X.at(0, i) = fv.values[i];
    const double proba =
        classifiers::predict_proba(bundle.model, X,
                                   features::manifest_fingerprint(fv.manifest))[0];

    struct Ranked {
        std::string name;
        double value;
        double zscore;
    };
    std::vector<Ranked> ranked;
    for (std::size_t i = 0; i < fv.manifest.size(); ++i) {
        const std::string& name = fv.manifest[i];
        if (name.rfind("tfidf_", 0) == 0 || name.rfind("emb_mean_", 0) == 0) continue;
        const double sd = bundle.feat_std[i] < 1e-8 ? 1.0 : bundle.feat_std[i];
        ranked.push_back({name, fv.values[i], (fv.values[i] - bundle.feat_mean[i]) / sd});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        return std::abs(a.zscore) > std::abs(b.zscore);
    });
    if (ranked.size() > 5) ranked.resize(5);

    json top = json::array();
    for (const Ranked& r : ranked)
        top.push_back({{"name", r.name}, {"value", r.value}, {"zscore", r.zscore}});
    json out = {{"proba_ai", proba},
                {"label", proba >= 0.5 ? to_string(ai_label(bundle.task)) : "Human"},
                {"top_features", top}};
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"veridict: stylometric detection of machine-written text"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    // corpus
    auto* corpus_cmd = app.add_subcommand("corpus", "corpus statistics and validation");
    corpus_cmd->require_subcommand(1);
    std::string c_input, c_format = "auto", c_resources = "resources";
    bool c_json = false, c_complete = false;
    auto* stats_cmd = corpus_cmd->add_subcommand("stats", "per-(language,label) size table");
    stats_cmd->add_option("--input", c_input, "corpus path (.jsonl or directory)")->required();
    stats_cmd->add_option("--format", c_format, "auto|jsonl|directory")
        ->check(CLI::IsMember({"auto", "jsonl", "directory"}));
    stats_cmd->add_option("--resources", c_resources, "language resource directory");
    stats_cmd->add_flag("--json", c_json, "machine-readable output");
    auto* validate_cmd = corpus_cmd->add_subcommand("validate", "schema checks");
    validate_cmd->add_option("--input", c_input, "corpus path")->required();
    validate_cmd->add_option("--format", c_format, "auto|jsonl|directory")
        ->check(CLI::IsMember({"auto", "jsonl", "directory"}));
    validate_cmd->add_flag("--complete", c_complete,
                           "require the full 4-language benchmark shape");

    // extract
    std::string e_input, e_format = "auto", e_lang, e_task = "generated", e_features = "all";
    std::string e_out, e_resources = "resources";
    int e_seed = 0;
    auto* extract_cmd = app.add_subcommand("extract", "write split feature CSVs");
    extract_cmd->add_option("--input", e_input, "corpus path")->required();
    extract_cmd->add_option("--format", e_format, "auto|jsonl|directory")
        ->check(CLI::IsMember({"auto", "jsonl", "directory"}));
    extract_cmd->add_option("--lang", e_lang, "EN|FR|DE|ES")->required();
    extract_cmd->add_option("--task", e_task, "generated|rephrased");
    extract_cmd->add_option("--features", e_features,
                            "comma-separated categories, or \"all\"");
    extract_cmd->add_option("--seed", e_seed, "split seed");
    extract_cmd->add_option("--out", e_out, "output directory")->required();
    extract_cmd->add_option("--resources", e_resources, "language resource directory");

    // run
    std::string r_config, r_out;
    bool r_save_models = false;
    auto* run_cmd = app.add_subcommand("run", "execute an evaluation grid");
    run_cmd->add_option("--config", r_config, "grid config JSON")->required();
    run_cmd->add_option("--out", r_out, "output directory")->required();
    run_cmd->add_flag("--save-models", r_save_models,
                      "bundle first-seed models for later detection");

    // detect
    std::string d_model, d_text, d_lang, d_resources = "resources";
    auto* detect_cmd = app.add_subcommand("detect", "score one document with a saved model");
    detect_cmd->add_option("--model", d_model, "detector bundle (.vrd)")->required();
    detect_cmd->add_option("--text", d_text, "text file; omit or \"-\" for stdin");
    detect_cmd->add_option("--lang", d_lang, "declared language, checked against the model");
    detect_cmd->add_option("--resources", d_resources, "language resource directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (stats_cmd->parsed())
            return cmd_corpus_stats(c_input, c_format, c_resources, c_json);
        if (validate_cmd->parsed()) return cmd_corpus_validate(c_input, c_format, c_complete);
        if (extract_cmd->parsed())
            return cmd_extract(e_input, e_format, e_lang, e_task, e_features, e_seed, e_out,
                               e_resources);
        if (run_cmd->parsed()) return cmd_run(r_config, r_out, r_save_models);
        if (detect_cmd->parsed()) return cmd_detect(d_model, d_text, d_lang, d_resources);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const providers::ProviderUnavailable& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

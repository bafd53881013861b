#include "veridict/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "veridict/util.hpp"

namespace veridict::eval {
namespace {

using nlohmann::json;

// %.17g round-trips doubles exactly through text
std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_' || c == '-';
        out.push_back(ok ? c : '-');
    }
    return out;
}

std::string model_display_name(classifiers::ModelKind kind) {
    switch (kind) {
        case classifiers::ModelKind::gbdt: return "XGBoost";
        case classifiers::ModelKind::rf: return "RF";
        case classifiers::ModelKind::mlp: return "MLP";
    }
    return "?";
}

std::string task_display_name(Task task) {
    return task == Task::Generated ? "Generated" : "Rephrased";
}

// ------------------------------------------- provider failure -> skip reason

features::Category category_for_reason(const std::string& reason) {
    if (reason == "provider:perplexity") return features::Category::Perplexity;
    if (reason == "provider:grammar") return features::Category::ErrorBased;
    if (reason == "provider:chat") return features::Category::AIFeedback;
    if (reason == "provider:embedding") return features::Category::TextVector;
    throw std::logic_error("unknown provider reason: " + reason);
}

// Remote providers fail with transport/protocol errors; inside the grid those
// become unavailability (cell skips) rather than aborts.
struct GuardedPerplexity : providers::PerplexityScorer {
    providers::PerplexityScorer* inner;
    explicit GuardedPerplexity(providers::PerplexityScorer& p) : inner(&p) {}
    std::vector<double> score_perplexity(const std::vector<std::string>& sentences,
                                         Language language) override {
        try {
            return inner->score_perplexity(sentences, language);
        } catch (const providers::ProviderUnavailable&) {
            throw;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "veridict: perplexity provider failed: %s\n", e.what());
            throw providers::ProviderUnavailable("provider:perplexity");
        }
    }
};

struct GuardedEmbedder : providers::SentenceEmbedder {
    providers::SentenceEmbedder* inner;
    explicit GuardedEmbedder(providers::SentenceEmbedder& p) : inner(&p) {}
    int dim() const override { return inner->dim(); }
    std::vector<std::vector<double>> embed_sentences(const std::vector<std::string>& sentences,
                                                     Language language) override {
        try {
            return inner->embed_sentences(sentences, language);
        } catch (const providers::ProviderUnavailable&) {
            throw;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "veridict: embedding provider failed: %s\n", e.what());
            throw providers::ProviderUnavailable("provider:embedding");
        }
    }
};

struct GuardedGrammar : providers::GrammarChecker {
    providers::GrammarChecker* inner;
    explicit GuardedGrammar(providers::GrammarChecker& p) : inner(&p) {}
    long check_grammar(const std::string& text, Language language) override {
        try {
            return inner->check_grammar(text, language);
        } catch (const providers::ProviderUnavailable&) {
            throw;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "veridict: grammar provider failed: %s\n", e.what());
            throw providers::ProviderUnavailable("provider:grammar");
        }
    }
};

struct GuardedChat : providers::ChatFeedback {
    providers::ChatFeedback* inner;
    explicit GuardedChat(providers::ChatFeedback& p) : inner(&p) {}
    std::string ask_chat(const std::string& prompt, const std::string& body,
                         Language language) override {
        try {
            return inner->ask_chat(prompt, body, language);
        } catch (const providers::ProviderUnavailable&) {
            throw;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "veridict: chat provider failed: %s\n", e.what());
            throw providers::ProviderUnavailable("provider:chat");
        }
    }
};

// ------------------------------------------------------------- json helpers

const json& require_key(const json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("config: missing \"") + key + "\"");
    return j.at(key);
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

json vectorizer_to_json(const features::FittedVectorizer& v) {
    return {{"vocabulary", v.vocabulary}, {"idf", v.idf}, {"fitted_on", v.fitted_on}};
}

features::FittedVectorizer vectorizer_from_json(const json& j) {
    features::FittedVectorizer v;
    v.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    v.idf = j.at("idf").get<std::vector<double>>();
    v.fitted_on = j.at("fitted_on").get<std::string>();
    v.rebuild_index();
    return v;
}

json lm_to_json(const features::BigramLm& lm) {
    json words = json::object();
    for (const auto& [word, id] : lm.word_ids) words[word] = id;
    json bigrams = json::array();
    for (const auto& [pair, count] : lm.bigram_counts)
        bigrams.push_back({pair.first, pair.second, count});
    return {{"word_ids", std::move(words)},
            {"unigram_counts", lm.unigram_counts},
            {"total_tokens", lm.total_tokens},
            {"bigram_counts", std::move(bigrams)},
            {"context_counts", lm.context_counts},
            {"sentence_starts", lm.sentence_starts}};
}

features::BigramLm lm_from_json(const json& j) {
    features::BigramLm lm;
    for (const auto& [word, id] : j.at("word_ids").items())
        lm.word_ids[word] = id.get<int>();
    lm.unigram_counts = j.at("unigram_counts").get<std::vector<std::int64_t>>();
    lm.total_tokens = j.at("total_tokens").get<std::int64_t>();
    for (const json& entry : j.at("bigram_counts")) {
        lm.bigram_counts[{entry.at(0).get<int>(), entry.at(1).get<int>()}] =
            entry.at(2).get<std::int64_t>();
    }
    lm.context_counts = j.at("context_counts").get<std::vector<std::int64_t>>();
    lm.sentence_starts = j.at("sentence_starts").get<std::int64_t>();
    return lm;
}

}  // namespace

// -------------------------------------------------------------------- metrics

Confusion confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.empty()) throw std::invalid_argument("confusion: empty inputs");
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("confusion: length mismatch");
    Confusion c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        int t = y_true[i], p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1))
            throw std::invalid_argument("confusion: labels must be 0 or 1");
        if (t == 1) {
            (p == 1 ? c.tp : c.fn)++;
        } else {
            (p == 1 ? c.fp : c.tn)++;
        }
    }
    return c;
}

double accuracy(const Confusion& c) {
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double precision(const Confusion& c) {
    long denom = c.tp + c.fp;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall(const Confusion& c) {
    long denom = c.tp + c.fn;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double f1(const Confusion& c) {
    double p = precision(c), r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

// ------------------------------------------------------------------ grid spec

GridSpec parse_grid_spec(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    GridSpec spec;
    spec.corpus = resolve_path(base_dir, require_key(j, "corpus").get<std::string>());
    if (j.contains("format")) {
        spec.corpus_format = j.at("format").get<std::string>();
        if (spec.corpus_format != "auto" && spec.corpus_format != "jsonl" &&
            spec.corpus_format != "directory")
            throw std::invalid_argument("config: format must be auto, jsonl, or directory");
    }
    spec.resources = resolve_path(base_dir, j.value("resources", std::string("resources")));

    for (const json& t : require_key(j, "tasks")) spec.tasks.push_back(parse_task(t.get<std::string>()));
    for (const json& l : require_key(j, "languages"))
        spec.languages.push_back(parse_language(l.get<std::string>()));
    for (const json& m : require_key(j, "models"))
        spec.models.push_back(classifiers::parse_model_kind(m.get<std::string>()));
    for (const json& s : require_key(j, "seeds")) {
        int seed = s.get<int>();
        if (seed < 0) throw std::invalid_argument("config: seeds must be >= 0");
        spec.seeds.push_back(seed);
    }

    std::set<std::string> seen_names;
    for (const json& fc : require_key(j, "feature_configs")) {
        FeatureConfig config;
        config.name = require_key(fc, "name").get<std::string>();
        if (config.name.empty() || config.name.find(',') != std::string::npos)
            throw std::invalid_argument("config: feature config names must be non-empty, no commas");
        if (!seen_names.insert(config.name).second)
            throw std::invalid_argument("config: duplicate feature config name " + config.name);
        for (const json& c : require_key(fc, "categories")) {
            std::string name = c.get<std::string>();
            if (name == "all") {
                config.categories.insert(features::kAllCategories.begin(),
                                         features::kAllCategories.end());
            } else {
                config.categories.insert(features::parse_category(name));
            }
        }
        if (config.categories.empty())
            throw std::invalid_argument("config: feature config " + config.name + " has no categories");
        spec.feature_configs.push_back(std::move(config));
    }

    if (spec.tasks.empty() || spec.languages.empty() || spec.models.empty() ||
        spec.seeds.empty() || spec.feature_configs.empty())
        throw std::invalid_argument("config: tasks, languages, models, seeds, feature_configs must be non-empty");

    if (j.contains("providers")) {
        for (const auto& [kind_name, pj] : j.at("providers").items()) {
            providers::ProviderKind kind = providers::parse_provider_kind(kind_name);
            std::string mode = pj.value("mode", std::string("local"));
            if (mode == "none") continue;
            if (mode == "local") {
                if (kind == providers::ProviderKind::chat)
                    throw std::invalid_argument("config: chat provider has no local mode");
                continue;  // built-in default
            }
            if (mode != "remote")
                throw std::invalid_argument("config: provider mode must be local, remote, or none");
            providers::ProviderConfig pc;
            pc.kind = kind;
            pc.mode = providers::ProviderMode::remote;
            pc.endpoint = pj.value("endpoint", std::string());
            pc.auth_token_env = pj.value("auth_token_env", std::string());
            pc.timeout_ms = pj.value("timeout_ms", pc.timeout_ms);
            pc.max_retries = pj.value("max_retries", pc.max_retries);
            pc.rate_limit_per_min = pj.value("rate_limit_per_min", pc.rate_limit_per_min);
            providers::validate(pc);
            spec.remote[kind] = pc;
        }
    }
    if (j.contains("cache_dir"))
        spec.cache_dir = resolve_path(base_dir, j.at("cache_dir").get<std::string>());
    return spec;
}

GridSpec load_grid_spec(const std::filesystem::path& config_path) {
    json j;
    try {
        j = json::parse(read_file(config_path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + config_path.string() + ": " + e.what());
    }
    return parse_grid_spec(j, config_path.parent_path());
}

// --------------------------------------------------------------------- report

std::string render_report(const EvalReport& report, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        std::string out =
            "task,language,config,model,skipped,skip_reason,acc_mean,acc_std,f1_mean,f1_std,"
            "seeds,active_providers,config_fingerprint\n";
        for (const ReportRow& row : report.rows) {
            std::vector<std::string> seed_strs;
            for (int s : row.seeds) seed_strs.push_back(std::to_string(s));
            out += to_string(row.task) + "," + to_string(row.language) + "," + row.config_name +
                   "," + classifiers::to_string(row.model) + ",";
            out += row.skipped ? "1" : "0";
            out += "," + row.skip_reason + ",";
            if (row.skipped) {
                out += ",,,";
            } else {
                out += g17(row.acc_mean) + "," + g17(row.acc_std) + "," + g17(row.f1_mean) + "," +
                       g17(row.f1_std);
            }
            out += "," + join(seed_strs, " ") + "," + row.active_providers + "," +
                   row.config_fingerprint + "\n";
        }
        return out;
    }

    // Markdown: one row per (language, feature config); per task and model a
    // pair of Acc/F1 columns; best Acc and F1 per (language, task) in bold.
    std::vector<Task> tasks;
    std::vector<Language> languages;
    std::vector<std::string> configs;
    std::vector<classifiers::ModelKind> models;
    auto add_unique = [](auto& vec, const auto& v) {
        if (std::find(vec.begin(), vec.end(), v) == vec.end()) vec.push_back(v);
    };
    for (const ReportRow& row : report.rows) {
        add_unique(tasks, row.task);
        add_unique(languages, row.language);
        add_unique(configs, row.config_name);
        add_unique(models, row.model);
    }
    // Table-shaped column order regardless of grid listing order
    std::vector<classifiers::ModelKind> model_order;
    for (classifiers::ModelKind kind :
         {classifiers::ModelKind::gbdt, classifiers::ModelKind::rf, classifiers::ModelKind::mlp})
        if (std::find(models.begin(), models.end(), kind) != models.end())
            model_order.push_back(kind);

    std::map<std::tuple<std::string, Language, std::string, classifiers::ModelKind>,
             const ReportRow*>
        by_key;
    for (const ReportRow& row : report.rows)
        by_key[{to_string(row.task), row.language, row.config_name, row.model}] = &row;

    // best Acc / F1 per (language, task) across configs x models
    std::map<std::pair<Language, std::string>, double> best_acc, best_f1;
    for (const ReportRow& row : report.rows) {
        if (row.skipped) continue;
        std::pair<Language, std::string> key{row.language, to_string(row.task)};
        auto [it_a, new_a] = best_acc.try_emplace(key, row.acc_mean);
        if (!new_a) it_a->second = std::max(it_a->second, row.acc_mean);
        auto [it_f, new_f] = best_f1.try_emplace(key, row.f1_mean);
        if (!new_f) it_f->second = std::max(it_f->second, row.f1_mean);
    }

    std::string out = "# Detection results\n\n";
    out += "Mean Acc/F1 on test splits across seeds; best Acc and F1 per language and task in bold.\n\n";
    out += "| Language | Features |";
    std::string divider = "|---|---|";
    for (Task task : tasks) {
        for (classifiers::ModelKind kind : model_order) {
            std::string group = task_display_name(task) + " " + model_display_name(kind);
            out += " " + group + " Acc | " + group + " F1 |";
            divider += "---:|---:|";
        }
    }
    out += "\n" + divider + "\n";

    for (Language language : languages) {
        for (const std::string& config : configs) {
            out += "| " + to_string(language) + " | " + config + " |";
            for (Task task : tasks) {
                for (classifiers::ModelKind kind : model_order) {
                    auto it = by_key.find({to_string(task), language, config, kind});
                    if (it == by_key.end()) {
                        out += " — | — |";
                        continue;
                    }
                    const ReportRow& row = *it->second;
                    if (row.skipped) {
                        std::string cell = "—(" + row.skip_reason + ")";
                        out += " " + cell + " | " + cell + " |";
                        continue;
                    }
                    std::pair<Language, std::string> key{language, to_string(task)};
                    std::string acc = fixed3(row.acc_mean);
                    std::string f1s = fixed3(row.f1_mean);
                    if (row.acc_mean == best_acc.at(key)) acc = "**" + acc + "**";
                    if (row.f1_mean == best_f1.at(key)) f1s = "**" + f1s + "**";
                    out += " " + acc + " | " + f1s + " |";
                }
            }
            out += "\n";
        }
    }
    return out;
}

EvalReport parse_report_csv(const std::string& text) {
    std::vector<std::string> lines = split(text, '\n');
    if (lines.empty()) throw std::invalid_argument("report csv: empty");
    EvalReport report;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> fields = split(lines[i], ',');
        if (fields.size() != 13)
            throw std::invalid_argument("report csv: bad field count on line " +
                                        std::to_string(i + 1));
        ReportRow row;
        row.task = parse_task(fields[0]);
        row.language = parse_language(fields[1]);
        row.config_name = fields[2];
        row.model = classifiers::parse_model_kind(fields[3]);
        row.skipped = fields[4] == "1";
        row.skip_reason = fields[5];
        if (!row.skipped) {
            row.acc_mean = std::stod(fields[6]);
            row.acc_std = std::stod(fields[7]);
            row.f1_mean = std::stod(fields[8]);
            row.f1_std = std::stod(fields[9]);
        }
        if (!fields[10].empty())
            for (const std::string& s : split(fields[10], ' ')) row.seeds.push_back(std::stoi(s));
        row.active_providers = fields[11];
        row.config_fingerprint = fields[12];
        report.rows.push_back(std::move(row));
    }
    return report;
}

// --------------------------------------------------------------------- runner

namespace {

struct SeedOutcome {
    bool skipped = false;
    std::string reason;
    double acc = 0.0;
    double f1_score = 0.0;
};

struct CellKey {
    std::size_t config = 0;
    std::size_t model = 0;
    bool operator<(const CellKey& o) const {
        return config != o.config ? config < o.config : model < o.model;
    }
};

void write_preds_csv(const std::filesystem::path& path, const features::AssembledMatrix& test,
                     const std::vector<double>& proba, const std::vector<int>& preds) {
    std::string out = "id,label,proba,pred\n";
    for (std::size_t i = 0; i < test.ids.size(); ++i) {
        out += test.ids[i] + "," + std::to_string(test.y[i]) + "," + format_double(proba[i], 9) +
               "," + std::to_string(preds[i]) + "\n";
    }
    write_file_atomic(path, out);
}

void column_stats(const Matrix& X, std::vector<double>& mean, std::vector<double>& stdev) {
    mean.assign(X.cols, 0.0);
    stdev.assign(X.cols, 0.0);
    std::vector<double> column(X.rows);
    for (std::size_t c = 0; c < X.cols; ++c) {
        for (std::size_t r = 0; r < X.rows; ++r) column[r] = X.at(r, c);
        mean[c] = mean_of(column);
        stdev[c] = population_stdev(column);
    }
}

}  // namespace

EvalReport run_grid(const GridSpec& spec, const std::vector<corpus::Document>& docs,
                    const corpus::PackSet& packs, const RunOptions& options) {
    std::filesystem::create_directories(options.out_dir / "preds");
    if (options.save_models) std::filesystem::create_directories(options.out_dir / "models");

    // remote providers (shared across the whole grid)
    std::optional<providers::DiskCache> cache;
    if (!spec.remote.empty())
        cache.emplace(spec.cache_dir ? *spec.cache_dir : providers::DiskCache::default_dir());
    std::unique_ptr<providers::RemotePerplexity> remote_perplexity;
    std::unique_ptr<providers::RemoteEmbedder> remote_embedder;
    std::unique_ptr<providers::RemoteGrammar> remote_grammar;
    std::unique_ptr<providers::RemoteChat> remote_chat;
    for (const auto& [kind, config] : spec.remote) {
        switch (kind) {
            case providers::ProviderKind::perplexity:
                remote_perplexity = std::make_unique<providers::RemotePerplexity>(config, &*cache);
                break;
            case providers::ProviderKind::embedding:
                remote_embedder = std::make_unique<providers::RemoteEmbedder>(config, &*cache);
                break;
            case providers::ProviderKind::grammar:
                remote_grammar = std::make_unique<providers::RemoteGrammar>(config, &*cache);
                break;
            case providers::ProviderKind::chat:
                remote_chat = std::make_unique<providers::RemoteChat>(config, &*cache);
                break;
        }
    }
    auto mode_of = [&](providers::ProviderKind kind) {
        return spec.remote.count(kind) ? std::string("remote")
               : kind == providers::ProviderKind::chat ? std::string("none")
                                                       : std::string("local");
    };
    std::string active_providers = "perplexity:" + mode_of(providers::ProviderKind::perplexity) +
                                   ";embedding:" + mode_of(providers::ProviderKind::embedding) +
                                   ";grammar:" + mode_of(providers::ProviderKind::grammar) +
                                   ";chat:" + mode_of(providers::ProviderKind::chat);

    // one tokenization per document, shared by every cell
    std::map<std::string, const corpus::Document*> by_id;
    for (const corpus::Document& doc : docs) by_id[doc.id] = &doc;
    std::map<std::string, textproc::TokenizedDocument> tokenized;
    auto tokenized_of = [&](const corpus::Document& doc) -> const textproc::TokenizedDocument& {
        auto it = tokenized.find(doc.id);
        if (it == tokenized.end()) {
            it = tokenized.emplace(doc.id, textproc::analyze(doc.body, packs.at(doc.language)))
                     .first;
        }
        return it->second;
    };

    features::CategorySet requested_union;
    for (const FeatureConfig& config : spec.feature_configs)
        requested_union.insert(config.categories.begin(), config.categories.end());

    EvalReport report;
    for (Task task : spec.tasks) {
        for (Language language : spec.languages) {
            const textproc::LanguagePack& pack = packs.at(language);
            std::map<CellKey, std::vector<SeedOutcome>> outcomes;
            std::map<CellKey, std::string> fingerprints;

            for (int seed : spec.seeds) {
                corpus::SplitPlan plan = corpus::make_split(docs, task, language, seed);

                // leakage instrumentation: the three parts must not overlap
                std::set<std::string> train_set(plan.train_ids.begin(), plan.train_ids.end());
                for (const std::string& id : plan.val_ids)
                    if (train_set.count(id)) throw std::logic_error("split leak: val id in train");
                for (const std::string& id : plan.test_ids)
                    if (train_set.count(id)) throw std::logic_error("split leak: test id in train");

                auto collect = [&](const std::vector<std::string>& ids,
                                   std::vector<const corpus::Document*>& out_docs,
                                   std::vector<const textproc::TokenizedDocument*>& out_toks) {
                    for (const std::string& id : ids) {
                        const corpus::Document* doc = by_id.at(id);
                        out_docs.push_back(doc);
                        out_toks.push_back(&tokenized_of(*doc));
                    }
                };
                std::vector<const corpus::Document*> train_docs, val_docs, test_docs;
                std::vector<const textproc::TokenizedDocument*> train_toks, val_toks, test_toks;
                collect(plan.train_ids, train_docs, train_toks);
                collect(plan.val_ids, val_docs, val_toks);
                collect(plan.test_ids, test_docs, test_toks);

                features::FittedState fitted = features::fit_state(train_toks, plan.train_ids);
                if (fitted.fitted_on != features::train_fingerprint(plan.train_ids))
                    throw std::logic_error("fitted state does not reference the train ids");

                features::LmScorer local_perplexity(fitted.lm, language);
                features::HashedEmbedder local_embedder;
                features::DictionaryGrammar local_grammar(pack);
                GuardedPerplexity guarded_perplexity(
                    remote_perplexity ? static_cast<providers::PerplexityScorer&>(*remote_perplexity)
                                      : local_perplexity);
                GuardedEmbedder guarded_embedder(
                    remote_embedder ? static_cast<providers::SentenceEmbedder&>(*remote_embedder)
                                    : local_embedder);
                GuardedGrammar guarded_grammar(
                    remote_grammar ? static_cast<providers::GrammarChecker&>(*remote_grammar)
                                   : local_grammar);
                std::optional<GuardedChat> guarded_chat;
                if (remote_chat) guarded_chat.emplace(*remote_chat);

                features::ExtractionContext ctx;
                ctx.pack = &pack;
                ctx.perplexity = &guarded_perplexity;
                ctx.embedder = &guarded_embedder;
                ctx.grammar = &guarded_grammar;
                ctx.chat = guarded_chat ? &*guarded_chat : nullptr;
                ctx.vectorizer = &fitted.vectorizer;

                features::CategorySet master = requested_union;
                std::map<features::Category, std::string> unavailable;
                if (!ctx.chat && master.count(features::Category::AIFeedback)) {
                    unavailable[features::Category::AIFeedback] = "provider:chat";
                    master.erase(features::Category::AIFeedback);
                }

                features::AssembledMatrix m_train, m_val, m_test;
                bool warmed = !remote_embedder;
                while (!master.empty()) {
                    try {
                        if (!warmed && master.count(features::Category::TextVector)) {
                            // fix the reported width before manifests are built
                            ctx.embedder->embed_sentences({"dim probe"}, language);
                            warmed = true;
                        }
                        m_train = features::assemble_matrix(train_docs, train_toks, master, ctx, task);
                        m_val = features::assemble_matrix(val_docs, val_toks, master, ctx, task);
                        m_test = features::assemble_matrix(test_docs, test_toks, master, ctx, task);
                        break;
                    } catch (const providers::ProviderUnavailable& e) {
                        features::Category category = category_for_reason(e.reason);
                        if (!master.count(category)) throw;
                        unavailable[category] = e.reason;
                        master.erase(category);
                    }
                }
                int embedding_dim = ctx.embedder->dim();

                for (std::size_t ci = 0; ci < spec.feature_configs.size(); ++ci) {
                    const FeatureConfig& config = spec.feature_configs[ci];
                    std::string missing_reason;
                    for (features::Category category : config.categories) {
                        auto it = unavailable.find(category);
                        if (it != unavailable.end()) {
                            missing_reason = it->second;
                            break;
                        }
                    }
                    if (!missing_reason.empty() ||
                        (master.empty() && !config.categories.empty())) {
                        if (missing_reason.empty()) missing_reason = "provider:unavailable";
                        for (std::size_t mi = 0; mi < spec.models.size(); ++mi)
                            outcomes[{ci, mi}].push_back({true, missing_reason, 0.0, 0.0});
                        continue;
                    }

                    features::AssembledMatrix s_train =
                        features::slice_categories(m_train, master, config.categories, embedding_dim);
                    features::AssembledMatrix s_val =
                        features::slice_categories(m_val, master, config.categories, embedding_dim);
                    features::AssembledMatrix s_test =
                        features::slice_categories(m_test, master, config.categories, embedding_dim);
                    std::string fingerprint = features::manifest_fingerprint(s_train.manifest);
                    auto [fit_it, inserted] = fingerprints.try_emplace(CellKey{ci, 0}, fingerprint);
                    if (!inserted && fit_it->second != fingerprint)
                        throw std::logic_error("manifest fingerprint varies across seeds");

                    for (std::size_t mi = 0; mi < spec.models.size(); ++mi) {
                        classifiers::TrainConfig tc;
                        tc.model = spec.models[mi];
                        tc.seed = seed;
                        classifiers::Model model = classifiers::train(
                            s_train.X, s_train.y, s_val.X, s_val.y, tc, fingerprint);
                        std::vector<double> proba =
                            classifiers::predict_proba(model, s_test.X, fingerprint);
                        std::vector<int> preds(proba.size());
                        for (std::size_t i = 0; i < proba.size(); ++i)
                            preds[i] = proba[i] >= 0.5 ? 1 : 0;
                        Confusion c = confusion(s_test.y, preds);
                        outcomes[{ci, mi}].push_back({false, "", accuracy(c), f1(c)});

                        std::string stem = to_string(task) + "_" + to_string(language) + "_" +
                                           sanitize_name(config.name) + "_" +
                                           classifiers::to_string(spec.models[mi]);
                        write_preds_csv(
                            options.out_dir / "preds" / (stem + "_" + std::to_string(seed) + ".csv"),
                            s_test, proba, preds);

                        if (options.save_models && seed == spec.seeds.front()) {
                            DetectorBundle bundle;
                            bundle.model = std::move(model);
                            bundle.task = task;
                            bundle.language = language;
                            bundle.categories = config.categories;
                            bundle.embedding_dim = embedding_dim;
                            bundle.manifest = s_train.manifest;
                            bundle.vectorizer = fitted.vectorizer;
                            bundle.lm = fitted.lm;
                            column_stats(s_train.X, bundle.feat_mean, bundle.feat_std);
                            bundle.pack_fingerprint =
                                textproc::pack_fingerprint(spec.resources, language);
                            save_bundle(bundle, options.out_dir / "models" / (stem + ".vrd"));
                        }
                    }
                }
            }

            for (std::size_t ci = 0; ci < spec.feature_configs.size(); ++ci) {
                for (std::size_t mi = 0; mi < spec.models.size(); ++mi) {
                    const std::vector<SeedOutcome>& cell = outcomes.at({ci, mi});
                    ReportRow row;
                    row.task = task;
                    row.language = language;
                    row.config_name = spec.feature_configs[ci].name;
                    row.model = spec.models[mi];
                    row.seeds = spec.seeds;
                    row.active_providers = active_providers;
                    auto skipped =
                        std::find_if(cell.begin(), cell.end(),
                                     [](const SeedOutcome& o) { return o.skipped; });
                    if (skipped != cell.end()) {
                        row.skipped = true;
                        row.skip_reason = skipped->reason;
                    } else {
                        std::vector<double> accs, f1s;
                        for (const SeedOutcome& o : cell) {
                            accs.push_back(o.acc);
                            f1s.push_back(o.f1_score);
                        }
                        row.acc_mean = mean_of(accs);
                        row.acc_std = population_stdev(accs);
                        row.f1_mean = mean_of(f1s);
                        row.f1_std = population_stdev(f1s);
                        row.config_fingerprint = fingerprints.at({ci, 0});
                    }
                    report.rows.push_back(std::move(row));
                }
            }
        }
    }
    return report;
}

// ----------------------------------------------------------- detector bundles

void save_bundle(const DetectorBundle& bundle, const std::filesystem::path& path) {
    json j;
    j["model"] = classifiers::model_to_json(bundle.model);
    j["task"] = to_string(bundle.task);
    j["language"] = to_string(bundle.language);
    json categories = json::array();
    for (features::Category c : bundle.categories) categories.push_back(features::to_string(c));
    j["categories"] = std::move(categories);
    j["embedding_dim"] = bundle.embedding_dim;
    j["manifest"] = bundle.manifest;
    j["vectorizer"] = vectorizer_to_json(bundle.vectorizer);
    j["lm"] = lm_to_json(bundle.lm);
    j["feat_mean"] = bundle.feat_mean;
    j["feat_std"] = bundle.feat_std;
    j["pack_fingerprint"] = bundle.pack_fingerprint;

    std::string payload(classifiers::kModelMagic);
    payload += "\n";
    payload += j.dump();
    payload += "\n";
    write_file_atomic(path, payload);
}

DetectorBundle load_bundle(const std::filesystem::path& path) {
    std::string raw = read_file(path);
    std::size_t newline = raw.find('\n');
    if (newline == std::string::npos || raw.substr(0, newline) != classifiers::kModelMagic)
        throw std::runtime_error("bundle file " + path.string() + ": bad magic");
    json j = json::parse(raw.substr(newline + 1));

    DetectorBundle bundle;
    bundle.model = classifiers::model_from_json(j.at("model"));
    bundle.task = parse_task(j.at("task").get<std::string>());
    bundle.language = parse_language(j.at("language").get<std::string>());
    for (const json& c : j.at("categories"))
        bundle.categories.insert(features::parse_category(c.get<std::string>()));
    bundle.embedding_dim = j.at("embedding_dim").get<int>();
    bundle.manifest = j.at("manifest").get<std::vector<std::string>>();
    bundle.vectorizer = vectorizer_from_json(j.at("vectorizer"));
    bundle.lm = lm_from_json(j.at("lm"));
    bundle.feat_mean = j.at("feat_mean").get<std::vector<double>>();
    bundle.feat_std = j.at("feat_std").get<std::vector<double>>();
    bundle.pack_fingerprint = j.at("pack_fingerprint").get<std::string>();
    return bundle;
}

}  // namespace veridict::eval

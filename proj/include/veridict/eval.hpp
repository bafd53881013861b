#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "veridict/classifiers.hpp"
#include "veridict/corpus.hpp"
#include "veridict/features.hpp"
#include "veridict/lang.hpp"
#include "veridict/providers.hpp"

namespace veridict::eval {

// ------------------------------------------------------------------ metrics

struct Confusion {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;

    long total() const { return tp + fp + fn + tn; }
};

/// Positive class = AI (label 1).
Confusion confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

double accuracy(const Confusion& c);
double precision(const Confusion& c);
double recall(const Confusion& c);
double f1(const Confusion& c);

// ---------------------------------------------------------------- grid spec

struct FeatureConfig {
    std::string name;  // no commas; used in report keys and file names
    features::CategorySet categories;
};

struct GridSpec {
    std::filesystem::path corpus;
    std::string corpus_format = "auto";  // jsonl | directory | auto
    std::filesystem::path resources = "resources";
    std::vector<Task> tasks;
    std::vector<Language> languages;
    std::vector<FeatureConfig> feature_configs;
    std::vector<classifiers::ModelKind> models;
    std::vector<int> seeds;
    // Kinds present here run against their remote endpoint; absent kinds use
    // the built-in local defaults (chat has none, so absent chat = skipped
    // AIFeedback cells).
    std::map<providers::ProviderKind, providers::ProviderConfig> remote;
    std::optional<std::filesystem::path> cache_dir;
};

/// Relative paths are resolved against base_dir (the config file's directory).
GridSpec parse_grid_spec(const nlohmann::json& j, const std::filesystem::path& base_dir);
GridSpec load_grid_spec(const std::filesystem::path& config_path);

// ------------------------------------------------------------------- report

struct ReportRow {
    Task task = Task::Generated;
    Language language = Language::EN;
    std::string config_name;
    classifiers::ModelKind model = classifiers::ModelKind::rf;
    bool skipped = false;
    std::string skip_reason;
    double acc_mean = 0.0;
    double acc_std = 0.0;
    double f1_mean = 0.0;
    double f1_std = 0.0;
    std::vector<int> seeds;
    std::string active_providers;    // e.g. "perplexity:local;chat:none"
    std::string config_fingerprint;  // manifest fingerprint of the sliced config
};

struct EvalReport {
    std::vector<ReportRow> rows;
};

enum class ReportFormat { Csv, Markdown };

std::string render_report(const EvalReport& report, ReportFormat format);
EvalReport parse_report_csv(const std::string& text);

// ------------------------------------------------------------------- runner

struct RunOptions {
    std::filesystem::path out_dir;
    bool save_models = false;  // bundle seed seeds[0] models for the detector
};

/// Full grid: per (task, language, seed) one master extraction shared by all
/// feature configs via column slicing. Cells whose provider dependency is
/// missing or failing are marked skipped and the run continues.
EvalReport run_grid(const GridSpec& spec, const std::vector<corpus::Document>& docs,
                    const corpus::PackSet& packs, const RunOptions& options);

// --------------------------------------------------------- detector bundles

/// Everything cmd_detect needs to score one document later: the trained
/// model plus the fitted per-split state and train-feature statistics.
struct DetectorBundle {
    classifiers::Model model;
    Task task = Task::Generated;
    Language language = Language::EN;
    features::CategorySet categories;
    int embedding_dim = 64;
    std::vector<std::string> manifest;
    features::FittedVectorizer vectorizer;
    features::BigramLm lm;
    std::vector<double> feat_mean, feat_std;  // train stats, one per column
    std::string pack_fingerprint;
};

void save_bundle(const DetectorBundle& bundle, const std::filesystem::path& path);
DetectorBundle load_bundle(const std::filesystem::path& path);

}  // namespace veridict::eval

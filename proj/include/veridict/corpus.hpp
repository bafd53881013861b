#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "veridict/lang.hpp"
#include "veridict/textproc.hpp"

namespace veridict::corpus {

struct Document {
    std::string id;
    Language language = Language::EN;
    std::string topic;
    Label label = Label::Human;
    std::string title;
    std::string body;

    bool operator==(const Document&) const = default;
};

/// The ten topic names a full benchmark corpus must stick to.
inline constexpr std::array<std::string_view, 10> kTopics = {
    "biology", "chemistry", "geography", "history",     "it",
    "music",   "politics",  "religion",  "sports",      "visual arts",
};

enum class CorpusFormat { Jsonl, Directory };

/// Loads a corpus from a .jsonl file (one document object per line) or from a
/// directory tree `<lang>/<label>/<topic>_<nn>.txt` where the first line of
/// each file is the title. Line endings are normalized to '\n'; duplicate ids
/// and malformed records raise std::runtime_error naming the offending
/// file/line.
std::vector<Document> load_corpus(const std::filesystem::path& path, CorpusFormat format);

/// Format sniffing: directories load as Directory, everything else as Jsonl.
std::vector<Document> load_corpus(const std::filesystem::path& path);

void write_jsonl(const std::vector<Document>& docs, const std::filesystem::path& path);

/// Writes the directory layout understood by load_corpus. Topic spaces become
/// underscores in file names.
void write_directory(const std::vector<Document>& docs, const std::filesystem::path& root);

/// Schema violations as human-readable strings; empty means valid. When
/// full_shape is set, topics outside kTopics are violations too.
std::vector<std::string> validate_corpus(const std::vector<Document>& docs,
                                         bool full_shape = false);

struct CellStats {
    std::int64_t documents = 0;
    std::int64_t paragraphs = 0;
    std::int64_t sentences = 0;
    std::int64_t words = 0;
};

using PackSet = std::map<Language, textproc::LanguagePack>;

PackSet load_packs(const std::filesystem::path& resources_dir);

/// Paragraph/sentence/word totals per (language, label), counted with this
/// toolkit's segmentation rules.
std::map<std::pair<Language, Label>, CellStats> corpus_stats(const std::vector<Document>& docs,
                                                             const PackSet& packs);

struct SplitPlan {
    int seed = 0;
    Task task = Task::Generated;
    Language language = Language::EN;
    std::vector<std::string> train_ids;
    std::vector<std::string> val_ids;
    std::vector<std::string> test_ids;
};

/// Stable hash of a plan's identity and membership; fitted feature state
/// records this to prove what it was trained on.
std::string split_fingerprint(const SplitPlan& plan);

/// Deterministic stratified 80/10/10 split over (label, topic) cells of the
/// given task's two classes in one language. Throws if either class has fewer
/// than 10 documents.
SplitPlan make_split(const std::vector<Document>& docs, Task task, Language language,
                     int seed);

}  // namespace veridict::corpus

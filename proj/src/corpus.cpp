#include "veridict/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "veridict/util.hpp"

namespace veridict::corpus {

namespace {

std::string normalize_newlines(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r') {
            if (i + 1 < s.size() && s[i + 1] == '\n') continue;
            out.push_back('\n');
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

Document parse_jsonl_record(const std::string& line, const std::filesystem::path& path,
                            std::size_t lineno) {
    const std::string where = path.string() + ":" + std::to_string(lineno);
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(where + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) throw std::runtime_error(where + ": record is not a JSON object");

    static const std::array<std::string_view, 6> kFields = {"id",    "language", "topic",
                                                            "label", "title",    "body"};
    for (auto field : kFields)
        if (!obj.contains(field))
            throw std::runtime_error(where + ": missing field \"" + std::string(field) + "\"");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(kFields.begin(), kFields.end(), key) == kFields.end())
            throw std::runtime_error(where + ": unexpected field \"" + key + "\"");
        if (!value.is_string())
            throw std::runtime_error(where + ": field \"" + key + "\" must be a string");
    }

    Document doc;
    doc.id = obj["id"].get<std::string>();
    try {
        doc.language = parse_language(obj["language"].get<std::string>());
        doc.label = parse_label(obj["label"].get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
    doc.topic = obj["topic"].get<std::string>();
    doc.title = normalize_newlines(obj["title"].get<std::string>());
    doc.body = normalize_newlines(obj["body"].get<std::string>());
    return doc;
}

std::vector<Document> load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());

    std::vector<Document> docs;
    std::map<std::string, std::size_t> first_line;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        docs.push_back(parse_jsonl_record(line, path, lineno));
        auto [it, inserted] = first_line.emplace(docs.back().id, lineno);
        if (!inserted)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": duplicate document id \"" + docs.back().id +
                                     "\" (first seen at line " + std::to_string(it->second) + ")");
    }
    return docs;
}

/// File stem `<topic>_<nn>` -> (topic with underscores as spaces, suffix).
std::string topic_from_stem(const std::string& stem, const std::filesystem::path& file) {
    const auto us = stem.rfind('_');
    if (us == std::string::npos || us == 0 || us + 1 >= stem.size())
        throw std::runtime_error("malformed corpus file name (want <topic>_<nn>.txt): " +
                                 file.string());
    for (std::size_t i = us + 1; i < stem.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(stem[i])))
            throw std::runtime_error("malformed corpus file name (want <topic>_<nn>.txt): " +
                                     file.string());
    std::string topic = ascii_lower(stem.substr(0, us));
    std::replace(topic.begin(), topic.end(), '_', ' ');
    return topic;
}

std::vector<Document> load_directory(const std::filesystem::path& root) {
    if (!std::filesystem::is_directory(root))
        throw std::runtime_error("not a corpus directory: " + root.string());

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<Document> docs;
    for (const auto& file : files) {
        const auto rel = std::filesystem::relative(file, root);
        std::vector<std::string> parts;
        for (const auto& p : rel) parts.push_back(p.string());
        if (parts.size() != 3)
            throw std::runtime_error("corpus file not under <lang>/<label>/: " + file.string());

        Document doc;
        try {
            doc.language = parse_language(parts[0]);
            doc.label = parse_label(parts[1]);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(file.string() + ": " + e.what());
        }
        const std::string stem = file.stem().string();
        doc.topic = topic_from_stem(stem, file);
        doc.id = ascii_lower(to_string(doc.language)) + "-" + ascii_lower(to_string(doc.label)) +
                 "-" + ascii_lower(stem);

        const std::string content = normalize_newlines(read_file(file));
        const auto nl = content.find('\n');
        doc.title = trim(nl == std::string::npos ? content : content.substr(0, nl));
        doc.body = nl == std::string::npos ? "" : content.substr(nl + 1);
        while (!doc.body.empty() && (doc.body.front() == '\n')) doc.body.erase(0, 1);
        while (!doc.body.empty() && doc.body.back() == '\n') doc.body.pop_back();
        if (trim(doc.body).empty())
            throw std::runtime_error(file.string() + ": empty body (first line is the title)");
        docs.push_back(std::move(doc));
    }
    return docs;
}

void reject_duplicate_ids(const std::vector<Document>& docs) {
    std::set<std::string_view> seen;
    for (const auto& doc : docs)
        if (!seen.insert(doc.id).second)
            throw std::runtime_error("duplicate document id: \"" + doc.id + "\"");
}

}  // namespace

std::vector<Document> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    auto docs =
        format == CorpusFormat::Jsonl ? load_jsonl(path) : load_directory(path);
    reject_duplicate_ids(docs);
    return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
    return load_corpus(path, std::filesystem::is_directory(path) ? CorpusFormat::Directory
                                                                 : CorpusFormat::Jsonl);
}

void write_jsonl(const std::vector<Document>& docs, const std::filesystem::path& path) {
    std::string out;
    for (const auto& doc : docs) {
        nlohmann::json obj;
        obj["id"] = doc.id;
        obj["language"] = to_string(doc.language);
        obj["topic"] = doc.topic;
        obj["label"] = to_string(doc.label);
        obj["title"] = doc.title;
        obj["body"] = doc.body;
        out += obj.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_directory(const std::vector<Document>& docs, const std::filesystem::path& root) {
    std::map<std::tuple<Language, Label, std::string>, int> counters;
    for (const auto& doc : docs) {
        std::string topic = doc.topic;
        std::replace(topic.begin(), topic.end(), ' ', '_');
        const int n = counters[{doc.language, doc.label, topic}]++;
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "_%02d.txt", n);
        const auto dir = root / to_string(doc.language) / to_string(doc.label);
        std::filesystem::create_directories(dir);
        write_file(dir / (topic + suffix), doc.title + "\n" + doc.body + "\n");
    }
}

std::vector<std::string> validate_corpus(const std::vector<Document>& docs,
                                         bool full_shape) {
    std::vector<std::string> violations;
    std::set<std::string_view> seen;
    for (const auto& doc : docs) {
        const std::string tag = "doc \"" + doc.id + "\": ";
        if (doc.id.empty()) violations.push_back("document with empty id");
        else if (!seen.insert(doc.id).second) violations.push_back(tag + "duplicate id");
        if (trim(doc.body).empty()) violations.push_back(tag + "empty body");
        if (doc.topic != ascii_lower(doc.topic))
            violations.push_back(tag + "topic not lowercase: \"" + doc.topic + "\"");
        if (full_shape &&
            std::find(kTopics.begin(), kTopics.end(), doc.topic) == kTopics.end())
            violations.push_back(tag + "topic outside the 10-topic set: \"" + doc.topic + "\"");
    }
    return violations;
}

PackSet load_packs(const std::filesystem::path& resources_dir) {
    PackSet packs;
    for (Language lang : kAllLanguages) packs.emplace(lang, textproc::load_pack(resources_dir, lang));
    return packs;
}

std::map<std::pair<Language, Label>, CellStats> corpus_stats(const std::vector<Document>& docs,
                                                             const PackSet& packs) {
    std::map<std::pair<Language, Label>, CellStats> stats;
    for (const auto& doc : docs) {
        const auto& pack = packs.at(doc.language);
        const auto tok = textproc::analyze(doc.body, pack);
        auto& cell = stats[{doc.language, doc.label}];
        cell.documents += 1;
        cell.paragraphs += static_cast<std::int64_t>(tok.paragraphs.size());
        cell.sentences += static_cast<std::int64_t>(tok.sentence_count());
        cell.words += static_cast<std::int64_t>(tok.word_count());
    }
    return stats;
}

std::string split_fingerprint(const SplitPlan& plan) {
    std::string blob = to_string(plan.task) + "|" + to_string(plan.language) + "|" +
                       std::to_string(plan.seed);
    for (const auto* ids : {&plan.train_ids, &plan.val_ids, &plan.test_ids}) {
        blob += "|";
        blob += join(*ids, ",");
    }
    return sha256_hex(blob);
}

SplitPlan make_split(const std::vector<Document>& docs, Task task, Language language,
                     int seed) {
    const Label positive = ai_label(task);

    // (label, topic) -> sorted ids
    std::map<std::pair<Label, std::string>, std::vector<std::string>> cells;
    std::map<Label, std::size_t> class_sizes;
    for (const auto& doc : docs) {
        if (doc.language != language) continue;
        if (doc.label != Label::Human && doc.label != positive) continue;
        cells[{doc.label, doc.topic}].push_back(doc.id);
        class_sizes[doc.label] += 1;
    }
    for (Label cls : {Label::Human, positive})
        if (class_sizes[cls] < 10)
            throw std::runtime_error("cannot stratify: class " + to_string(cls) + " has " +
                                     std::to_string(class_sizes[cls]) +
                                     " documents (need >= 10) for language " +
                                     to_string(language));

    SplitPlan plan;
    plan.seed = seed;
    plan.task = task;
    plan.language = language;

    // Cumulative floor targets per class keep test and val at 10% each with
    // integer arithmetic; the 20% combined target guarantees a cell is never
    // asked for more documents than it holds. Remainders stay in train.
    struct ClassCarry {
        std::size_t seen = 0, test_taken = 0, val_taken = 0;
    };
    std::map<Label, ClassCarry> carry;
    for (auto& [key, ids] : cells) {
        std::sort(ids.begin(), ids.end());
        const std::uint64_t cell_seed =
            mix_seed(static_cast<std::uint64_t>(seed),
                     mix_seed(static_cast<std::uint64_t>(key.first) + 1,
                              std::hash<std::string>{}(to_string(language) + "/" + key.second)));
        Rng rng(cell_seed);
        rng.shuffle(ids);

        auto& cc = carry[key.first];
        cc.seen += ids.size();
        const std::size_t n_test = cc.seen / 10 - cc.test_taken;
        const std::size_t n_val = cc.seen / 5 - cc.test_taken - cc.val_taken - n_test;
        cc.test_taken += n_test;
        cc.val_taken += n_val;

        std::size_t i = 0;
        for (; i < n_test; ++i) plan.test_ids.push_back(ids[i]);
        for (; i < n_test + n_val; ++i) plan.val_ids.push_back(ids[i]);
        for (; i < ids.size(); ++i) plan.train_ids.push_back(ids[i]);
    }

    std::sort(plan.train_ids.begin(), plan.train_ids.end());
    std::sort(plan.val_ids.begin(), plan.val_ids.end());
    std::sort(plan.test_ids.begin(), plan.test_ids.end());
    return plan;
}

}  // namespace veridict::corpus

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace veridict {

enum class Language { EN, FR, DE, ES };
enum class Label { Human, AIGenerated, AIRephrased };
enum class Task { Generated, Rephrased };

inline constexpr std::array<Language, 4> kAllLanguages = {Language::EN, Language::FR,
                                                          Language::DE, Language::ES};

inline std::string to_string(Language lang) {
    switch (lang) {
        case Language::EN: return "EN";
        case Language::FR: return "FR";
        case Language::DE: return "DE";
        case Language::ES: return "ES";
    }
    throw std::logic_error("bad Language value");
}

inline std::string to_string(Label label) {
    switch (label) {
        case Label::Human: return "Human";
        case Label::AIGenerated: return "AIGenerated";
        case Label::AIRephrased: return "AIRephrased";
    }
    throw std::logic_error("bad Label value");
}

inline std::string to_string(Task task) {
    return task == Task::Generated ? "Generated" : "Rephrased";
}

Language parse_language(std::string_view s);
Label parse_label(std::string_view s);
Task parse_task(std::string_view s);

/// Positive label of a detection task: the AI-produced class.
inline Label ai_label(Task task) {
    return task == Task::Generated ? Label::AIGenerated : Label::AIRephrased;
}

}  // namespace veridict

#include "veridict/lang.hpp"

#include <algorithm>
#include <cctype>

namespace veridict {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Language parse_language(std::string_view s) {
    const std::string low = ascii_lower(s);
    if (low == "en") return Language::EN;
    if (low == "fr") return Language::FR;
    if (low == "de") return Language::DE;
    if (low == "es") return Language::ES;
    throw std::invalid_argument("unknown language: \"" + std::string(s) + "\"");
}

Label parse_label(std::string_view s) {
    const std::string low = ascii_lower(s);
    if (low == "human") return Label::Human;
    if (low == "aigenerated") return Label::AIGenerated;
    if (low == "airephrased") return Label::AIRephrased;
    throw std::invalid_argument("unknown label: \"" + std::string(s) + "\"");
}

Task parse_task(std::string_view s) {
    const std::string low = ascii_lower(s);
    if (low == "generated") return Task::Generated;
    if (low == "rephrased") return Task::Rephrased;
    throw std::invalid_argument("unknown task: \"" + std::string(s) + "\"");
}

}  // namespace veridict

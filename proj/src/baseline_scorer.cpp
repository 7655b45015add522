#include "mcqa/baseline_scorer.hpp"

#include <cctype>
#include <cmath>
#include <unordered_set>

namespace mcqa {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isspace(c)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else if (c >= 0x80 || std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<double> score(const McqItem& item, InputVariant variant) {
    std::unordered_set<std::string> visible;
    const bool show_question = variant == InputVariant::Full || variant == InputVariant::NoContext;
    const bool show_context = variant == InputVariant::Full || variant == InputVariant::OptionsContext;
    if (show_question) {
        for (auto& t : tokenize(item.question)) visible.insert(std::move(t));
    }
    if (show_context) {
        for (auto& t : tokenize(item.context)) visible.insert(std::move(t));
    }

    std::vector<double> logits(item.options.size(), 0.0);
    if (visible.empty()) return logits;
    for (std::size_t i = 0; i < item.options.size(); ++i) {
        const auto tokens = tokenize(item.options[i]);
        if (tokens.empty()) continue;
        std::size_t shared = 0;
        for (const auto& t : tokens) shared += visible.count(t);
        const double s = static_cast<double>(shared);
        logits[i] = std::log1p(s) + s / static_cast<double>(tokens.size());
    }
    return logits;
}

}  // namespace mcqa

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcqa/core_model.hpp"

namespace mcqa {

/// Lowercased whitespace tokens with ASCII punctuation removed. Non-ASCII
/// bytes are kept as part of the token.
std::vector<std::string> tokenize(std::string_view text);

/// Model-free lexical scorer. For every option the score is
///   log(1 + s) + s / n
/// where n is the option's token count and s how many of those tokens occur
/// in the fields the variant exposes (question and/or context). Options-only
/// exposes nothing, so every option scores 0.
std::vector<double> score(const McqItem& item, InputVariant variant);

}  // namespace mcqa

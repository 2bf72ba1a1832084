#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace opsum {

using Tokens = std::vector<std::string>;

/// Surface form of the generic title token.
inline constexpr std::string_view kTitleToken = "<title>";

/// Lowercases ASCII, splits on whitespace, and emits every ASCII punctuation
/// character as its own token. Non-ASCII bytes are word characters.
Tokens tokenize(std::string_view text);

/// Joins tokens with single spaces.
std::string detokenize(const Tokens& tokens);

/// Replaces each occurrence of the title's token sequence with the generic
/// title token, scanning greedily left to right. An empty title is a no-op.
Tokens mask_title(const Tokens& tokens, const Tokens& title);

/// Replaces every generic title token by the title's tokens.
Tokens unmask_title(const Tokens& tokens, const Tokens& title);

}  // namespace opsum

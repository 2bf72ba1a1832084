#include "opsum/text.hpp"

#include <algorithm>
#include <cctype>

namespace opsum {

namespace {

bool is_ascii(char c) { return static_cast<unsigned char>(c) < 0x80; }

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    if (is_ascii(c) && std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (is_ascii(c) && std::ispunct(static_cast<unsigned char>(c))) {
      flush();
      out.emplace_back(1, c);
    } else {
      current.push_back(is_ascii(c) ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                                    : c);
    }
  }
  flush();
  return out;
}

std::string detokenize(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Tokens mask_title(const Tokens& tokens, const Tokens& title) {
  if (title.empty()) return tokens;
  Tokens out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (i + title.size() <= tokens.size() &&
        std::equal(title.begin(), title.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
      out.emplace_back(kTitleToken);
      i += title.size();
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

Tokens unmask_title(const Tokens& tokens, const Tokens& title) {
  Tokens out;
  for (const auto& t : tokens) {
    if (t == kTitleToken) {
      out.insert(out.end(), title.begin(), title.end());
    } else {
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace opsum

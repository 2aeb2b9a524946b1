// text.hpp — tokenization and text truncation.

#ifndef NEWSCRED_TEXT_HPP
#define NEWSCRED_TEXT_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace newscred {

/// Lowercases and splits on every maximal run of non-alphanumeric bytes.
/// Alphanumeric means ASCII [0-9A-Za-z]; multi-byte UTF-8 sequences act as
/// separators. Empty tokens are dropped.
std::vector<std::string> tokenize(const std::string& text);

/// First max_chars characters of text, where a character is one Unicode
/// scalar decoded from UTF-8 (a malformed byte counts as one character).
std::string truncate_text(const std::string& text, std::size_t max_chars);

}  // namespace newscred

#endif  // NEWSCRED_TEXT_HPP

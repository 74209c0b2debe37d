#pragma once

#include <string>
#include <string_view>

namespace propdet::utf8 {

/// Decodes UTF-8 into scalar values. Throws FormatError with the byte offset of
/// the first invalid sequence; `source` names the input in that message.
std::u32string decode(std::string_view bytes, const std::string& source = {});

std::string encode(std::u32string_view chars);
std::string encode(char32_t c);

// Character classes used by the tokenizer and normalizers. ASCII rules are
// exact; outside ASCII, letters are anything not listed as space or punctuation.
bool is_space(char32_t c);
bool is_punct(char32_t c);
bool is_alnum(char32_t c);
bool is_digit(char32_t c);
bool is_upper(char32_t c);
char32_t to_lower(char32_t c);
std::u32string to_lower(std::u32string_view s);
std::string to_lower(std::string_view s);

}  // namespace propdet::utf8

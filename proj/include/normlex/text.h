#ifndef NORMLEX_TEXT_H_
#define NORMLEX_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace normlex {
namespace text {

// Decodes UTF-8 into codepoints. Ill-formed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(char32_t c, std::string *out);

// Number of codepoints in a UTF-8 string.
std::size_t codepoint_length(std::string_view s);

char32_t to_lower(char32_t c);
bool is_alnum(char32_t c);
bool is_space(char32_t c);

std::string lowercase(std::string_view s);

// Strips ASCII whitespace (and '\r') from both ends.
std::string_view trim(std::string_view s);

// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char delim);

}  // namespace text
}  // namespace normlex

#endif  // NORMLEX_TEXT_H_

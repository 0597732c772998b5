#ifndef NORMLEX_NMT_VOCAB_H_
#define NORMLEX_NMT_VOCAB_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace normlex {
namespace nmt {

// Lowercased character inventory with four reserved ids.
class CharVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kNumSpecials = 4;

  CharVocab() = default;

  // Collects the lowercased characters of `strings`, ordered by codepoint.
  static CharVocab build(const std::vector<std::string> &strings);
  // From an explicit character list (lowercased, deduplicated, sorted).
  static CharVocab from_chars(std::u32string chars);

  int size() const { return kNumSpecials + static_cast<int>(chars_.size()); }
  int id(char32_t c) const;  // kUnk when absent; `c` must already be lowercase
  char32_t character(int id) const;  // U+0000 for specials

  // Lowercases and maps each codepoint.
  std::vector<int> encode(std::string_view s) const;

  const std::u32string &chars() const { return chars_; }

  friend bool operator==(const CharVocab &a, const CharVocab &b) { return a.chars_ == b.chars_; }

 private:
  std::u32string chars_;
  std::map<char32_t, int> ids_;
};

}  // namespace nmt
}  // namespace normlex

#endif  // NORMLEX_NMT_VOCAB_H_

#include "normlex/nmt/vocab.h"

#include <algorithm>
#include <set>

#include "normlex/text.h"

namespace normlex {
namespace nmt {

CharVocab CharVocab::build(const std::vector<std::string> &strings) {
  std::set<char32_t> seen;
  for (const std::string &s : strings) {
    for (char32_t c : text::decode_utf8(s)) seen.insert(text::to_lower(c));
  }
  return from_chars(std::u32string(seen.begin(), seen.end()));
}

CharVocab CharVocab::from_chars(std::u32string chars) {
  for (char32_t &c : chars) c = text::to_lower(c);
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  CharVocab v;
  v.chars_ = std::move(chars);
  for (std::size_t i = 0; i < v.chars_.size(); ++i) {
    v.ids_[v.chars_[i]] = kNumSpecials + static_cast<int>(i);
  }
  return v;
}

int CharVocab::id(char32_t c) const {
  auto it = ids_.find(c);
  return it == ids_.end() ? kUnk : it->second;
}

char32_t CharVocab::character(int id) const {
  if (id < kNumSpecials || id >= size()) return U'\0';
  return chars_[id - kNumSpecials];
}

std::vector<int> CharVocab::encode(std::string_view s) const {
  std::vector<int> ids;
  for (char32_t c : text::decode_utf8(s)) ids.push_back(id(text::to_lower(c)));
  return ids;
}

}  // namespace nmt
}  // namespace normlex

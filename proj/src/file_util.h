#ifndef NORMLEX_SRC_FILE_UTIL_H_
#define NORMLEX_SRC_FILE_UTIL_H_

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace normlex {
namespace internal {

inline std::optional<std::string> read_file(const std::filesystem::path &path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return std::move(ss).str();
}

// Calls fn(line_no, line) for every line, 1-based, with any trailing '\r'
// removed.
template <typename Fn>
void for_each_line(std::string_view contents, Fn &&fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < contents.size()) {
    std::size_t end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    start = end + 1;
  }
}

}  // namespace internal
}  // namespace normlex

#endif  // NORMLEX_SRC_FILE_UTIL_H_

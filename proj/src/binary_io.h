#ifndef NORMLEX_SRC_BINARY_IO_H_
#define NORMLEX_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>

#include "normlex/errors.h"

namespace normlex {
namespace internal {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written little-endian");

class BinaryWriter {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_bytes(std::string_view bytes) { out_.append(bytes); }
  void put_string(std::string_view s) {
    put<uint64_t>(s.size());
    out_.append(s);
  }

  const std::string &data() const { return out_; }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

// Bounds-checked reader; any overrun throws CorruptFile.
class BinaryReader {
 public:
  explicit BinaryReader(std::string_view data) : data_(data) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    T value;
    std::memcpy(&value, take(sizeof(T)).data(), sizeof(T));
    return value;
  }
  std::string_view get_bytes(std::size_t n) { return take(n); }
  std::string get_string() {
    uint64_t n = get<uint64_t>();
    return std::string(take(n));
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view take(uint64_t n) {
    if (n > remaining()) throw CorruptFile("unexpected end of file");
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

inline uint64_t fnv1a(std::string_view bytes, uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace internal
}  // namespace normlex

#endif  // NORMLEX_SRC_BINARY_IO_H_

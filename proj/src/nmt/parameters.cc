#include "normlex/nmt/parameters.h"

#include <string_view>

#include "binary_io.h"

namespace normlex {
namespace nmt {

int TensorTable::add(std::string name, Eigen::Index rows, Eigen::Index cols, bool bias) {
  Tensor t;
  t.name = std::move(name);
  t.rows = rows;
  t.cols = cols;
  t.offset = total_;
  t.bias = bias;
  total_ += t.size();
  tensors_.push_back(std::move(t));
  return static_cast<int>(tensors_.size()) - 1;
}

int TensorTable::find(const std::string &name) const {
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

uint64_t ParamBuffer::checksum() const {
  return internal::fnv1a(std::string_view(reinterpret_cast<const char *>(data_.data()),
                                          data_.size() * sizeof(double)));
}

}  // namespace nmt
}  // namespace normlex

#ifndef NORMLEX_NMT_PARAMETERS_H_
#define NORMLEX_NMT_PARAMETERS_H_

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace normlex {
namespace nmt {

// Names and shapes of the parameter tensors, laid out back to back in one
// flat buffer. Shared between parameters, gradients and optimizer moments.
class TensorTable {
 public:
  struct Tensor {
    std::string name;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::size_t offset = 0;
    bool bias = false;

    std::size_t size() const { return static_cast<std::size_t>(rows * cols); }
  };

  int add(std::string name, Eigen::Index rows, Eigen::Index cols, bool bias = false);

  const std::vector<Tensor> &tensors() const { return tensors_; }
  const Tensor &at(int id) const { return tensors_[id]; }
  std::size_t total_size() const { return total_; }
  int find(const std::string &name) const;  // -1 when absent

 private:
  std::vector<Tensor> tensors_;
  std::size_t total_ = 0;
};

// A flat double buffer viewed through a TensorTable.
class ParamBuffer {
 public:
  using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
  using VectorMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  ParamBuffer() = default;
  explicit ParamBuffer(std::shared_ptr<const TensorTable> table)
      : table_(std::move(table)), data_(table_->total_size(), 0.0) {}

  MatrixMap mat(int id) {
    const auto &t = table_->at(id);
    return MatrixMap(data_.data() + t.offset, t.rows, t.cols);
  }
  ConstMatrixMap mat(int id) const {
    const auto &t = table_->at(id);
    return ConstMatrixMap(data_.data() + t.offset, t.rows, t.cols);
  }
  VectorMap vec(int id) {
    const auto &t = table_->at(id);
    return VectorMap(data_.data() + t.offset, t.rows * t.cols);
  }
  ConstVectorMap vec(int id) const {
    const auto &t = table_->at(id);
    return ConstVectorMap(data_.data() + t.offset, t.rows * t.cols);
  }

  std::vector<double> &data() { return data_; }
  const std::vector<double> &data() const { return data_; }
  const TensorTable &table() const { return *table_; }
  const std::shared_ptr<const TensorTable> &table_ptr() const { return table_; }

  void set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

  // FNV-1a over the raw bytes of the buffer.
  uint64_t checksum() const;

 private:
  std::shared_ptr<const TensorTable> table_;
  std::vector<double> data_;
};

}  // namespace nmt
}  // namespace normlex

#endif  // NORMLEX_NMT_PARAMETERS_H_

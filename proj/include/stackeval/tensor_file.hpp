#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace stackeval {

// Dense row-major tensor of doubles.
struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> data;

  std::size_t size() const;
  Eigen::MatrixXd matrix() const;  // rank 2 (rank 1 reads as a column)
  Eigen::VectorXd vector() const;  // any rank, flattened
  // Slice i of a rank-3 tensor.
  Eigen::MatrixXd slice(std::size_t i) const;

  static Tensor from(std::string name, const Eigen::MatrixXd& m);
  static Tensor from(std::string name, const Eigen::VectorXd& v);
  static Tensor from(std::string name, const std::vector<Eigen::MatrixXd>& slices);
};

struct TensorFile {
  std::vector<Tensor> tensors;

  const Tensor* find(std::string_view name) const;
  const Tensor& at(std::string_view name) const;  // Parse error when missing
};

// "stackeval-tensors 1", then per tensor a header line
// "tensor <name> <rank> <dim>..." followed by the row-major values.
TensorFile parse_tensors(std::string_view text);
std::string serialize_tensors(const TensorFile& file);
TensorFile load_tensors(const std::filesystem::path& path);
void save_tensors(const TensorFile& file, const std::filesystem::path& path);

}  // namespace stackeval

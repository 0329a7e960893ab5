#include "stackeval/tensor_file.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stackeval/error.hpp"

namespace stackeval {

namespace {

constexpr const char* kMagic = "stackeval-tensors";
constexpr int kVersion = 1;

}  // namespace

std::size_t Tensor::size() const {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Eigen::MatrixXd Tensor::matrix() const {
  if (shape.size() == 1) return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(shape[0]));
  if (shape.size() != 2) throw Error(ErrorCode::ShapeMismatch, "tensor '" + name + "' is not a matrix");
  const auto rows = static_cast<Eigen::Index>(shape[0]);
  const auto cols = static_cast<Eigen::Index>(shape[1]);
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(data.data(), rows,
                                                                                                  cols);
}

Eigen::VectorXd Tensor::vector() const {
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

Eigen::MatrixXd Tensor::slice(std::size_t i) const {
  if (shape.size() != 3 || i >= shape[0]) throw Error(ErrorCode::ShapeMismatch, "tensor '" + name + "' has no slice");
  const auto rows = static_cast<Eigen::Index>(shape[1]);
  const auto cols = static_cast<Eigen::Index>(shape[2]);
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      data.data() + i * shape[1] * shape[2], rows, cols);
}

Tensor Tensor::from(std::string name, const Eigen::MatrixXd& m) {
  Tensor t;
  t.name = std::move(name);
  t.shape = {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) t.data.push_back(m(r, c));
  }
  return t;
}

Tensor Tensor::from(std::string name, const Eigen::VectorXd& v) {
  Tensor t;
  t.name = std::move(name);
  t.shape = {static_cast<std::size_t>(v.size())};
  t.data.assign(v.data(), v.data() + v.size());
  return t;
}

Tensor Tensor::from(std::string name, const std::vector<Eigen::MatrixXd>& slices) {
  Tensor t;
  t.name = std::move(name);
  const std::size_t rows = slices.empty() ? 0 : static_cast<std::size_t>(slices.front().rows());
  const std::size_t cols = slices.empty() ? 0 : static_cast<std::size_t>(slices.front().cols());
  t.shape = {slices.size(), rows, cols};
  for (const auto& m : slices) {
    if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
      throw Error(ErrorCode::ShapeMismatch, "slices of '" + t.name + "' differ in shape");
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) t.data.push_back(m(r, c));
    }
  }
  return t;
}

const Tensor* TensorFile::find(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Tensor& TensorFile::at(std::string_view name) const {
  const Tensor* t = find(name);
  if (!t) throw Error(ErrorCode::Parse, "tensor file has no '" + std::string(name) + "'");
  return *t;
}

TensorFile parse_tensors(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  int version = 0;
  if (!(in >> word) || word != kMagic || !(in >> version) || version != kVersion) {
    throw Error(ErrorCode::Parse, "not a stackeval tensor file");
  }
  TensorFile file;
  while (in >> word) {
    if (word != "tensor") throw Error(ErrorCode::Parse, "expected 'tensor', got '" + word + "'");
    Tensor t;
    std::size_t rank = 0;
    if (!(in >> t.name >> rank) || rank == 0 || rank > 3) throw Error(ErrorCode::Parse, "bad tensor header");
    if (file.find(t.name)) throw Error(ErrorCode::Parse, "duplicate tensor '" + t.name + "'");
    t.shape.resize(rank);
    for (auto& d : t.shape) {
      if (!(in >> d)) throw Error(ErrorCode::Parse, "bad shape for '" + t.name + "'");
    }
    t.data.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::string tok;
      if (!(in >> tok)) throw Error(ErrorCode::Parse, "tensor '" + t.name + "' is truncated");
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') throw Error(ErrorCode::Parse, "bad value '" + tok + "'");
      t.data.push_back(v);
    }
    file.tensors.push_back(std::move(t));
  }
  return file;
}

std::string serialize_tensors(const TensorFile& file) {
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << '\n';
  char buf[64];
  for (const auto& t : file.tensors) {
    out << "tensor " << t.name << ' ' << t.shape.size();
    for (std::size_t d : t.shape) out << ' ' << d;
    out << '\n';
    const std::size_t row = t.shape.empty() ? 1 : t.shape.back();
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", t.data[i]);
      out << buf << ((i + 1) % row == 0 ? '\n' : ' ');
    }
  }
  return out.str();
}

TensorFile load_tensors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_tensors(buffer.str());
}

void save_tensors(const TensorFile& file, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << serialize_tensors(file);
}

}  // namespace stackeval

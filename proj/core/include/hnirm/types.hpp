#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hnirm {

/// Dense row-major matrix of doubles. Deliberately minimal: the sampler
/// indexes rows as contiguous spans, which Eigen's default layout does not
/// give us. Postprocessing converts to Eigen where decompositions are needed.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }
  double* row(int r) { return a_.data() + static_cast<size_t>(r) * cols_; }
  const double* row(int r) const { return a_.data() + static_cast<size_t>(r) * cols_; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  size_t size() const { return a_.size(); }
  void fill(double v) { a_.assign(a_.size(), v); }

  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

/// Row-major binary matrix (responses, adjacency layers).
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols, std::uint8_t fill = 0)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::uint8_t& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
  std::uint8_t operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }
  const std::uint8_t* row(int r) const { return a_.data() + static_cast<size_t>(r) * cols_; }

  bool operator==(const BitMatrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> a_;
};

// Error taxonomy. CSV/flag problems surface as ParseError/SchemaError,
// contract violations as ValidationError/DomainError, sampler failures as
// ChainError.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ChainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hnirm

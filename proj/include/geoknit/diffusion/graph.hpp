#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace geoknit {

/// Row-major dense matrix of doubles.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}
  double& operator()(std::size_t i, std::size_t j) { return v[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
  double* row(std::size_t i) { return v.data() + i * cols; }
  const double* row(std::size_t i) const { return v.data() + i * cols; }
  friend bool operator==(const Mat&, const Mat&) = default;
};

/// Named trainable tensors with their gradient and optimizer state.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Mat value;
    Mat grad;
    Mat m1;  // momentum / first moment
    Mat m2;  // second moment (Adam)
  };

  /// Adds a parameter initialised N(0, stddev^2) (stddev 0 gives zeros).
  Entry& add(const std::string& name, std::size_t rows, std::size_t cols, double stddev, std::mt19937_64& rng);
  Entry& get(const std::string& name);
  const Entry& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  void zero_grad();
  std::size_t parameter_count() const;

 private:
  std::vector<Entry> entries_;
};

/// Reverse-mode autodiff tape over matrices. Build the forward pass with the
/// op methods, then call backward() once.
class Graph {
 public:
  using Id = int;

  Id constant(Mat m);
  Id param(ParamStore::Entry& p);

  Id matmul(Id a, Id b);     // a * b
  Id matmul_nt(Id a, Id b);  // a * b^T
  Id add(Id a, Id b);
  Id add_row(Id a, Id row);  // row (1 x c) broadcast over a's rows
  /// Adds row to the rows of a where mask[i] != 0.
  Id add_row_masked(Id a, Id row, const std::vector<std::uint8_t>& mask);
  Id silu(Id a);
  Id softmax_rows(Id a);
  Id scale(Id a, double s);
  Id concat_rows(Id a, Id b);

  const Mat& value(Id id) const;
  /// Seeds d(out) = grad_out and accumulates into parameter gradients.
  void backward(Id out, const Mat& grad_out);

 private:
  enum class Op { leaf, param, matmul, matmul_nt, add, add_row, add_row_masked, silu, softmax, scale, concat };
  struct Node {
    Op op = Op::leaf;
    Id a = -1;
    Id b = -1;
    double s = 0.0;
    Mat value;
    Mat grad;
    ParamStore::Entry* param = nullptr;
    std::vector<std::uint8_t> mask;
  };
  Id push(Node n);
  Mat& grad_of(Id id);

  std::vector<Node> nodes_;
};

}  // namespace geoknit

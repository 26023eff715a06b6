#include "geoknit/diffusion/graph.hpp"

#include <algorithm>
#include <cmath>

#include "geoknit/error.hpp"
#include "geoknit/simd/kernels.hpp"

namespace geoknit {

ParamStore::Entry& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols, double stddev,
                                   std::mt19937_64& rng) {
  if (contains(name)) throw Error("invalid-argument", "duplicate parameter " + name);
  Entry e;
  e.name = name;
  e.value = Mat(rows, cols);
  if (stddev > 0.0) {
    std::normal_distribution<double> nd(0.0, stddev);
    for (double& x : e.value.v) x = nd(rng);
  }
  e.grad = Mat(rows, cols);
  e.m1 = Mat(rows, cols);
  e.m2 = Mat(rows, cols);
  entries_.push_back(std::move(e));
  return entries_.back();
}

ParamStore::Entry& ParamStore::get(const std::string& name) {
  for (auto& e : entries_)
    if (e.name == name) return e;
  throw Error("missing-parameter", name);
}

const ParamStore::Entry& ParamStore::get(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e;
  throw Error("missing-parameter", name);
}

bool ParamStore::contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

void ParamStore::zero_grad() {
  for (auto& e : entries_) std::fill(e.grad.v.begin(), e.grad.v.end(), 0.0);
}

std::size_t ParamStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.v.size();
  return n;
}

namespace {

Mat transpose(const Mat& m) {
  Mat t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

// c += a * b
void gemm(const Mat& a, const Mat& b, Mat& c) {
  simd::kernels().gemm_acc(a.rows, a.cols, b.cols, a.v.data(), a.cols, b.v.data(), b.cols, c.v.data(), c.cols);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Graph::Id Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

const Mat& Graph::value(Id id) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  return n.param ? n.param->value : n.value;
}

Mat& Graph::grad_of(Id id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.v.empty()) {
    const Mat& v = value(id);
    n.grad = Mat(v.rows, v.cols);
  }
  return n.grad;
}

Graph::Id Graph::constant(Mat m) {
  Node n;
  n.value = std::move(m);
  return push(std::move(n));
}

Graph::Id Graph::param(ParamStore::Entry& p) {
  Node n;
  n.op = Op::param;
  n.param = &p;
  return push(std::move(n));
}

Graph::Id Graph::matmul(Id a, Id b) {
  const Mat& x = value(a);
  const Mat& y = value(b);
  if (x.cols != y.rows) throw Error("shape-mismatch", "matmul");
  Node n;
  n.op = Op::matmul;
  n.a = a;
  n.b = b;
  n.value = Mat(x.rows, y.cols);
  gemm(x, y, n.value);
  return push(std::move(n));
}

Graph::Id Graph::matmul_nt(Id a, Id b) {
  const Mat& x = value(a);
  const Mat& y = value(b);
  if (x.cols != y.cols) throw Error("shape-mismatch", "matmul_nt");
  Node n;
  n.op = Op::matmul_nt;
  n.a = a;
  n.b = b;
  n.value = Mat(x.rows, y.rows);
  gemm(x, transpose(y), n.value);
  return push(std::move(n));
}

Graph::Id Graph::add(Id a, Id b) {
  const Mat& x = value(a);
  const Mat& y = value(b);
  if (x.rows != y.rows || x.cols != y.cols) throw Error("shape-mismatch", "add");
  Node n;
  n.op = Op::add;
  n.a = a;
  n.b = b;
  n.value = x;
  for (std::size_t i = 0; i < y.v.size(); ++i) n.value.v[i] += y.v[i];
  return push(std::move(n));
}

Graph::Id Graph::add_row(Id a, Id row) {
  const Mat& x = value(a);
  const Mat& r = value(row);
  if (r.rows != 1 || r.cols != x.cols) throw Error("shape-mismatch", "add_row");
  Node n;
  n.op = Op::add_row;
  n.a = a;
  n.b = row;
  n.value = x;
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) n.value(i, j) += r.v[j];
  return push(std::move(n));
}

Graph::Id Graph::add_row_masked(Id a, Id row, const std::vector<std::uint8_t>& mask) {
  const Mat& x = value(a);
  const Mat& r = value(row);
  if (r.rows != 1 || r.cols != x.cols || mask.size() != x.rows) throw Error("shape-mismatch", "add_row_masked");
  Node n;
  n.op = Op::add_row_masked;
  n.a = a;
  n.b = row;
  n.mask = mask;
  n.value = x;
  for (std::size_t i = 0; i < x.rows; ++i)
    if (mask[i])
      for (std::size_t j = 0; j < x.cols; ++j) n.value(i, j) += r.v[j];
  return push(std::move(n));
}

Graph::Id Graph::silu(Id a) {
  Node n;
  n.op = Op::silu;
  n.a = a;
  n.value = value(a);
  for (double& x : n.value.v) x = x * sigmoid(x);
  return push(std::move(n));
}

Graph::Id Graph::softmax_rows(Id a) {
  Node n;
  n.op = Op::softmax;
  n.a = a;
  n.value = value(a);
  Mat& y = n.value;
  for (std::size_t i = 0; i < y.rows; ++i) {
    double* r = y.row(i);
    const double mx = *std::max_element(r, r + y.cols);
    double sum = 0.0;
    for (std::size_t j = 0; j < y.cols; ++j) {
      r[j] = std::exp(r[j] - mx);
      sum += r[j];
    }
    for (std::size_t j = 0; j < y.cols; ++j) r[j] /= sum;
  }
  return push(std::move(n));
}

Graph::Id Graph::scale(Id a, double s) {
  Node n;
  n.op = Op::scale;
  n.a = a;
  n.s = s;
  n.value = value(a);
  for (double& x : n.value.v) x *= s;
  return push(std::move(n));
}

Graph::Id Graph::concat_rows(Id a, Id b) {
  const Mat& x = value(a);
  const Mat& y = value(b);
  if (x.cols != y.cols) throw Error("shape-mismatch", "concat_rows");
  Node n;
  n.op = Op::concat;
  n.a = a;
  n.b = b;
  n.value = Mat(x.rows + y.rows, x.cols);
  std::copy(x.v.begin(), x.v.end(), n.value.v.begin());
  std::copy(y.v.begin(), y.v.end(), n.value.v.begin() + static_cast<std::ptrdiff_t>(x.v.size()));
  return push(std::move(n));
}

void Graph::backward(Id out, const Mat& grad_out) {
  {
    const Mat& v = value(out);
    if (grad_out.rows != v.rows || grad_out.cols != v.cols) throw Error("shape-mismatch", "backward seed");
  }
  grad_of(out) = grad_out;
  for (Id id = out; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.v.empty()) continue;
    const Mat& g = n.grad;
    switch (n.op) {
      case Op::leaf:
        break;
      case Op::param:
        for (std::size_t i = 0; i < g.v.size(); ++i) n.param->grad.v[i] += g.v[i];
        break;
      case Op::matmul: {
        const Mat& x = value(n.a);
        const Mat& y = value(n.b);
        gemm(g, transpose(y), grad_of(n.a));
        gemm(transpose(x), g, grad_of(n.b));
        break;
      }
      case Op::matmul_nt: {
        const Mat& x = value(n.a);
        const Mat& y = value(n.b);
        gemm(g, y, grad_of(n.a));
        gemm(transpose(g), x, grad_of(n.b));
        break;
      }
      case Op::add: {
        Mat& ga = grad_of(n.a);
        for (std::size_t i = 0; i < g.v.size(); ++i) ga.v[i] += g.v[i];
        Mat& gb = grad_of(n.b);
        for (std::size_t i = 0; i < g.v.size(); ++i) gb.v[i] += g.v[i];
        break;
      }
      case Op::add_row:
      case Op::add_row_masked: {
        Mat& ga = grad_of(n.a);
        for (std::size_t i = 0; i < g.v.size(); ++i) ga.v[i] += g.v[i];
        Mat& gr = grad_of(n.b);
        for (std::size_t i = 0; i < g.rows; ++i)
          if (n.op == Op::add_row || n.mask[i])
            for (std::size_t j = 0; j < g.cols; ++j) gr.v[j] += g(i, j);
        break;
      }
      case Op::silu: {
        const Mat& x = value(n.a);
        Mat& ga = grad_of(n.a);
        for (std::size_t i = 0; i < g.v.size(); ++i) {
          const double s = sigmoid(x.v[i]);
          ga.v[i] += g.v[i] * s * (1.0 + x.v[i] * (1.0 - s));
        }
        break;
      }
      case Op::softmax: {
        const Mat& y = n.value;
        Mat& ga = grad_of(n.a);
        for (std::size_t i = 0; i < y.rows; ++i) {
          double dotp = 0.0;
          for (std::size_t j = 0; j < y.cols; ++j) dotp += g(i, j) * y(i, j);
          for (std::size_t j = 0; j < y.cols; ++j) ga(i, j) += y(i, j) * (g(i, j) - dotp);
        }
        break;
      }
      case Op::scale: {
        Mat& ga = grad_of(n.a);
        for (std::size_t i = 0; i < g.v.size(); ++i) ga.v[i] += n.s * g.v[i];
        break;
      }
      case Op::concat: {
        Mat& ga = grad_of(n.a);
        Mat& gb = grad_of(n.b);
        for (std::size_t i = 0; i < ga.v.size(); ++i) ga.v[i] += g.v[i];
        for (std::size_t i = 0; i < gb.v.size(); ++i) gb.v[i] += g.v[ga.v.size() + i];
        break;
      }
    }
  }
}

}  // namespace geoknit

// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/tensor.hpp"

#include <cmath>
#include <string>

#include "oodppo/errors.hpp"

namespace oodppo {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

std::string shape_str(const Tensor& t) {
  return "[" + std::to_string(t.rows()) + "," + std::to_string(t.cols()) + "]";
}

}  // namespace

Tensor Tensor::full(int rows, int cols, double v) {
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = v;
  return t;
}

Tensor Tensor::from(int rows, int cols, std::vector<double> data) {
  require(static_cast<std::size_t>(rows) * cols == data.size(),
          "Tensor::from: data length does not match shape");
  Tensor t;
  t.rows_ = rows;
  t.cols_ = cols;
  t.data_ = std::move(data);
  return t;
}

Tensor Tensor::scalar(double v) { return from(1, 1, {v}); }

Tensor Tensor::row(const std::vector<double>& v) {
  return from(1, static_cast<int>(v.size()), v);
}

double Tensor::item() const {
  require(rows_ == 1 && cols_ == 1, "Tensor::item: tensor is not 1x1");
  return data_[0];
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ " + shape_str(a) + " x " + shape_str(b));
  Tensor out(a.rows(), b.cols());
  const int n = a.rows(), k = a.cols(), m = b.cols();
  for (int i = 0; i < n; ++i) {
    double* out_row = out.data() + static_cast<std::size_t>(i) * m;
    const double* a_row = a.data() + static_cast<std::size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double av = a_row[p];
      if (av == 0.0) continue;
      const double* b_row = b.data() + static_cast<std::size_t>(p) * m;
      for (int j = 0; j < m; ++j) out_row[j] += av * b_row[j];
    }
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require(a.same_shape(b), "add: shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require(a.same_shape(b), "sub: shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require(a.same_shape(b), "mul: shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  require(row.rows() == 1 && row.cols() == a.cols(), "add_row: row shape mismatch");
  Tensor out = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) += row(0, j);
  return out;
}

Tensor mul_row(const Tensor& a, const Tensor& row) {
  require(row.rows() == 1 && row.cols() == a.cols(), "mul_row: row shape mismatch");
  Tensor out = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) *= row(0, j);
  return out;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  return out;
}

Tensor add_const(const Tensor& a, double c) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c;
  return out;
}

Tensor tanh_map(const Tensor& a) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  return out;
}

Tensor exp_map(const Tensor& a) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(out[i]);
  return out;
}

Tensor clamp_map(const Tensor& a, double lo, double hi) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < lo) out[i] = lo;
    if (out[i] > hi) out[i] = hi;
  }
  return out;
}

Tensor minimum(const Tensor& a, const Tensor& b) {
  require(a.same_shape(b), "minimum: shape mismatch");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (a[i] <= b[i]) ? a[i] : b[i];
  return out;
}

Tensor colsum(const Tensor& a) {
  Tensor out(1, a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(0, j) += a(i, j);
  return out;
}

double sum_all(const Tensor& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i];
  return s;
}

double mean_all(const Tensor& a) {
  require(!a.empty(), "mean_all: empty tensor");
  return sum_all(a) / static_cast<double>(a.size());
}

double l2_norm(const Tensor& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

bool all_finite(const Tensor& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

void axpy(Tensor& y, const Tensor& x, double alpha) {
  require(y.same_shape(x), "axpy: shape mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

double pop_mean(const std::vector<double>& xs) {
  if (xs.empty()) throw ConfigError("pop_mean: empty input");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double pop_std(const std::vector<double>& xs) {
  // Exact zero on agreement (the mean of k copies of x need not round
  // back to x, which would leave a spurious ~1e-17 residue).
  bool all_equal = true;
  for (double x : xs) all_equal = all_equal && (x == xs[0]);
  if (all_equal) return 0.0;
  const double m = pop_mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace oodppo

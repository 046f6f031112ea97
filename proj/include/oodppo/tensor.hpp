// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace oodppo {

// Dense row-major matrix of doubles. Vectors are [1, n] rows, scalars are
// [1, 1]. This is the only numeric container in the library.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  static Tensor zeros(int rows, int cols) { return Tensor(rows, cols); }
  static Tensor full(int rows, int cols, double v);
  static Tensor from(int rows, int cols, std::vector<double> data);
  static Tensor scalar(double v);
  static Tensor row(const std::vector<double>& v);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& vec() const { return data_; }

  double item() const;  // requires 1x1

  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Kernels. All of them check shapes and throw ConfigError on mismatch.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add_row(const Tensor& a, const Tensor& row);  // row is [1, cols]
Tensor mul_row(const Tensor& a, const Tensor& row);
Tensor scale(const Tensor& a, double c);
Tensor add_const(const Tensor& a, double c);
Tensor tanh_map(const Tensor& a);
Tensor exp_map(const Tensor& a);
Tensor clamp_map(const Tensor& a, double lo, double hi);
Tensor minimum(const Tensor& a, const Tensor& b);
Tensor colsum(const Tensor& a);  // [1, cols]
double sum_all(const Tensor& a);
double mean_all(const Tensor& a);
double l2_norm(const Tensor& a);
bool all_finite(const Tensor& a);

// In-place y += alpha * x (shapes must match).
void axpy(Tensor& y, const Tensor& x, double alpha = 1.0);

// Population mean and standard deviation (divide by n) of a sequence.
double pop_mean(const std::vector<double>& xs);
double pop_std(const std::vector<double>& xs);

}  // namespace oodppo

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "multisiam/errors.h"

namespace multisiam {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

/// Dense row-major array of doubles with an explicit shape.
///
/// The flat buffer length always equals the product of the shape. There is no
/// broadcasting: every operation below spells out the shapes it accepts.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor filled(Shape shape, double value);
  /// 2-D tensor from nested rows; all rows must have equal length.
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;
  double& at(std::size_t i, std::size_t j, std::size_t k);
  double at(std::size_t i, std::size_t j, std::size_t k) const;

  /// Row `i` of the tensor viewed as [dim(0), size()/dim(0)].
  std::span<double> row(std::size_t i);
  std::span<const double> row(std::size_t i) const;

  /// Same data under a new shape with equal element count.
  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;

  void fill(double value);
  bool all_finite() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// [m x k] * [k x n]. Accumulates each output in ascending k order.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
double sigmoid(double x) noexcept;

/// Row-wise softmax of a 2-D tensor, stabilised by subtracting the row max.
Tensor softmax_rows(const Tensor& x);

struct NormalizedRows {
  Tensor rows;
  std::vector<double> norms;
  /// True where the input row norm fell below eps; that output row is zero.
  std::vector<bool> degenerate;
};

NormalizedRows l2_normalize_rows(const Tensor& x, double eps = 1e-12);

}  // namespace multisiam

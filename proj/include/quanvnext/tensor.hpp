#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "quanvnext/error.hpp"

namespace quanvnext {

// Dense row-major 2-D array of doubles. Feature maps are (channels, length);
// parameter banks use whatever 2-D layout their owner documents.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ArgumentError("Tensor: data size does not match shape");
    }
  }

  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Tensor t;
    t.rows_ = rows.size();
    t.cols_ = rows.size() ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      if (r.size() != t.cols_) throw ArgumentError("Tensor::from_rows: ragged rows");
      t.data_.insert(t.data_.end(), r.begin(), r.end());
    }
    return t;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  bool same_shape(const Tensor& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }
  std::string shape_string() const {
    return "(" + std::to_string(rows_) + ", " + std::to_string(cols_) + ")";
  }

  Tensor& operator+=(const Tensor& o) {
    if (!same_shape(o)) throw ArgumentError("Tensor +=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace quanvnext

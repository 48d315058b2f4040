#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

#include "ctgrade/rng.hpp"

namespace ctgrade::nn {

using Shape = std::vector<std::int64_t>;

std::string shape_str(const Shape& s);
std::int64_t shape_numel(const Shape& s);

// Dense row-major double tensor, rank 0..5. Deep-copy value semantics.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(Shape shape)
      : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_numel(shape_))) {}

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor full(Shape shape, double v) {
    Tensor t(std::move(shape));
    t.fill(v);
    return t;
  }
  static Tensor randn(Shape shape, Rng& rng, double stddev = 1.0) {
    Tensor t(std::move(shape));
    for (auto& x : t.data_) x = stddev * rng.normal();
    return t;
  }
  static Tensor uniform(Shape shape, Rng& rng, double lo, double hi) {
    Tensor t(std::move(shape));
    for (auto& x : t.data_) x = rng.uniform(lo, hi);
    return t;
  }

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::int64_t size(int dim) const { return shape_[static_cast<std::size_t>(dim)]; }
  std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  double& at(std::int64_t a) { return data_[idx(a)]; }
  double& at(std::int64_t a, std::int64_t b) { return data_[idx(a, b)]; }
  double& at(std::int64_t a, std::int64_t b, std::int64_t c) { return data_[idx(a, b, c)]; }
  double& at(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return data_[idx(a, b, c, d)];
  }
  double& at(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, std::int64_t e) {
    return data_[idx(a, b, c, d, e)];
  }
  double at(std::int64_t a) const { return data_[idx(a)]; }
  double at(std::int64_t a, std::int64_t b) const { return data_[idx(a, b)]; }
  double at(std::int64_t a, std::int64_t b, std::int64_t c) const { return data_[idx(a, b, c)]; }
  double at(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) const {
    return data_[idx(a, b, c, d)];
  }
  double at(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
            std::int64_t e) const {
    return data_[idx(a, b, c, d, e)];
  }

  void fill(double v) {
    for (auto& x : data_) x = v;
  }
  void zero() { fill(0.0); }

  // Reinterpret the same buffer with a new shape (numel must match).
  void reshape(Shape shape);

  double sum() const;
  double min() const;
  double max() const;
  std::int64_t argmax() const;

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

private:
  std::size_t idx(std::int64_t a) const {
    assert(rank() == 1);
    return static_cast<std::size_t>(a);
  }
  std::size_t idx(std::int64_t a, std::int64_t b) const {
    assert(rank() == 2);
    return static_cast<std::size_t>(a * shape_[1] + b);
  }
  std::size_t idx(std::int64_t a, std::int64_t b, std::int64_t c) const {
    assert(rank() == 3);
    return static_cast<std::size_t>((a * shape_[1] + b) * shape_[2] + c);
  }
  std::size_t idx(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) const {
    assert(rank() == 4);
    return static_cast<std::size_t>(((a * shape_[1] + b) * shape_[2] + c) * shape_[3] + d);
  }
  std::size_t idx(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
                  std::int64_t e) const {
    assert(rank() == 5);
    return static_cast<std::size_t>(
        (((a * shape_[1] + b) * shape_[2] + c) * shape_[3] + d) * shape_[4] + e);
  }

  Shape shape_;
  std::vector<double> data_;
};

}  // namespace ctgrade::nn

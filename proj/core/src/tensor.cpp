#include "ctgrade/tensor.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctgrade::nn {

std::string shape_str(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

std::int64_t shape_numel(const Shape& s) {
  std::int64_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

void Tensor::reshape(Shape shape) {
  if (shape_numel(shape) != numel())
    throw std::invalid_argument("Tensor::reshape: numel mismatch " + shape_str(shape_) +
                                " -> " + shape_str(shape));
  shape_ = std::move(shape);
}

double Tensor::sum() const {
  double s = 0.0;
  for (double x : data_) s += x;
  return s;
}

double Tensor::min() const { return *std::min_element(data_.begin(), data_.end()); }
double Tensor::max() const { return *std::max_element(data_.begin(), data_.end()); }

std::int64_t Tensor::argmax() const {
  return std::max_element(data_.begin(), data_.end()) - data_.begin();
}

}  // namespace ctgrade::nn

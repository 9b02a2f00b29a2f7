#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sentiscore/error.hpp"

namespace sentiscore {

// Dense row-major tensor of doubles. Rank is dynamic; in this codebase it is
// always 1, 2 or 3.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> dims) {
    Tensor t;
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    t.shape = std::move(dims);
    t.data.assign(total, 0.0);
    return t;
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape[i]; }

  double& at(std::size_t i) { return data[i]; }
  double at(std::size_t i) const { return data[i]; }

  double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  double at(std::size_t i, std::size_t j) const {
    return data[i * shape[1] + j];
  }

  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return data[(i * shape[1] + j) * shape[2] + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * shape[1] + j) * shape[2] + k];
  }

  // Raw pointer to row i of a rank-2 tensor.
  double* row(std::size_t i) { return data.data() + i * shape[1]; }
  const double* row(std::size_t i) const { return data.data() + i * shape[1]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  void fill(double value) { data.assign(data.size(), value); }

  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

inline void require_same_shape(const Tensor& a, const Tensor& b,
                               const std::string& what) {
  if (!a.same_shape(b)) {
    throw ShapeError("shape mismatch in " + what);
  }
}

}  // namespace sentiscore

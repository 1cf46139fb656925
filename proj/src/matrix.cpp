#include "wordmap/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "wordmap/error.hpp"

namespace wordmap {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw ValidationError("matrix data size does not match shape");
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace wordmap

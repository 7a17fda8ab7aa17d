#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stockemb/errors.hpp"

namespace stockemb {

// Dense row-major matrix of doubles. Row views are spans, so per-asset
// vectors can be passed around without copying.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return d_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return d_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return d_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {d_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {d_.data() + r * cols_, cols_}; }

    // Column copy; rows are the contiguous axis, so columns must be gathered.
    std::vector<double> col(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }

    bool operator==(const Matrix&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> d_;
};

}  // namespace stockemb

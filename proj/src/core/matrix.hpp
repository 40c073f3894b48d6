#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace mcr {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

    double column_sum(std::size_t c) const {
        double s = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) s += (*this)(r, c);
        return s;
    }
    double row_sum(std::size_t r) const {
        double s = 0.0;
        for (double v : row(r)) s += v;
        return s;
    }
    double sum() const {
        double s = 0.0;
        for (double v : data_) s += v;
        return s;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace mcr

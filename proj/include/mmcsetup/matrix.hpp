#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace mmcsetup {

/// Small dense row-major matrix. The QBD blocks are at most (c+1) x (c+2).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t k = 0; k < n; ++k)
            m(k, k) = 1.0;
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    double operator()(std::size_t r, std::size_t c) const noexcept {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    Matrix& operator+=(const Matrix& o) {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        for (std::size_t k = 0; k < data_.size(); ++k)
            data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        assert(rows_ == o.rows_ && cols_ == o.cols_);
        for (std::size_t k = 0; k < data_.size(); ++k)
            data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(double s) {
        for (double& v : data_)
            v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        assert(a.cols_ == b.rows_);
        Matrix out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r) {
            auto dst = out.row(r);
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double v = a(r, k);
                if (v == 0.0)
                    continue;
                auto src = b.row(k);
                for (std::size_t c = 0; c < b.cols_; ++c)
                    dst[c] += v * src[c];
            }
        }
        return out;
    }

    /// Max absolute row sum.
    [[nodiscard]] double norm_inf() const noexcept {
        double best = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            double s = 0.0;
            for (double v : row(r))
                s += std::abs(v);
            best = std::max(best, s);
        }
        return best;
    }

    [[nodiscard]] double max_abs() const noexcept {
        double best = 0.0;
        for (double v : data_)
            best = std::max(best, std::abs(v));
        return best;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Row vector times matrix.
inline std::vector<double> vec_mat(std::span<const double> x, const Matrix& m) {
    assert(x.size() == m.rows());
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t k = 0; k < m.rows(); ++k) {
        if (x[k] == 0.0)
            continue;
        auto src = m.row(k);
        for (std::size_t c = 0; c < m.cols(); ++c)
            out[c] += x[k] * src[c];
    }
    return out;
}

/// Solves y * U = b for y, with U upper triangular (square).
inline std::vector<double> solve_row_upper(std::span<const double> b, const Matrix& u) {
    const std::size_t n = u.rows();
    assert(u.cols() == n && b.size() == n);
    std::vector<double> y(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
        y[k] /= u(k, k);
        auto urow = u.row(k);
        for (std::size_t l = k + 1; l < n; ++l)
            y[l] -= y[k] * urow[l];
    }
    return y;
}

/// Solves U * x = b for x, with U upper triangular (square).
inline std::vector<double> solve_col_upper(const Matrix& u, std::span<const double> b) {
    const std::size_t n = u.rows();
    assert(u.cols() == n && b.size() == n);
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t k = n; k-- > 0;) {
        double s = x[k];
        auto urow = u.row(k);
        for (std::size_t l = k + 1; l < n; ++l)
            s -= urow[l] * x[l];
        x[k] = s / u(k, k);
    }
    return x;
}

inline double sum(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v)
        s += x;
    return s;
}

}  // namespace mmcsetup

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "entropy_games/graph.hpp"

namespace entropy_games {

using Vector = std::vector<double>;

/// Dense row-major square matrix.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()), data_() {
        data_.reserve(n_ * n_);
        for (const auto& row : rows) {
            if (row.size() != n_) throw std::invalid_argument("Matrix: rows must form a square");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    std::size_t size() const { return n_; }
    double& operator()(Index i, Index j) { return data_[i * n_ + j]; }
    double operator()(Index i, Index j) const { return data_[i * n_ + j]; }
    std::span<double> row(Index i) { return {data_.data() + i * n_, n_}; }
    std::span<const double> row(Index i) const { return {data_.data() + i * n_, n_}; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

inline Vector multiply(const Matrix& m, std::span<const double> x) {
    const std::size_t n = m.size();
    Vector y(n, 0.0);
    for (Index i = 0; i < n; ++i) {
        const auto r = m.row(i);
        double s = 0.0;
        for (Index j = 0; j < n; ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

/// y = x^T M (row vector times matrix).
inline Vector multiply_left(std::span<const double> x, const Matrix& m) {
    const std::size_t n = m.size();
    Vector y(n, 0.0);
    for (Index i = 0; i < n; ++i) {
        if (x[i] == 0.0) continue;
        const auto r = m.row(i);
        for (Index j = 0; j < n; ++j) y[j] += x[i] * r[j];
    }
    return y;
}

inline Matrix transpose(const Matrix& m) {
    Matrix t(m.size());
    for (Index i = 0; i < m.size(); ++i)
        for (Index j = 0; j < m.size(); ++j) t(j, i) = m(i, j);
    return t;
}

inline Matrix submatrix(const Matrix& m, const std::vector<Index>& nodes) {
    Matrix s(nodes.size());
    for (Index i = 0; i < nodes.size(); ++i)
        for (Index j = 0; j < nodes.size(); ++j) s(i, j) = m(nodes[i], nodes[j]);
    return s;
}

/// Digraph with an arc i -> j for every positive entry.
inline Digraph digraph_of(const Matrix& m) {
    Digraph g(m.size());
    for (Index i = 0; i < m.size(); ++i)
        for (Index j = 0; j < m.size(); ++j)
            if (m(i, j) > 0.0) g[i].push_back(j);
    return g;
}

inline double sup_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline Vector solve_linear(Matrix a, Vector b) {
    const std::size_t n = a.size();
    for (Index col = 0; col < n; ++col) {
        Index pivot = col;
        for (Index r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (a(pivot, col) == 0.0) throw std::runtime_error("solve_linear: singular matrix");
        if (pivot != col) {
            for (Index j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        for (Index r = col + 1; r < n; ++r) {
            const double factor = a(r, col) / a(col, col);
            if (factor == 0.0) continue;
            for (Index j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
            b[r] -= factor * b[col];
        }
    }
    Vector x(n, 0.0);
    for (Index i = n; i-- > 0;) {
        double s = b[i];
        for (Index j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

}  // namespace entropy_games

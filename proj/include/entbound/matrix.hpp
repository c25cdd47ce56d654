#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "entbound/errors.hpp"

namespace entbound {

// Dense real matrix, row-major storage. Small orders only (desk scale);
// everything is by value, entries are required to be finite.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols);
    Matrix(int rows, int cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(int n);
    static Matrix zero(int rows, int cols);
    static Matrix diag(const std::vector<double>& d);
    static Matrix column(const std::vector<double>& v);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }
    bool is_square() const { return rows_ == cols_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transpose() const;
    double trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    // Throws NonFiniteValue if any entry is NaN or infinite.
    void ensure_finite(const char* what = "matrix") const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(Matrix a, double s);
Matrix operator-(Matrix a);

// <A, B>_F = Tr(A^T B)
double frobenius_inner(const Matrix& a, const Matrix& b);

// Largest |a_ij - b_ij|; matrices must have equal shape.
double max_abs_diff(const Matrix& a, const Matrix& b);

bool same_shape(const Matrix& a, const Matrix& b);

}  // namespace entbound

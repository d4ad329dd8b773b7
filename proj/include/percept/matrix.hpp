#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "percept/errors.hpp"

namespace percept::numerics {

/// Dense real vector.
class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t dim) : e_(dim, 0.0) {}
    Vec(std::initializer_list<double> entries);

    std::size_t dim() const { return e_.size(); }
    double& operator[](std::size_t i) { return e_[i]; }
    double operator[](std::size_t i) const { return e_[i]; }
    const std::vector<double>& entries() const { return e_; }

    Vec& operator+=(const Vec& o);
    Vec& operator-=(const Vec& o);
    Vec& operator*=(double s);

    double norm2() const;
    double norm_inf() const;
    bool all_finite() const;

private:
    std::vector<double> e_;
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);
double dot(const Vec& a, const Vec& b);

/// Dense real matrix, row-major.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols, 0.0) {}
    /// Row-major entries; throws DimensionError on a count mismatch and
    /// ParameterError on non-finite entries.
    Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> entries);

    static Mat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

    Mat transposed() const;
    Vec col(std::size_t j) const;
    Vec row(std::size_t i) const;
    void set_col(std::size_t j, const Vec& v);

    double norm_inf() const;  // max absolute row sum
    double max_abs() const;
    bool all_finite() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> e_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, const Vec& x);

/// Horizontal concatenation [a | b].
Mat hcat(const Mat& a, const Mat& b);

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Throws SingularMatrixError (carrying the failing pivot magnitude) when a
/// pivot falls below 1e-13 times the largest entry of A.
Vec solve_linear(const Mat& A, const Vec& b);

/// Multi-right-hand-side variant of solve_linear.
Mat solve_linear(const Mat& A, const Mat& rhs);

Mat inverse(const Mat& A);

/// Minimum-norm solution A^T (A A^T)^{-1} rhs of A X = rhs for a wide matrix A
/// with full row rank. Throws RankError when A A^T is singular.
Mat min_norm_solve(const Mat& A, const Mat& rhs);

/// Numerical rank via row echelon with partial pivoting; a pivot counts when
/// it exceeds tol_rel times the largest entry of the input.
std::size_t rank(const Mat& A, double tol_rel = 1e-10);

} // namespace percept::numerics

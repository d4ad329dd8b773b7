#include "percept/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace percept::numerics {

Vec::Vec(std::initializer_list<double> entries) : e_(entries) {
    for (double v : e_) {
        if (!std::isfinite(v)) throw ParameterError("Vec entry is not finite");
    }
}

Vec& Vec::operator+=(const Vec& o) {
    if (dim() != o.dim()) throw DimensionError("Vec += dimension mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& o) {
    if (dim() != o.dim()) throw DimensionError("Vec -= dimension mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
}

Vec& Vec::operator*=(double s) {
    for (double& v : e_) v *= s;
    return *this;
}

double Vec::norm2() const {
    double acc = 0.0;
    for (double v : e_) acc += v * v;
    return std::sqrt(acc);
}

double Vec::norm_inf() const {
    double m = 0.0;
    for (double v : e_) m = std::max(m, std::abs(v));
    return m;
}

bool Vec::all_finite() const {
    return std::all_of(e_.begin(), e_.end(), [](double v) { return std::isfinite(v); });
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator*(double s, Vec a) { return a *= s; }

double dot(const Vec& a, const Vec& b) {
    if (a.dim() != b.dim()) throw DimensionError("dot dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
    return acc;
}

Mat::Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> entries)
    : rows_(rows), cols_(cols), e_(entries) {
    if (e_.size() != rows * cols)
        throw DimensionError("Mat initializer has " + std::to_string(e_.size()) +
                             " entries, expected " + std::to_string(rows * cols));
    for (double v : e_) {
        if (!std::isfinite(v)) throw ParameterError("Mat entry is not finite");
    }
}

Mat Mat::identity(std::size_t n) {
    Mat I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

Mat& Mat::operator+=(const Mat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("Mat += dimension mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("Mat -= dimension mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& v : e_) v *= s;
    return *this;
}

Mat Mat::transposed() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vec Mat::col(std::size_t j) const {
    Vec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

Vec Mat::row(std::size_t i) const {
    Vec v(cols_);
    for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
    return v;
}

void Mat::set_col(std::size_t j, const Vec& v) {
    if (v.dim() != rows_) throw DimensionError("set_col dimension mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

double Mat::norm_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (double v : e_) m = std::max(m, std::abs(v));
    return m;
}

bool Mat::all_finite() const {
    return std::all_of(e_.begin(), e_.end(), [](double v) { return std::isfinite(v); });
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw DimensionError("Mat * Mat dimension mismatch");
    Mat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec operator*(const Mat& a, const Vec& x) {
    if (a.cols() != x.dim()) throw DimensionError("Mat * Vec dimension mismatch");
    Vec y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Mat hcat(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw DimensionError("hcat row mismatch");
    Mat c(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
    }
    return c;
}

namespace {

// In-place elimination on [A | rhs]; returns the reduced augmented matrix.
Mat eliminate(const Mat& A, const Mat& rhs) {
    if (!A.square()) throw DimensionError("solve_linear requires a square matrix");
    if (A.rows() != rhs.rows()) throw DimensionError("solve_linear rhs row mismatch");
    const std::size_t n = A.rows();
    const double scale = std::max(A.max_abs(), 1e-300);
    Mat aug = hcat(A, rhs);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(aug(r, c)) > std::abs(aug(p, c))) p = r;
        const double pivot = aug(p, c);
        if (std::abs(pivot) < 1e-13 * scale)
            throw SingularMatrixError("singular matrix in solve_linear (pivot " +
                                          std::to_string(std::abs(pivot)) + ")",
                                      std::abs(pivot));
        if (p != c)
            for (std::size_t j = 0; j < aug.cols(); ++j) std::swap(aug(p, j), aug(c, j));
        for (std::size_t r = c + 1; r < n; ++r) {
            const double m = aug(r, c) / pivot;
            if (m == 0.0) continue;
            for (std::size_t j = c; j < aug.cols(); ++j) aug(r, j) -= m * aug(c, j);
        }
    }
    return aug;
}

} // namespace

Mat solve_linear(const Mat& A, const Mat& rhs) {
    const std::size_t n = A.rows();
    Mat aug = eliminate(A, rhs);
    Mat x(n, rhs.cols());
    for (std::size_t col = 0; col < rhs.cols(); ++col) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = aug(ii, n + col);
            for (std::size_t j = ii + 1; j < n; ++j) s -= aug(ii, j) * x(j, col);
            x(ii, col) = s / aug(ii, ii);
        }
    }
    return x;
}

Vec solve_linear(const Mat& A, const Vec& b) {
    Mat rhs(b.dim(), 1);
    for (std::size_t i = 0; i < b.dim(); ++i) rhs(i, 0) = b[i];
    Mat x = solve_linear(A, rhs);
    return x.col(0);
}

Mat inverse(const Mat& A) { return solve_linear(A, Mat::identity(A.rows())); }

Mat min_norm_solve(const Mat& A, const Mat& rhs) {
    if (A.rows() > A.cols()) throw DimensionError("min_norm_solve expects a wide matrix");
    if (A.rows() != rhs.rows()) throw DimensionError("min_norm_solve rhs row mismatch");
    const Mat gram = A * A.transposed();
    Mat y;
    try {
        y = solve_linear(gram, rhs);
    } catch (const SingularMatrixError&) {
        throw RankError("min_norm_solve: matrix does not have full row rank");
    }
    return A.transposed() * y;
}

std::size_t rank(const Mat& A, double tol_rel) {
    Mat w = A;
    const double scale = std::max(w.max_abs(), 1e-300);
    const std::size_t m = w.rows(), n = w.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t p = r;
        for (std::size_t i = r + 1; i < m; ++i)
            if (std::abs(w(i, c)) > std::abs(w(p, c))) p = i;
        if (std::abs(w(p, c)) <= tol_rel * scale) continue;
        if (p != r)
            for (std::size_t j = 0; j < n; ++j) std::swap(w(p, j), w(r, j));
        for (std::size_t i = r + 1; i < m; ++i) {
            const double f = w(i, c) / w(r, c);
            for (std::size_t j = c; j < n; ++j) w(i, j) -= f * w(r, j);
        }
        ++r;
    }
    return r;
}

} // namespace percept::numerics

#include "percept/matrix_functions.hpp"

#include <algorithm>
#include <cmath>

namespace percept::numerics {

Mat mat_exp(const Mat& A, double t) {
    if (!A.square()) throw DimensionError("mat_exp requires a square matrix");
    const std::size_t n = A.rows();

    Mat At = A;
    At *= t;

    // Scale so the series argument has norm <= 0.5.
    const double norm = At.norm_inf();
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        At *= std::ldexp(1.0, -squarings);
    }

    Mat result = Mat::identity(n);
    Mat term = Mat::identity(n);
    for (int k = 1; k <= 40; ++k) {
        term = term * At;
        term *= 1.0 / k;
        result += term;
        if (term.max_abs() < 1e-20 * std::max(result.max_abs(), 1.0)) break;
    }

    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

std::vector<double> char_poly_coeffs(const Mat& A) {
    if (!A.square()) throw DimensionError("char_poly_coeffs requires a square matrix");
    const std::size_t n = A.rows();
    // Faddeev-LeVerrier: M_1 = A, c_{n-1} = -tr M_1,
    // M_{k+1} = A (M_k + c_{n-k} I), c_{n-k-1} = -tr(M_{k+1}) / (k+1).
    std::vector<double> c(n + 1, 0.0);
    c[n] = 1.0;
    Mat M = A;
    for (std::size_t k = 1; k <= n; ++k) {
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += M(i, i);
        c[n - k] = -tr / static_cast<double>(k);
        if (k < n) {
            Mat shifted = M;
            for (std::size_t i = 0; i < n; ++i) shifted(i, i) += c[n - k];
            M = A * shifted;
        }
    }
    return c;
}

Complex eval_monic(const std::vector<double>& coeffs, Complex s) {
    // Horner with the implicit leading coefficient 1.
    Complex acc(1.0, 0.0);
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) acc = acc * s + coeffs[i];
    return acc;
}

namespace {

std::vector<Complex> durand_kerner(const std::vector<double>& coeffs) {
    const std::size_t deg = coeffs.size() - 1;
    double radius = 1.0;
    for (std::size_t i = 0; i < deg; ++i) radius = std::max(radius, std::abs(coeffs[i]));
    radius += 1.0;

    std::vector<Complex> z(deg);
    const Complex seed(0.4, 0.9); // standard non-real starting ratio
    Complex w = seed;
    for (std::size_t i = 0; i < deg; ++i) {
        z[i] = radius * w;
        w *= seed;
    }

    for (int iter = 0; iter < 500; ++iter) {
        double max_step = 0.0;
        for (std::size_t i = 0; i < deg; ++i) {
            Complex denom(1.0, 0.0);
            for (std::size_t j = 0; j < deg; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            if (std::abs(denom) == 0.0) continue;
            const Complex delta = eval_monic(coeffs, z[i]) / denom;
            z[i] -= delta;
            max_step = std::max(max_step, std::abs(delta));
        }
        if (max_step < 1e-15 * radius) break;
    }
    return z;
}

} // namespace

std::vector<Complex> eig_small(const Mat& A) {
    if (!A.square()) throw DimensionError("eig_small requires a square matrix");
    const std::size_t n = A.rows();
    if (n == 0 || n > 4)
        throw UnsupportedSizeError("eig_small supports 1 <= n <= 4, got n = " +
                                   std::to_string(n));

    std::vector<Complex> eig;
    if (n == 1) {
        eig = {Complex(A(0, 0), 0.0)};
    } else if (n == 2) {
        const double tr = A(0, 0) + A(1, 1);
        const double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
        const double disc = tr * tr / 4.0 - det;
        if (disc >= 0.0) {
            const double r = std::sqrt(disc);
            eig = {Complex(tr / 2.0 - r, 0.0), Complex(tr / 2.0 + r, 0.0)};
        } else {
            const double im = std::sqrt(-disc);
            eig = {Complex(tr / 2.0, -im), Complex(tr / 2.0, im)};
        }
    } else {
        eig = durand_kerner(char_poly_coeffs(A));
        // A real matrix has conjugate-paired spectrum; snap stray imaginary
        // parts from the iteration to zero.
        double scale = 0.0;
        for (const Complex& z : eig) scale = std::max(scale, std::abs(z));
        for (Complex& z : eig)
            if (std::abs(z.imag()) < 1e-10 * std::max(scale, 1.0)) z = Complex(z.real(), 0.0);
    }

    std::sort(eig.begin(), eig.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return eig;
}

bool is_hurwitz(const Mat& A) {
    for (const Complex& z : eig_small(A))
        if (z.real() >= -1e-12) return false;
    return true;
}

} // namespace percept::numerics

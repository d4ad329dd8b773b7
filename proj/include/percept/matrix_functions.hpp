#pragma once

#include <complex>
#include <vector>

#include "percept/matrix.hpp"

namespace percept::numerics {

using Complex = std::complex<double>;

/// e^{A t} by scaling-and-squaring with a truncated Taylor series.
/// Relative accuracy on desk-scale matrices is well below 1e-10.
Mat mat_exp(const Mat& A, double t);

/// Coefficients of the monic characteristic polynomial of a square matrix,
/// lowest degree first: p(s) = coeffs[0] + coeffs[1] s + ... + s^n.
/// Faddeev-LeVerrier recursion; exact up to rounding for small n.
std::vector<double> char_poly_coeffs(const Mat& A);

/// Evaluates a monic polynomial (coefficients lowest-first, implicit leading 1).
Complex eval_monic(const std::vector<double>& coeffs, Complex s);

/// All eigenvalues of a square matrix with n <= 4. Sizes 1 and 2 use closed
/// forms; 3 and 4 use Durand-Kerner iteration on the characteristic
/// polynomial. Complex values occur in conjugate pairs; output is sorted by
/// (real, imag) for determinism. Throws UnsupportedSizeError for n > 4.
std::vector<Complex> eig_small(const Mat& A);

/// True iff every eigenvalue has real part < -1e-12.
bool is_hurwitz(const Mat& A);

} // namespace percept::numerics

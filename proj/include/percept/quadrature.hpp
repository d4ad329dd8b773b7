#pragma once

#include <functional>

#include "percept/matrix.hpp"

namespace percept::numerics {

/// Composite Simpson rule over n_panels subintervals (n_panels must be even).
/// Error is O(h^4); exact for polynomials up to degree 3.
double quad_simpson(const std::function<double(double)>& g, double a, double b,
                    std::size_t n_panels);

/// Matrix-valued composite Simpson rule.
Mat quad_simpson(const std::function<Mat(double)>& g, double a, double b,
                 std::size_t n_panels);

} // namespace percept::numerics

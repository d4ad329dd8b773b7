#include "percept/quadrature.hpp"

namespace percept::numerics {

namespace {

void check_args(double a, double b, std::size_t n_panels) {
    if (n_panels == 0 || n_panels % 2 != 0)
        throw ParameterError("quad_simpson requires an even, nonzero panel count");
    if (!(b > a)) throw ParameterError("quad_simpson requires b > a");
}

} // namespace

double quad_simpson(const std::function<double(double)>& g, double a, double b,
                    std::size_t n_panels) {
    check_args(a, b, n_panels);
    const double h = (b - a) / static_cast<double>(n_panels);
    double acc = g(a) + g(b);
    for (std::size_t i = 1; i < n_panels; ++i)
        acc += (i % 2 == 1 ? 4.0 : 2.0) * g(a + static_cast<double>(i) * h);
    return acc * h / 3.0;
}

Mat quad_simpson(const std::function<Mat(double)>& g, double a, double b,
                 std::size_t n_panels) {
    check_args(a, b, n_panels);
    const double h = (b - a) / static_cast<double>(n_panels);
    Mat acc = g(a) + g(b);
    for (std::size_t i = 1; i < n_panels; ++i) {
        Mat gi = g(a + static_cast<double>(i) * h);
        gi *= (i % 2 == 1 ? 4.0 : 2.0);
        acc += gi;
    }
    acc *= h / 3.0;
    return acc;
}

} // namespace percept::numerics

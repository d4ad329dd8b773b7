#pragma once

#include <functional>
#include <string>
#include <vector>

#include "percept/matrix.hpp"

namespace percept::numerics {

/// Sampled solution of an initial-value problem. `controls` is filled by the
/// simulation front ends that have a control input; it is empty otherwise and
/// aligned with `times` when present.
struct OdeTrajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> controls;
    std::string meta;

    std::size_t size() const { return times.size(); }
    const Vec& final_state() const { return states.back(); }
    double final_time() const { return times.back(); }
};

/// Vector field writing dx/dt for (t, x) into `dxdt` (pre-sized to x.dim()).
using VectorField = std::function<void(double t, const Vec& x, Vec& dxdt)>;

/// Classical fixed-step 4th-order Runge-Kutta. The last step is shortened so
/// the trajectory lands exactly on t1; every step is recorded. Throws
/// ParameterError for dt <= 0 or t1 <= t0 and DivergenceError (carrying the
/// last valid time) when the state stops being finite.
OdeTrajectory integrate_ode(const VectorField& f, const Vec& x0, double t0, double t1,
                            double dt, const std::string& meta = "");

/// Single RK4 step from (t, x) with step h; writes the result into x_next.
/// Scratch vectors must all have x.dim() entries.
void rk4_step(const VectorField& f, double t, const Vec& x, double h, Vec& x_next,
              Vec& k1, Vec& k2, Vec& k3, Vec& k4, Vec& xtmp);

} // namespace percept::numerics

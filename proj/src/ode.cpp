#include "percept/ode.hpp"

#include <cmath>

namespace percept::numerics {

void rk4_step(const VectorField& f, double t, const Vec& x, double h, Vec& x_next,
              Vec& k1, Vec& k2, Vec& k3, Vec& k4, Vec& xtmp) {
    const std::size_t n = x.dim();
    f(t, x, k1);
    for (std::size_t i = 0; i < n; ++i) xtmp[i] = x[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, xtmp, k2);
    for (std::size_t i = 0; i < n; ++i) xtmp[i] = x[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, xtmp, k3);
    for (std::size_t i = 0; i < n; ++i) xtmp[i] = x[i] + h * k3[i];
    f(t + h, xtmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        x_next[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

OdeTrajectory integrate_ode(const VectorField& f, const Vec& x0, double t0, double t1,
                            double dt, const std::string& meta) {
    if (dt <= 0.0) throw ParameterError("integrate_ode requires dt > 0");
    if (t1 <= t0) throw ParameterError("integrate_ode requires t1 > t0");
    if (!x0.all_finite()) throw ParameterError("integrate_ode initial state not finite");

    const std::size_t n = x0.dim();
    OdeTrajectory traj;
    traj.meta = meta;
    const std::size_t n_steps = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-12));
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(t0);
    traj.states.push_back(x0);

    // Sample instants are computed as t0 + i*dt (not accumulated) so long
    // runs do not drift and sample-and-hold callers can align on them.
    Vec x = x0, x_next(n), k1(n), k2(n), k3(n), k4(n), xtmp(n);
    const double eps = 1e-12 * std::max(1.0, std::abs(t1));
    double t = t0;
    for (std::size_t i = 0; t < t1 - eps; ++i) {
        double t_next = t0 + static_cast<double>(i + 1) * dt;
        if (t_next > t1 - eps) t_next = t1;
        rk4_step(f, t, x, t_next - t, x_next, k1, k2, k3, k4, xtmp);
        if (!x_next.all_finite())
            throw DivergenceError("integrate_ode: state diverged after t = " +
                                      std::to_string(t),
                                  t);
        t = t_next;
        x = x_next;
        traj.times.push_back(t);
        traj.states.push_back(x);
    }
    return traj;
}

} // namespace percept::numerics

#include "percept/steering.hpp"

#include <cmath>
#include <random>

namespace percept::steering {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_sim_args(double t_end, double dt) {
    if (!(dt > 0.0)) throw ParameterError("simulation requires dt > 0");
    if (!(t_end > 0.0)) throw ParameterError("simulation requires t_end > 0");
}

Vec to_vec(const VehicleState& s) {
    Vec v(3);
    v[0] = s.x;
    v[1] = s.y;
    v[2] = s.theta;
    return v;
}

VehicleState to_state(const Vec& v) { return VehicleState{v[0], v[1], v[2]}; }

void push_sample(OdeTrajectory& traj, double t, const Vec& x, double u) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    Vec uc(1);
    uc[0] = u;
    traj.controls.push_back(std::move(uc));
}

// Uniform [0,1) and Box-Muller Gaussian draws from a fixed 64-bit stream;
// spelled out (rather than std::*_distribution) so the stream is identical
// on every platform.
class SeededDraws {
public:
    explicit SeededDraws(std::uint64_t seed) : eng_(seed) {}

    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double gauss() {
        const double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; // (0,1]
        const double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace

SteeringGain::SteeringGain(double gain) : k(gain) {
    if (!(k > 0.0)) throw ParameterError("SteeringGain requires k > 0");
}

SampledSchedule::SampledSchedule(double interval) : h(interval) {
    if (!(h > 0.0)) throw ParameterError("SampledSchedule requires h > 0");
}

CorridorRun simulate_two_pixel(const VehicleState& state0, const CorridorScene& scene,
                               const SteeringGain& gain, double t_end, double dt) {
    check_sim_args(t_end, dt);
    const double R = scene.half_width_R;
    const double v = scene.speed_v;

    CorridorRun result;
    result.trajectory.meta = "two-pixel tau balance, k=" + std::to_string(gain.k);

    auto control = [&](const Vec& s) {
        return corridor::tau_balance_closed_form(to_state(s), scene, gain.k);
    };
    numerics::VectorField field = [&](double, const Vec& s, Vec& dxdt) {
        dxdt[0] = v * std::cos(s[2]);
        dxdt[1] = v * std::sin(s[2]);
        dxdt[2] = control(s);
    };

    Vec x = to_vec(state0), x_next(3), k1(3), k2(3), k3(3), k4(3), xtmp(3);

    auto valid = [&](const Vec& s, FailureCause& cause) {
        if (std::abs(s[0]) >= R) {
            cause = FailureCause::wall_contact;
            return false;
        }
        if (!corridor::inside_critical_cone(s[2], scene.focal_length_f)) {
            cause = FailureCause::cone_exit;
            return false;
        }
        return true;
    };

    FailureCause cause = FailureCause::none;
    if (!valid(x, cause)) {
        push_sample(result.trajectory, 0.0, x, 0.0);
        result.cause = cause;
        result.exit_time = 0.0;
        return result;
    }
    push_sample(result.trajectory, 0.0, x, control(x));

    const double eps = 1e-12 * std::max(1.0, t_end);
    double t = 0.0;
    for (std::size_t i = 0; t < t_end - eps; ++i) {
        double t_next = static_cast<double>(i + 1) * dt;
        if (t_next > t_end - eps) t_next = t_end;
        try {
            numerics::rk4_step(field, t, x, t_next - t, x_next, k1, k2, k3, k4, xtmp);
        } catch (const CriticalHeadingError&) {
            result.cause = FailureCause::cone_exit;
            result.exit_time = t;
            return result;
        }
        if (!x_next.all_finite()) {
            result.cause = FailureCause::diverged;
            result.exit_time = t;
            return result;
        }
        t = t_next;
        x = x_next;
        if (!valid(x, cause)) {
            push_sample(result.trajectory, t, x, 0.0);
            result.cause = cause;
            result.exit_time = t;
            return result;
        }
        push_sample(result.trajectory, t, x, control(x));
    }
    result.completed = true;
    result.exit_time = t;
    return result;
}

CorridorRun simulate_sampled(const VehicleState& state0, const CorridorScene& scene,
                             const SteeringGain& gain, const SampledSchedule& schedule,
                             double t_end, double dt) {
    check_sim_args(t_end, dt);
    const double R = scene.half_width_R;
    const double v = scene.speed_v;

    // h is snapped to the nearest nonzero multiple of dt so holds align with
    // integration samples exactly.
    const std::size_t steps_per_hold =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(schedule.h / dt)));
    const double h_used = static_cast<double>(steps_per_hold) * dt;

    CorridorRun result;
    result.h_used = h_used;
    result.trajectory.meta = "sampled tau balance, k=" + std::to_string(gain.k) +
                             ", h=" + std::to_string(h_used);

    Vec x = to_vec(state0), x_next(3), k1(3), k2(3), k3(3), k4(3), xtmp(3);

    if (std::abs(x[0]) >= R) {
        push_sample(result.trajectory, 0.0, x, 0.0);
        result.cause = FailureCause::wall_contact;
        return result;
    }

    double u_held = 0.0;
    // The cone condition only needs to hold at measurement instants; between
    // samples the command is held blindly.
    auto measure = [&](const Vec& s, double& u) {
        if (!corridor::inside_critical_cone(s[2], scene.focal_length_f)) return false;
        u = corridor::tau_balance_closed_form(to_state(s), scene, gain.k);
        return true;
    };
    if (!measure(x, u_held)) {
        push_sample(result.trajectory, 0.0, x, 0.0);
        result.cause = FailureCause::cone_exit;
        return result;
    }
    push_sample(result.trajectory, 0.0, x, u_held);

    numerics::VectorField field = [&](double, const Vec& s, Vec& dxdt) {
        dxdt[0] = v * std::cos(s[2]);
        dxdt[1] = v * std::sin(s[2]);
        dxdt[2] = u_held;
    };

    const double eps = 1e-12 * std::max(1.0, t_end);
    double t = 0.0;
    for (std::size_t i = 0; t < t_end - eps; ++i) {
        if (i > 0 && i % steps_per_hold == 0) {
            if (!measure(x, u_held)) {
                result.cause = FailureCause::cone_exit;
                result.exit_time = t;
                return result;
            }
        }
        double t_next = static_cast<double>(i + 1) * dt;
        if (t_next > t_end - eps) t_next = t_end;
        numerics::rk4_step(field, t, x, t_next - t, x_next, k1, k2, k3, k4, xtmp);
        if (!x_next.all_finite()) {
            result.cause = FailureCause::diverged;
            result.exit_time = t;
            return result;
        }
        t = t_next;
        x = x_next;
        if (std::abs(x[0]) >= R) {
            push_sample(result.trajectory, t, x, u_held);
            result.cause = FailureCause::wall_contact;
            result.exit_time = t;
            return result;
        }
        push_sample(result.trajectory, t, x, u_held);
    }
    result.completed = true;
    result.exit_time = t;
    return result;
}

NoisyRun simulate_noisy_array(const VehicleState& state0, const CorridorScene& scene,
                              const SteeringGain& gain, const ReceptorArray& array,
                              double t_end, double dt) {
    check_sim_args(t_end, dt);
    if (array.n_per_side < 1)
        throw ParameterError("ReceptorArray requires n_per_side >= 1");
    if (!(array.dropout_prob >= 0.0 && array.dropout_prob < 1.0))
        throw ParameterError("ReceptorArray requires dropout_prob in [0, 1)");
    if (array.tau_noise_sigma < 0.0 || array.image_jitter < 0.0 || array.image_jitter >= 0.5)
        throw ParameterError("ReceptorArray noise/jitter parameters out of range");

    const double R = scene.half_width_R;
    const double v = scene.speed_v;
    const std::size_t n = static_cast<std::size_t>(array.n_per_side);

    SeededDraws draws(array.seed);

    // Receptor image positions are fixed for the whole run: nominal -1 / +1,
    // optionally jittered once. Draw order: all left positions, then right.
    std::vector<double> pos_left(n, -1.0), pos_right(n, 1.0);
    if (array.image_jitter > 0.0) {
        for (double& p : pos_left) p = -1.0 + array.image_jitter * (2.0 * draws.u01() - 1.0);
        for (double& p : pos_right) p = 1.0 + array.image_jitter * (2.0 * draws.u01() - 1.0);
    }

    std::vector<char> alive_left(n, 1), alive_right(n, 1);
    std::vector<double> noise_left(n, 0.0), noise_right(n, 0.0);

    NoisyRun out;
    CorridorRun& result = out.run;
    result.trajectory.meta = "noisy receptor array, n_per_side=" + std::to_string(n) +
                             ", dropout=" + std::to_string(array.dropout_prob) +
                             ", sigma=" + std::to_string(array.tau_noise_sigma) +
                             ", seed=" + std::to_string(array.seed);

    double u_held = 0.0;
    // Mean noisy tau difference for the step's frozen masks and noises;
    // returns false when either wall has no surviving receptor with a valid
    // gaze, in which case the caller keeps the previous command.
    auto eval_u = [&](const Vec& s, double& u) {
        const VehicleState st = to_state(s);
        double sum_l = 0.0, sum_r = 0.0, tau = 0.0;
        std::size_t n_l = 0, n_r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (alive_left[i] &&
                corridor::tau_receptor_maybe(st, scene, pos_left[i], tau)) {
                sum_l += tau + noise_left[i];
                ++n_l;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (alive_right[i] &&
                corridor::tau_receptor_maybe(st, scene, pos_right[i], tau)) {
                sum_r += tau + noise_right[i];
                ++n_r;
            }
        }
        if (n_l == 0 || n_r == 0) return false;
        u = gain.k * (sum_l / static_cast<double>(n_l) - sum_r / static_cast<double>(n_r));
        return true;
    };

    numerics::VectorField field = [&](double, const Vec& s, Vec& dxdt) {
        double u = u_held;
        eval_u(s, u); // falls back to the held command when starved
        dxdt[0] = v * std::cos(s[2]);
        dxdt[1] = v * std::sin(s[2]);
        dxdt[2] = u;
    };

    Vec x = to_vec(state0), x_next(3), k1(3), k2(3), k3(3), k4(3), xtmp(3);
    if (std::abs(x[0]) >= R) {
        push_sample(result.trajectory, 0.0, x, 0.0);
        result.cause = FailureCause::wall_contact;
        return out;
    }

    std::size_t starved_steps = 0, total_steps = 0;
    const double eps = 1e-12 * std::max(1.0, t_end);
    double t = 0.0;
    bool first = true;
    for (std::size_t i = 0; t < t_end - eps || first; ++i) {
        // Per-step draws: dropout masks (left then right), then one Gaussian
        // per surviving receptor (left then right).
        if (array.dropout_prob > 0.0) {
            for (std::size_t j = 0; j < n; ++j)
                alive_left[j] = draws.u01() >= array.dropout_prob ? 1 : 0;
            for (std::size_t j = 0; j < n; ++j)
                alive_right[j] = draws.u01() >= array.dropout_prob ? 1 : 0;
        }
        if (array.tau_noise_sigma > 0.0) {
            for (std::size_t j = 0; j < n; ++j)
                if (alive_left[j]) noise_left[j] = array.tau_noise_sigma * draws.gauss();
            for (std::size_t j = 0; j < n; ++j)
                if (alive_right[j]) noise_right[j] = array.tau_noise_sigma * draws.gauss();
        }

        ++total_steps;
        double u_step = u_held;
        if (eval_u(x, u_step))
            u_held = u_step;
        else
            ++starved_steps;

        if (first) {
            push_sample(result.trajectory, 0.0, x, u_held);
            first = false;
        }
        if (t >= t_end - eps) break;

        double t_next = static_cast<double>(i + 1) * dt;
        if (t_next > t_end - eps) t_next = t_end;
        numerics::rk4_step(field, t, x, t_next - t, x_next, k1, k2, k3, k4, xtmp);
        if (!x_next.all_finite()) {
            result.cause = FailureCause::diverged;
            result.exit_time = t;
            out.starved_fraction =
                static_cast<double>(starved_steps) / static_cast<double>(total_steps);
            return out;
        }
        t = t_next;
        x = x_next;
        if (std::abs(x[0]) >= R) {
            push_sample(result.trajectory, t, x, u_held);
            result.cause = FailureCause::wall_contact;
            result.exit_time = t;
            out.starved_fraction =
                static_cast<double>(starved_steps) / static_cast<double>(total_steps);
            return out;
        }
        push_sample(result.trajectory, t, x, u_held);
    }

    result.completed = true;
    result.exit_time = t;
    out.starved_fraction =
        static_cast<double>(starved_steps) / static_cast<double>(total_steps);
    return out;
}

LinearizationReport linearize_reduced(const CorridorScene& scene, const SteeringGain& gain) {
    const double f = scene.focal_length_f;
    const double R = scene.half_width_R;
    const double k = gain.k;

    Mat J(2, 2, {0.0, -1.0, 2.0 * f * k, -2.0 * (k * f * f + k * R * f * f)});

    const double re = -f * f * k * (1.0 + R);
    const double disc = f * k * (f * f * f * k * (1.0 + R) * (1.0 + R) - 2.0);
    std::array<Complex, 2> eig;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        eig = {Complex(re - root, 0.0), Complex(re + root, 0.0)};
    } else {
        const double root = std::sqrt(-disc);
        eig = {Complex(re, -root), Complex(re, root)};
    }

    return LinearizationReport{J, eig, 2.0 / (f * f * f * (1.0 + R) * (1.0 + R))};
}

Mat finite_diff_jacobian(const CorridorScene& scene, const SteeringGain& gain, double x,
                         double theta) {
    // Reduced vector field (cos theta, k (tau_l - tau_r)) at unit speed.
    const CorridorScene unit(scene.half_width_R, scene.focal_length_f, 1.0);
    auto field = [&](double xi, double th, double& f1, double& f2) {
        const corridor::TauPair p = corridor::tau_pair_exact(VehicleState{xi, 0.0, th}, unit);
        f1 = std::cos(th);
        f2 = gain.k * (p.tau_left - p.tau_right);
    };
    const double step = 1e-6;
    double f1p, f2p, f1m, f2m;
    Mat J(2, 2);
    field(x + step, theta, f1p, f2p);
    field(x - step, theta, f1m, f2m);
    J(0, 0) = (f1p - f1m) / (2.0 * step);
    J(1, 0) = (f2p - f2m) / (2.0 * step);
    field(x, theta + step, f1p, f2p);
    field(x, theta - step, f1m, f2m);
    J(0, 1) = (f1p - f1m) / (2.0 * step);
    J(1, 1) = (f2p - f2m) / (2.0 * step);
    return J;
}

namespace {

void check_iterate_domain(double phi, double x, const CorridorScene& scene) {
    if (std::abs(scene.focal_length_f - 1.0) > 1e-12)
        throw DomainError("iterate map assumes the f = 1 normalization");
    if (!(std::abs(phi) < kPi / 4.0))
        throw DomainError("iterate map requires |phi| < pi/4");
    if (!(std::abs(x) < scene.half_width_R))
        throw DomainError("iterate map requires |x| < R");
}

} // namespace

double iterate_map_g(double phi, double x, const CorridorScene& scene, double k, double h) {
    check_iterate_domain(phi, x, scene);
    const double R = scene.half_width_R;
    const double s = std::sin(phi), c = std::cos(phi);
    return phi + h * k * (2.0 * s * (R + c) - 2.0 * x * c) / (s * s - c * c);
}

double iterate_map_g_prime(double phi, double x, const CorridorScene& scene, double k,
                           double h) {
    check_iterate_domain(phi, x, scene);
    const double R = scene.half_width_R;
    const double c2 = std::cos(phi) * std::cos(phi) - std::sin(phi) * std::sin(phi);
    const double num = -2.0 - 3.0 * R * std::cos(phi) + R * std::cos(3.0 * phi) +
                       3.0 * x * std::sin(phi) + x * std::sin(3.0 * phi);
    return 1.0 + h * k * num / (c2 * c2);
}

double contraction_sup_gprime(const CorridorScene& scene, double k, double h,
                              double phi_max, double x_max, std::size_t n_grid) {
    if (n_grid < 2) throw ParameterError("contraction_sup_gprime requires n_grid >= 2");
    double sup = 0.0;
    for (std::size_t i = 0; i < n_grid; ++i) {
        const double phi =
            -phi_max + 2.0 * phi_max * static_cast<double>(i) / static_cast<double>(n_grid - 1);
        for (std::size_t j = 0; j < n_grid; ++j) {
            const double x =
                -x_max + 2.0 * x_max * static_cast<double>(j) / static_cast<double>(n_grid - 1);
            sup = std::max(sup, std::abs(iterate_map_g_prime(phi, x, scene, k, h)));
        }
    }
    return sup;
}

std::optional<double> converged_at(const OdeTrajectory& traj, double tol_x, double tol_theta,
                                   double sustain) {
    if (traj.times.empty()) return std::nullopt;
    auto ok = [&](const Vec& s) {
        return std::abs(s[0]) < tol_x && std::abs(s[2] - kPi / 2.0) < tol_theta;
    };
    // Find the last sample violating the tolerance; convergence starts after it.
    std::size_t first_ok = 0;
    for (std::size_t i = traj.size(); i-- > 0;) {
        if (!ok(traj.states[i])) {
            first_ok = i + 1;
            break;
        }
    }
    if (first_ok >= traj.size()) return std::nullopt;
    const double t_star = traj.times[first_ok];
    if (traj.final_time() - t_star < sustain) return std::nullopt;
    return t_star;
}

} // namespace percept::steering

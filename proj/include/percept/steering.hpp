#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "percept/corridor.hpp"
#include "percept/matrix_functions.hpp"
#include "percept/ode.hpp"

namespace percept::steering {

using corridor::CorridorScene;
using corridor::VehicleState;
using numerics::Complex;
using numerics::Mat;
using numerics::OdeTrajectory;
using numerics::Vec;

struct SteeringGain {
    explicit SteeringGain(double gain);
    double k;
};

struct SampledSchedule {
    explicit SampledSchedule(double interval);
    double h;
};

/// Linearization of the reduced (x, theta) dynamics about the centerline
/// rest point, with the closed-form eigenvalues and the gain at which they
/// transition from complex to real.
struct LinearizationReport {
    Mat jacobian;
    std::array<Complex, 2> eigenvalues;
    double k_crit;
};

/// Noisy photoreceptor-array model: n_per_side receptors per wall at image
/// positions -1 and +1, each independently jittered once per run by
/// U(-image_jitter, +image_jitter), dropping out each step with
/// dropout_prob, and reporting its exact tau plus N(0, tau_noise_sigma^2)
/// noise. All randomness comes from the 64-bit seed.
struct ReceptorArray {
    int n_per_side = 1;
    double dropout_prob = 0.0;
    double tau_noise_sigma = 0.0;
    std::uint64_t seed = 0;
    double image_jitter = 0.0;
};

enum class FailureCause { none, cone_exit, wall_contact, diverged };

/// Result of a corridor simulation. `completed` is false when the run was
/// aborted (cone exit, wall contact at |x| >= R, or numerical divergence);
/// the partial trajectory and the exit time are still reported.
struct CorridorRun {
    OdeTrajectory trajectory;
    bool completed = false;
    double exit_time = 0.0;
    FailureCause cause = FailureCause::none;
    double h_used = 0.0; // sampling interval actually applied (0 = continuous)
};

struct NoisyRun {
    CorridorRun run;
    double starved_fraction = 0.0; // fraction of steps where a side had no survivors
};

/// Continuous two-pixel steering: u = k (tau_l - tau_r) applied to the
/// vehicle kinematics.
CorridorRun simulate_two_pixel(const VehicleState& state0, const CorridorScene& scene,
                               const SteeringGain& gain, double t_end, double dt);

/// Sample-and-hold variant: u is recomputed at uniformly spaced instants and
/// held in between. h is rounded to the nearest nonzero multiple of dt (the
/// value used is reported in the result).
CorridorRun simulate_sampled(const VehicleState& state0, const CorridorScene& scene,
                             const SteeringGain& gain, const SampledSchedule& schedule,
                             double t_end, double dt);

/// Steering from averaged noisy receptor taus; u holds its previous value on
/// steps where one side has no surviving receptors.
NoisyRun simulate_noisy_array(const VehicleState& state0, const CorridorScene& scene,
                              const SteeringGain& gain, const ReceptorArray& array,
                              double t_end, double dt);

/// Jacobian [[0, -1], [2fk, -2k f^2 (1+R)]] of the reduced dynamics at the
/// rest point, its closed-form eigenvalues, and k_crit = 2 / (f^3 (1+R)^2).
LinearizationReport linearize_reduced(const CorridorScene& scene, const SteeringGain& gain);

/// Central-difference Jacobian (step 1e-6) of the reduced vector field
/// (cos theta, k (tau_l - tau_r)) at (x, theta), evaluated at unit speed.
Mat finite_diff_jacobian(const CorridorScene& scene, const SteeringGain& gain, double x,
                         double theta);

/// One sample-and-hold update of the heading offset phi = theta - pi/2 with
/// the lateral position frozen (f = 1 normalization). Domain:
/// |phi| < pi/4, |x| < R.
double iterate_map_g(double phi, double x, const CorridorScene& scene, double k, double h);

/// d g / d phi of the iterate map. Note the closed form is
///   1 + h k (-2 - 3R cos phi + R cos 3phi + 3x sin phi + x sin 3phi)
///       / (cos^2 phi - sin^2 phi)^2,
/// which at (phi, x) = (0, 0) equals 1 - 2hk(1+R).
double iterate_map_g_prime(double phi, double x, const CorridorScene& scene, double k,
                           double h);

/// sup |g'| over an n_grid x n_grid grid of (phi, x) in
/// [-phi_max, phi_max] x [-x_max, x_max]; the empirical contraction margin
/// of the sampled law.
double contraction_sup_gprime(const CorridorScene& scene, double k, double h,
                              double phi_max, double x_max, std::size_t n_grid);

/// Earliest time from which |x| < tol_x and |theta - pi/2| < tol_theta hold
/// for the remainder of the trajectory, provided they hold for at least
/// `sustain` seconds; nullopt when never satisfied.
std::optional<double> converged_at(const OdeTrajectory& traj, double tol_x = 1e-3,
                                   double tol_theta = 1e-3, double sustain = 5.0);

} // namespace percept::steering

#pragma once

#include <string>
#include <vector>

#include "percept/matrix_functions.hpp"
#include "percept/ode.hpp"

namespace percept::multichannel {

using numerics::Mat;
using numerics::OdeTrajectory;
using numerics::Vec;

/// Linear time-invariant model dx/dt = A x + B u.
struct LtiSystem {
    LtiSystem(Mat drift, Mat input);
    Mat A;
    Mat B;
    std::size_t n() const { return A.rows(); }
    std::size_t m() const { return B.cols(); }
};

/// Steer from x0 to x1 over [0, horizon_T].
struct SteeringTask {
    Vec x0;
    Vec x1;
    double horizon_T = 1.0;
};

/// Diagonal 0/1 availability mask over the m input channels.
struct ProjectionPattern {
    ProjectionPattern() = default;
    explicit ProjectionPattern(std::vector<int> mask);
    static ProjectionPattern full(std::size_t m);

    std::vector<int> bits;
    std::size_t size() const { return bits.size(); }
    std::size_t active_count() const;
    bool is_subset_of(const ProjectionPattern& other) const;
    /// B with masked channels zeroed (columns of B times the diagonal mask).
    Mat apply_to(const Mat& B) const;
    std::string name() const; // e.g. "P[1,0,1]"
};

struct Gramian {
    Mat W;
    double horizon_T = 0.0;
    ProjectionPattern pattern;
};

enum class GramianMethod { quadrature, series };

/// Controllability Gramian W(0,T) = int_0^T e^{A(T-s)} B P B^T e^{A(T-s)^T} ds.
/// The quadrature method uses composite Simpson with n_panels subintervals;
/// the series method integrates the matrix polynomial exactly and requires a
/// nilpotent drift.
Gramian gramian(const LtiSystem& sys, double T, const ProjectionPattern& pattern,
                GramianMethod method = GramianMethod::quadrature,
                std::size_t n_panels = 512);

/// Minimum-energy open-loop plan. The realized control is
/// u(t) = P B^T e^{A^T (T - t)} lambda with lambda = W^{-1} z and
/// z = x1 - e^{AT} x0; the optimal cost is z^T W^{-1} z.
struct MinEnergyPlan {
    Vec lambda;
    Vec z;
    double cost_eta = 0.0;
    double horizon_T = 0.0;
    ProjectionPattern pattern;
};

/// Throws NotControllableError naming the pattern when the patterned Gramian
/// is singular (condition number >= 1e12 or a non-positive eigenvalue).
MinEnergyPlan min_energy_plan(const LtiSystem& sys, const SteeringTask& task,
                              const ProjectionPattern& pattern);

/// The open-loop control at time t under a plan.
Vec min_energy_control(const LtiSystem& sys, const MinEnergyPlan& plan, double t);

struct MinEnergyRun {
    OdeTrajectory trajectory; // controls recorded per sample
    double realized_cost = 0.0;
    double endpoint_miss = 0.0;
};

/// Integrates dx/dt = A x + B u(t) under the plan and cross-checks that the
/// endpoint lands within endpoint_tol of x1 (throws InternalConsistencyError
/// otherwise -- a Gramian/integration mismatch).
MinEnergyRun simulate_min_energy(const LtiSystem& sys, const MinEnergyPlan& plan,
                                 const SteeringTask& task, double dt,
                                 double endpoint_tol = 1e-4);

struct AugmentComparison {
    double eta_before = 0.0;
    double eta_after = 0.0;
};

/// Optimal cost for the task before and after appending the extra input
/// column to B. eta_after <= eta_before always (channel-augmentation bound).
AugmentComparison augment_cost_compare(const LtiSystem& sys, const SteeringTask& task,
                                       const Vec& extra_col);

/// True iff the patterned Gramian is nonsingular (smallest eigenvalue above
/// 1e-10 times the largest). Cross-checked against the Kalman rank of
/// (A, BP); disagreement throws InternalConsistencyError.
bool k_channel_controllable(const LtiSystem& sys, const ProjectionPattern& pattern,
                            double T);

std::size_t kalman_rank(const Mat& A, const Mat& B);

struct PatternVerdict {
    ProjectionPattern pattern;
    bool controllable = false;
};

/// Classifies all 2^m patterns (m <= 16). Validates lattice monotonicity:
/// any superset of a controllable pattern must be controllable.
std::vector<PatternVerdict> enumerate_patterns(const LtiSystem& sys, double T);

} // namespace percept::multichannel

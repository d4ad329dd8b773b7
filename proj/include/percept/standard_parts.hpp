#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "percept/multichannel.hpp"

namespace percept::standard_parts {

using multichannel::LtiSystem;
using multichannel::ProjectionPattern;
using numerics::Mat;
using numerics::OdeTrajectory;
using numerics::Vec;

/// m x n feedback gain; construction validates that A + BK is Hurwitz.
struct GainMatrix {
    Mat K;
};

GainMatrix make_gain(const LtiSystem& sys, Mat K);

enum class OffsetConstruction { offset_eq, particular_R, hat_A };

/// Offset vector making the goal an equilibrium: (A + BK) x_g + B v = 0.
struct OffsetVector {
    Vec v;
    Vec goal;
    OffsetConstruction construction = OffsetConstruction::offset_eq;
};

/// The pseudo-drift matrix R = B^T (B B^T)^{-1} A; satisfies B R = A.
/// Throws RankError when B lacks full row rank.
Mat pseudo_drift_R(const LtiSystem& sys);

/// Offset from the particular factorization: v = -(R + K) x_g.
OffsetVector offset_particular(const LtiSystem& sys, const GainMatrix& gain, const Vec& x_g);

/// Minimum-norm solution of (A + BK) x_g + B v = 0 directly.
OffsetVector offset_min_norm(const LtiSystem& sys, const GainMatrix& gain, const Vec& x_g);

/// One member of the solution family of B Ahat = A.
struct DriftFactorization {
    Mat hat_A;
    Vec params;
};

/// The full solution family of B Ahat = A: the particular solution R plus
/// arbitrary combinations of null-space directions of B per column. The
/// family has dimension (m - n) * n; params are ordered basis-major
/// (for each null direction, one coefficient per column of Ahat).
class DriftFamily {
public:
    DriftFamily(Mat particular, std::vector<Vec> null_basis, std::size_t n_cols);

    std::size_t dimension() const { return null_basis_.size() * n_cols_; }
    const Mat& particular() const { return particular_; }
    const std::vector<Vec>& null_basis() const { return null_basis_; }

    DriftFactorization member(const Vec& params) const;
    /// Coordinates of a factorization in this family (orthonormal projection).
    Vec coordinates_of(const Mat& hat_A) const;
    /// True iff hat_A is reproduced exactly (to tol) by its projection.
    bool contains(const Mat& hat_A, double tol = 1e-9) const;

private:
    Mat particular_;
    std::vector<Vec> null_basis_; // orthonormal vectors spanning ker B
    std::size_t n_cols_;
};

/// Requires m > n and full row rank (throws RankError otherwise).
DriftFamily drift_family(const LtiSystem& sys);

/// True iff P Ahat = Ahat, i.e. the rows masked by the pattern are zero
/// (entrywise below 1e-12).
bool invariance_check(const DriftFactorization& fact, const ProjectionPattern& pattern);

/// Offset from a drift factorization: v = -(Ahat + K) x_g.
OffsetVector offset_from_hat_A(const LtiSystem& sys, const DriftFactorization& fact,
                               const GainMatrix& gain, const Vec& x_g);

/// Set-point stabilized control primitive u = K x + v steering to `goal`.
struct StandardPartsController {
    GainMatrix gain;
    OffsetVector offset;
    const Vec& goal() const { return offset.goal; }
};

StandardPartsController make_controller(const LtiSystem& sys, GainMatrix gain,
                                        OffsetVector offset);

struct GainSolveOptions {
    int max_iterations = 100;
    int restarts = 20;
    double residual_tol = 1e-12;
    double fd_step = 1e-7;
    std::uint64_t restart_seed = 0x5eed;
};

/// Finds K such that for every pattern in the set the characteristic
/// polynomial of A + B P K matches the polynomial with the given target
/// poles (damped Newton on the stacked coefficient residuals, zero initial
/// guess, seeded random restarts). Verifies A + B P K is Hurwitz for every
/// pattern before returning. Throws NoSolutionError with the final residual
/// when Newton does not converge.
GainMatrix simultaneous_gains_solve(const LtiSystem& sys,
                                    const std::vector<ProjectionPattern>& pattern_set,
                                    const std::vector<numerics::Complex>& target_poles,
                                    const GainSolveOptions& opts = {});

enum class DropoutVerdict { reached, diverted, unstable };

struct DropoutRun {
    OdeTrajectory trajectory; // controls recorded per sample
    DropoutVerdict verdict = DropoutVerdict::reached;
    std::optional<Vec> rest_point; // the equilibrium actually approached, when it exists
    double terminal_distance = 0.0;
};

/// Integrates dx/dt = A x + B P (K x + v). Verdict `reached` requires the
/// patterned loop to be Hurwitz and the terminal state within 1e-3 of the
/// goal; `diverted` reports the wrong equilibrium -(A+BPK)^{-1} B P v;
/// a non-Hurwitz patterned loop is an `unstable` verdict, not an error.
DropoutRun simulate_dropout(const StandardPartsController& ctrl, const LtiSystem& sys,
                            const ProjectionPattern& pattern, const Vec& x0, double t_end,
                            double dt);

/// Markov-modulated switching among controllers at dwell boundaries; all
/// controllers act through the plan's channel pattern.
struct MarkovSwitchPlan {
    std::vector<StandardPartsController> controllers;
    Mat transition_matrix; // row-stochastic
    double dwell_dt = 0.05;
    std::uint64_t seed = 0;
    ProjectionPattern pattern; // defaults to all channels when empty
};

struct MarkovRun {
    OdeTrajectory trajectory;
    double min_distance = 0.0;
    double min_distance_time = 0.0;
    double terminal_distance = 0.0;
    double dwell_used = 0.0; // dwell after rounding to a multiple of dt
    int switch_count = 0;
};

MarkovRun markov_modulate(const MarkovSwitchPlan& plan, const LtiSystem& sys, const Vec& x0,
                          double t_end, double dt, const Vec& target);

} // namespace percept::standard_parts

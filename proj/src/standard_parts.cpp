#include "percept/standard_parts.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace percept::standard_parts {

namespace {

Vec affine_offset_residual(const LtiSystem& sys, const Mat& K, const Vec& x_g, const Vec& v) {
    // (A + BK) x_g + B v
    Vec r = sys.A * x_g + sys.B * (K * x_g) + sys.B * v;
    return r;
}

void validate_offset(const LtiSystem& sys, const Mat& K, const OffsetVector& off) {
    const Vec r = affine_offset_residual(sys, K, off.goal, off.v);
    if (r.norm_inf() > 1e-10)
        throw InternalConsistencyError("offset vector violates (A+BK)x_g + Bv = 0 by " +
                                       std::to_string(r.norm_inf()));
}

} // namespace

GainMatrix make_gain(const LtiSystem& sys, Mat K) {
    if (K.rows() != sys.m() || K.cols() != sys.n())
        throw DimensionError("gain matrix must be m x n");
    if (!numerics::is_hurwitz(sys.A + sys.B * K))
        throw ParameterError("gain matrix does not make A + BK Hurwitz");
    return GainMatrix{std::move(K)};
}

Mat pseudo_drift_R(const LtiSystem& sys) {
    if (numerics::rank(sys.B) != sys.n())
        throw RankError("pseudo_drift_R requires B with full row rank");
    return numerics::min_norm_solve(sys.B, sys.A);
}

OffsetVector offset_particular(const LtiSystem& sys, const GainMatrix& gain, const Vec& x_g) {
    const Mat RK = pseudo_drift_R(sys) + gain.K;
    Vec v = RK * x_g;
    v *= -1.0;
    OffsetVector off{std::move(v), x_g, OffsetConstruction::particular_R};
    validate_offset(sys, gain.K, off);
    return off;
}

OffsetVector offset_min_norm(const LtiSystem& sys, const GainMatrix& gain, const Vec& x_g) {
    // Solve B v = -(A + BK) x_g for the minimum-norm v.
    Vec rhs = sys.A * x_g + sys.B * (gain.K * x_g);
    rhs *= -1.0;
    Mat rhs_m(rhs.dim(), 1);
    for (std::size_t i = 0; i < rhs.dim(); ++i) rhs_m(i, 0) = rhs[i];
    const Mat v_m = numerics::min_norm_solve(sys.B, rhs_m);
    OffsetVector off{v_m.col(0), x_g, OffsetConstruction::offset_eq};
    validate_offset(sys, gain.K, off);
    return off;
}

DriftFamily::DriftFamily(Mat particular, std::vector<Vec> null_basis, std::size_t n_cols)
    : particular_(std::move(particular)), null_basis_(std::move(null_basis)), n_cols_(n_cols) {}

DriftFactorization DriftFamily::member(const Vec& params) const {
    if (params.dim() != dimension())
        throw DimensionError("drift family expects " + std::to_string(dimension()) +
                             " parameters");
    Mat hat = particular_;
    std::size_t p = 0;
    for (const Vec& b : null_basis_)
        for (std::size_t j = 0; j < n_cols_; ++j, ++p)
            for (std::size_t i = 0; i < hat.rows(); ++i) hat(i, j) += params[p] * b[i];
    return DriftFactorization{std::move(hat), params};
}

Vec DriftFamily::coordinates_of(const Mat& hat_A) const {
    if (hat_A.rows() != particular_.rows() || hat_A.cols() != particular_.cols())
        throw DimensionError("coordinates_of dimension mismatch");
    Vec coords(dimension());
    const Mat delta = hat_A - particular_;
    std::size_t p = 0;
    for (const Vec& b : null_basis_)
        for (std::size_t j = 0; j < n_cols_; ++j, ++p) coords[p] = numerics::dot(b, delta.col(j));
    return coords;
}

bool DriftFamily::contains(const Mat& hat_A, double tol) const {
    const DriftFactorization re = member(coordinates_of(hat_A));
    return (re.hat_A - hat_A).max_abs() <= tol;
}

DriftFamily drift_family(const LtiSystem& sys) {
    const std::size_t n = sys.n(), m = sys.m();
    if (m <= n) throw RankError("drift_family requires m > n");
    const Mat R = pseudo_drift_R(sys); // also checks full row rank

    // Null space of B via elimination, then Gram-Schmidt.
    Mat w = sys.B;
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    const double scale = std::max(w.max_abs(), 1e-300);
    for (std::size_t c = 0; c < m && r < n; ++c) {
        std::size_t p = r;
        for (std::size_t i = r + 1; i < n; ++i)
            if (std::abs(w(i, c)) > std::abs(w(p, c))) p = i;
        if (std::abs(w(p, c)) <= 1e-12 * scale) continue;
        if (p != r)
            for (std::size_t j = 0; j < m; ++j) std::swap(w(p, j), w(r, j));
        const double piv = w(r, c);
        for (std::size_t j = 0; j < m; ++j) w(r, j) /= piv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == r) continue;
            const double f = w(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) w(i, j) -= f * w(r, j);
        }
        pivot_col.push_back(c);
        ++r;
    }

    std::vector<Vec> basis;
    for (std::size_t c = 0; c < m; ++c) {
        bool is_pivot = false;
        for (std::size_t pc : pivot_col) is_pivot |= (pc == c);
        if (is_pivot) continue;
        Vec b(m);
        b[c] = 1.0;
        for (std::size_t i = 0; i < pivot_col.size(); ++i) b[pivot_col[i]] = -w(i, c);
        // Gram-Schmidt against the accepted directions.
        for (const Vec& prev : basis) {
            const double proj = numerics::dot(prev, b);
            for (std::size_t i = 0; i < m; ++i) b[i] -= proj * prev[i];
        }
        const double norm = b.norm2();
        if (norm > 1e-12) {
            b *= 1.0 / norm;
            basis.push_back(std::move(b));
        }
    }
    return DriftFamily(R, std::move(basis), sys.n());
}

bool invariance_check(const DriftFactorization& fact, const ProjectionPattern& pattern) {
    if (pattern.size() != fact.hat_A.rows())
        throw DimensionError("invariance_check pattern size mismatch");
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern.bits[i] == 1) continue;
        for (std::size_t j = 0; j < fact.hat_A.cols(); ++j)
            if (std::abs(fact.hat_A(i, j)) >= 1e-12) return false;
    }
    return true;
}

OffsetVector offset_from_hat_A(const LtiSystem& sys, const DriftFactorization& fact,
                               const GainMatrix& gain, const Vec& x_g) {
    const Mat residual = sys.B * fact.hat_A - sys.A;
    if (residual.max_abs() > 1e-10)
        throw ParameterError("drift factorization does not satisfy B Ahat = A");
    Vec v = (fact.hat_A + gain.K) * x_g;
    v *= -1.0;
    OffsetVector off{std::move(v), x_g, OffsetConstruction::hat_A};
    validate_offset(sys, gain.K, off);
    return off;
}

StandardPartsController make_controller(const LtiSystem& sys, GainMatrix gain,
                                        OffsetVector offset) {
    validate_offset(sys, gain.K, offset);
    return StandardPartsController{std::move(gain), std::move(offset)};
}

namespace {

// Coefficients of prod (s - r_i), lowest degree first.
std::vector<double> poly_from_roots(const std::vector<numerics::Complex>& roots) {
    std::vector<numerics::Complex> c{numerics::Complex(1.0, 0.0)};
    for (const numerics::Complex& root : roots) {
        std::vector<numerics::Complex> next(c.size() + 1, numerics::Complex(0.0, 0.0));
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= root * c[i];
        }
        c = std::move(next);
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (std::abs(c[i].imag()) > 1e-9)
            throw ParameterError("target poles must be closed under conjugation");
        out[i] = c[i].real();
    }
    return out;
}

} // namespace

GainMatrix simultaneous_gains_solve(const LtiSystem& sys,
                                    const std::vector<ProjectionPattern>& pattern_set,
                                    const std::vector<numerics::Complex>& target_poles,
                                    const GainSolveOptions& opts) {
    const std::size_t n = sys.n(), m = sys.m();
    if (pattern_set.empty()) throw ParameterError("pattern set must not be empty");
    if (target_poles.size() != n)
        throw ParameterError("need exactly n target poles");
    for (const numerics::Complex& p : target_poles)
        if (p.real() >= 0.0) throw ParameterError("target poles must be in the open LHP");
    const std::vector<double> target = poly_from_roots(target_poles);

    const std::size_t n_unknowns = m * n;
    const std::size_t n_equations = pattern_set.size() * n;

    auto unpack = [&](const std::vector<double>& q) {
        Mat K(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) K(i, j) = q[i * n + j];
        return K;
    };

    auto residual = [&](const std::vector<double>& q, Vec& F) {
        const Mat K = unpack(q);
        std::size_t row = 0;
        for (const ProjectionPattern& p : pattern_set) {
            const Mat closed = sys.A + p.apply_to(sys.B) * K;
            const std::vector<double> c = numerics::char_poly_coeffs(closed);
            for (std::size_t i = 0; i < n; ++i) F[row++] = c[i] - target[i];
        }
    };

    std::mt19937_64 restart_rng(opts.restart_seed);
    auto uniform = [&]() {
        return 4.0 * (static_cast<double>(restart_rng() >> 11) * 0x1.0p-53) - 2.0;
    };

    double best_residual = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
        std::vector<double> q(n_unknowns, 0.0);
        if (attempt > 0)
            for (double& qi : q) qi = uniform();

        Vec F(n_equations), F_trial(n_equations);
        residual(q, F);
        bool converged = F.norm_inf() < opts.residual_tol;

        for (int iter = 0; iter < opts.max_iterations && !converged; ++iter) {
            // Forward-difference Jacobian of the stacked coefficient residuals.
            Mat J(n_equations, n_unknowns);
            std::vector<double> q_pert = q;
            for (std::size_t col = 0; col < n_unknowns; ++col) {
                q_pert[col] += opts.fd_step;
                residual(q_pert, F_trial);
                q_pert[col] = q[col];
                for (std::size_t rr = 0; rr < n_equations; ++rr)
                    J(rr, col) = (F_trial[rr] - F[rr]) / opts.fd_step;
            }

            Vec step(n_unknowns);
            try {
                if (n_equations == n_unknowns) {
                    Vec rhs = F;
                    rhs *= -1.0;
                    step = numerics::solve_linear(J, rhs);
                } else {
                    // Least-squares via normal equations.
                    const Mat Jt = J.transposed();
                    Vec rhs = Jt * F;
                    rhs *= -1.0;
                    step = numerics::solve_linear(Jt * J, rhs);
                }
            } catch (const SingularMatrixError&) {
                break; // stuck; try the next restart
            }

            // Halve the step while the residual norm does not improve.
            double lambda = 1.0;
            const double f0 = F.norm_inf();
            bool accepted = false;
            for (int halvings = 0; halvings < 40; ++halvings, lambda *= 0.5) {
                std::vector<double> q_new = q;
                for (std::size_t i = 0; i < n_unknowns; ++i) q_new[i] += lambda * step[i];
                residual(q_new, F_trial);
                if (F_trial.norm_inf() < f0) {
                    q = std::move(q_new);
                    F = F_trial;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
            converged = F.norm_inf() < opts.residual_tol;
        }

        best_residual = std::min(best_residual, F.norm_inf());
        if (!converged) continue;

        const Mat K = unpack(q);
        for (const ProjectionPattern& p : pattern_set)
            if (!numerics::is_hurwitz(sys.A + p.apply_to(sys.B) * K))
                throw InternalConsistencyError(
                    "gain solution matched coefficients but " + p.name() +
                    " closed loop is not Hurwitz");
        return make_gain(sys, K);
    }

    throw NoSolutionError("simultaneous_gains_solve: Newton did not converge (residual " +
                              std::to_string(best_residual) + ")",
                          best_residual);
}

DropoutRun simulate_dropout(const StandardPartsController& ctrl, const LtiSystem& sys,
                            const ProjectionPattern& pattern, const Vec& x0, double t_end,
                            double dt) {
    if (x0.dim() != sys.n()) throw DimensionError("simulate_dropout x0 dimension mismatch");
    const Mat BP = pattern.apply_to(sys.B);
    const Mat A_closed = sys.A + BP * ctrl.gain.K;
    Vec c = BP * ctrl.offset.v;

    const bool hurwitz = numerics::is_hurwitz(A_closed);

    DropoutRun run;
    auto control_at = [&](const Vec& x) {
        Vec u = ctrl.gain.K * x + ctrl.offset.v;
        for (std::size_t j = 0; j < pattern.size(); ++j)
            if (pattern.bits[j] == 0) u[j] = 0.0;
        return u;
    };
    numerics::VectorField field = [&](double, const Vec& x, Vec& dxdt) {
        const Vec ax = A_closed * x;
        for (std::size_t i = 0; i < x.dim(); ++i) dxdt[i] = ax[i] + c[i];
    };

    try {
        run.trajectory = numerics::integrate_ode(field, x0, 0.0, t_end, dt,
                                                 "dropout " + pattern.name());
        run.trajectory.controls.reserve(run.trajectory.size());
        for (const Vec& x : run.trajectory.states)
            run.trajectory.controls.push_back(control_at(x));
    } catch (const DivergenceError&) {
        // Unstable patterned loop blew past double range; verdict below.
    }

    if (!run.trajectory.states.empty()) {
        Vec err = run.trajectory.final_state();
        err -= ctrl.goal();
        run.terminal_distance = err.norm2();
    } else {
        run.terminal_distance = std::numeric_limits<double>::infinity();
    }

    if (!hurwitz) {
        run.verdict = DropoutVerdict::unstable;
        return run;
    }
    // Hurwitz => A_closed invertible; the rest point actually approached.
    Vec rest = numerics::solve_linear(A_closed, c);
    rest *= -1.0;
    run.rest_point = rest;
    run.verdict = run.terminal_distance < 1e-3 ? DropoutVerdict::reached
                                               : DropoutVerdict::diverted;
    return run;
}

MarkovRun markov_modulate(const MarkovSwitchPlan& plan, const LtiSystem& sys, const Vec& x0,
                          double t_end, double dt, const Vec& target) {
    const std::size_t n_ctrl = plan.controllers.size();
    if (n_ctrl == 0) throw ParameterError("markov_modulate needs at least one controller");
    if (plan.transition_matrix.rows() != n_ctrl || plan.transition_matrix.cols() != n_ctrl)
        throw DimensionError("transition matrix must be square over the controllers");
    for (std::size_t i = 0; i < n_ctrl; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n_ctrl; ++j) {
            const double p = plan.transition_matrix(i, j);
            if (p < 0.0) throw ParameterError("transition probabilities must be >= 0");
            row_sum += p;
        }
        if (std::abs(row_sum - 1.0) > 1e-12)
            throw ParameterError("transition matrix rows must sum to 1");
    }
    if (!(plan.dwell_dt > 0.0)) throw ParameterError("dwell_dt must be > 0");

    const ProjectionPattern pattern =
        plan.pattern.size() == sys.m() ? plan.pattern : ProjectionPattern::full(sys.m());
    const Mat BP = pattern.apply_to(sys.B);

    std::vector<Mat> A_closed;
    std::vector<Vec> c_off;
    for (const StandardPartsController& ctrl : plan.controllers) {
        A_closed.push_back(sys.A + BP * ctrl.gain.K);
        c_off.push_back(BP * ctrl.offset.v);
    }

    const std::size_t steps_per_dwell =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(plan.dwell_dt / dt)));
    const double dwell_used = static_cast<double>(steps_per_dwell) * dt;

    std::mt19937_64 rng(plan.seed);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto next_index = [&](std::size_t current) {
        const double r = u01();
        double acc = 0.0;
        for (std::size_t j = 0; j < n_ctrl; ++j) {
            acc += plan.transition_matrix(current, j);
            if (r < acc) return j;
        }
        return n_ctrl - 1;
    };

    MarkovRun run;
    run.dwell_used = dwell_used;
    run.trajectory.meta = "markov switching, dwell=" + std::to_string(dwell_used) +
                          ", pattern=" + pattern.name() + ", seed=" + std::to_string(plan.seed);

    std::size_t active = 0;
    numerics::VectorField field = [&](double, const Vec& x, Vec& dxdt) {
        const Vec ax = A_closed[active] * x;
        for (std::size_t i = 0; i < x.dim(); ++i) dxdt[i] = ax[i] + c_off[active][i];
    };
    auto control_at = [&](const Vec& x) {
        Vec u = plan.controllers[active].gain.K * x + plan.controllers[active].offset.v;
        for (std::size_t j = 0; j < pattern.size(); ++j)
            if (pattern.bits[j] == 0) u[j] = 0.0;
        return u;
    };

    Vec x = x0, x_next(x0.dim()), k1(x0.dim()), k2(x0.dim()), k3(x0.dim()), k4(x0.dim()),
        xtmp(x0.dim());

    auto record = [&](double t, const Vec& s) {
        run.trajectory.times.push_back(t);
        run.trajectory.states.push_back(s);
        run.trajectory.controls.push_back(control_at(s));
        Vec d = s;
        d -= target;
        const double dist = d.norm2();
        if (run.trajectory.size() == 1 || dist < run.min_distance) {
            run.min_distance = dist;
            run.min_distance_time = t;
        }
    };
    record(0.0, x);

    const double eps = 1e-12 * std::max(1.0, t_end);
    double t = 0.0;
    for (std::size_t i = 0; t < t_end - eps; ++i) {
        if (i > 0 && i % steps_per_dwell == 0) {
            const std::size_t nxt = next_index(active);
            if (nxt != active) ++run.switch_count;
            active = nxt;
        }
        double t_next = static_cast<double>(i + 1) * dt;
        if (t_next > t_end - eps) t_next = t_end;
        numerics::rk4_step(field, t, x, t_next - t, x_next, k1, k2, k3, k4, xtmp);
        if (!x_next.all_finite())
            throw DivergenceError("markov_modulate: state diverged after t = " +
                                      std::to_string(t),
                                  t);
        t = t_next;
        x = x_next;
        record(t, x);
    }

    Vec err = x;
    err -= target;
    run.terminal_distance = err.norm2();
    return run;
}

} // namespace percept::standard_parts

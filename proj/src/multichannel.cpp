#include "percept/multichannel.hpp"

#include <cmath>

#include "percept/quadrature.hpp"

namespace percept::multichannel {

LtiSystem::LtiSystem(Mat drift, Mat input) : A(std::move(drift)), B(std::move(input)) {
    if (!A.square()) throw DimensionError("LtiSystem: A must be square");
    if (B.rows() != A.rows()) throw DimensionError("LtiSystem: B row count must match A");
    if (A.rows() == 0 || B.cols() == 0) throw DimensionError("LtiSystem: empty system");
}

ProjectionPattern::ProjectionPattern(std::vector<int> mask) : bits(std::move(mask)) {
    for (int b : bits)
        if (b != 0 && b != 1) throw ParameterError("ProjectionPattern bits must be 0 or 1");
}

ProjectionPattern ProjectionPattern::full(std::size_t m) {
    return ProjectionPattern(std::vector<int>(m, 1));
}

std::size_t ProjectionPattern::active_count() const {
    std::size_t c = 0;
    for (int b : bits) c += static_cast<std::size_t>(b);
    return c;
}

bool ProjectionPattern::is_subset_of(const ProjectionPattern& other) const {
    if (bits.size() != other.bits.size()) return false;
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] == 1 && other.bits[i] == 0) return false;
    return true;
}

Mat ProjectionPattern::apply_to(const Mat& B) const {
    if (B.cols() != bits.size())
        throw DimensionError("ProjectionPattern size does not match input count");
    Mat out = B;
    for (std::size_t j = 0; j < bits.size(); ++j)
        if (bits[j] == 0)
            for (std::size_t i = 0; i < B.rows(); ++i) out(i, j) = 0.0;
    return out;
}

std::string ProjectionPattern::name() const {
    std::string s = "P[";
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (i) s += ',';
        s += bits[i] ? '1' : '0';
    }
    s += ']';
    return s;
}

namespace {

// W = sum_{i,l} A^i M (A^T)^l T^{i+l+1} / ((i+l+1) i! l!)  with M = BP B^T,
// valid when A^p = 0 for some p <= n (exact polynomial integration).
Mat nilpotent_series_gramian(const LtiSystem& sys, double T, const Mat& BP) {
    const std::size_t n = sys.n();
    std::vector<Mat> powers{Mat::identity(n)};
    Mat p = sys.A;
    std::size_t degree = 1;
    while (degree <= n && p.max_abs() > 0.0) {
        powers.push_back(p);
        p = p * sys.A;
        ++degree;
    }
    if (p.max_abs() > 0.0)
        throw ParameterError("series Gramian requires a nilpotent drift matrix");

    const Mat M = BP * BP.transposed();
    Mat W(n, n);
    double fact_i = 1.0;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (i > 0) fact_i *= static_cast<double>(i);
        double fact_l = 1.0;
        for (std::size_t l = 0; l < powers.size(); ++l) {
            if (l > 0) fact_l *= static_cast<double>(l);
            const double coeff =
                std::pow(T, static_cast<double>(i + l + 1)) /
                (static_cast<double>(i + l + 1) * fact_i * fact_l);
            Mat term = powers[i] * M * powers[l].transposed();
            term *= coeff;
            W += term;
        }
    }
    return W;
}

struct SymmetricSpectrum {
    double min_eig = 0.0;
    double max_eig = 0.0;
};

SymmetricSpectrum symmetric_extremes(const Mat& W) {
    SymmetricSpectrum s;
    bool firstv = true;
    for (const numerics::Complex& z : numerics::eig_small(W)) {
        const double r = z.real();
        if (firstv) {
            s.min_eig = s.max_eig = r;
            firstv = false;
        } else {
            s.min_eig = std::min(s.min_eig, r);
            s.max_eig = std::max(s.max_eig, r);
        }
    }
    return s;
}

} // namespace

Gramian gramian(const LtiSystem& sys, double T, const ProjectionPattern& pattern,
                GramianMethod method, std::size_t n_panels) {
    if (!(T > 0.0)) throw ParameterError("gramian requires T > 0");
    const Mat BP = pattern.apply_to(sys.B);

    Mat W;
    if (method == GramianMethod::series) {
        W = nilpotent_series_gramian(sys, T, BP);
    } else {
        // Substituting sigma = T - s turns the integrand into
        // e^{A sigma} BP BP^T e^{A^T sigma}.
        auto integrand = [&](double sigma) {
            const Mat E = numerics::mat_exp(sys.A, sigma);
            const Mat EB = E * BP;
            return EB * EB.transposed();
        };
        W = numerics::quad_simpson(std::function<Mat(double)>(integrand), 0.0, T, n_panels);
    }
    // Enforce exact symmetry against quadrature round-off.
    for (std::size_t i = 0; i < W.rows(); ++i)
        for (std::size_t j = i + 1; j < W.cols(); ++j) {
            const double avg = 0.5 * (W(i, j) + W(j, i));
            W(i, j) = W(j, i) = avg;
        }
    return Gramian{W, T, pattern};
}

MinEnergyPlan min_energy_plan(const LtiSystem& sys, const SteeringTask& task,
                              const ProjectionPattern& pattern) {
    if (task.x0.dim() != sys.n() || task.x1.dim() != sys.n())
        throw DimensionError("min_energy_plan task dimension mismatch");
    const Gramian G = gramian(sys, task.horizon_T, pattern);

    const SymmetricSpectrum spec = symmetric_extremes(G.W);
    if (!(spec.min_eig > 0.0) || spec.max_eig / spec.min_eig >= 1e12)
        throw NotControllableError(
            "system is not controllable under pattern " + pattern.name(), pattern.name());

    const Vec drift_end = numerics::mat_exp(sys.A, task.horizon_T) * task.x0;
    Vec z = task.x1;
    z -= drift_end;
    const Vec lambda = numerics::solve_linear(G.W, z);
    return MinEnergyPlan{lambda, z, numerics::dot(z, lambda), task.horizon_T, pattern};
}

Vec min_energy_control(const LtiSystem& sys, const MinEnergyPlan& plan, double t) {
    const Mat E = numerics::mat_exp(sys.A.transposed(), plan.horizon_T - t);
    Vec u = sys.B.transposed() * (E * plan.lambda);
    for (std::size_t j = 0; j < plan.pattern.bits.size(); ++j)
        if (plan.pattern.bits[j] == 0) u[j] = 0.0;
    return u;
}

MinEnergyRun simulate_min_energy(const LtiSystem& sys, const MinEnergyPlan& plan,
                                 const SteeringTask& task, double dt, double endpoint_tol) {
    const std::size_t n = sys.n();
    // Augmented state [x; running cost].
    Vec aug0(n + 1);
    for (std::size_t i = 0; i < n; ++i) aug0[i] = task.x0[i];

    Vec u_buf(sys.m());
    numerics::VectorField field = [&](double t, const Vec& s, Vec& dxdt) {
        u_buf = min_energy_control(sys, plan, t);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += sys.A(i, j) * s[j];
            for (std::size_t j = 0; j < sys.m(); ++j) acc += sys.B(i, j) * u_buf[j];
            dxdt[i] = acc;
        }
        double c = 0.0;
        for (std::size_t j = 0; j < sys.m(); ++j) c += u_buf[j] * u_buf[j];
        dxdt[n] = c;
    };

    OdeTrajectory aug =
        numerics::integrate_ode(field, aug0, 0.0, plan.horizon_T, dt, "min-energy steering");

    MinEnergyRun run;
    run.trajectory.meta = aug.meta;
    run.trajectory.times = aug.times;
    run.trajectory.states.reserve(aug.size());
    run.trajectory.controls.reserve(aug.size());
    for (std::size_t i = 0; i < aug.size(); ++i) {
        Vec x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = aug.states[i][j];
        run.trajectory.states.push_back(std::move(x));
        run.trajectory.controls.push_back(min_energy_control(sys, plan, aug.times[i]));
    }
    run.realized_cost = aug.states.back()[n];

    Vec miss = run.trajectory.final_state();
    miss -= task.x1;
    run.endpoint_miss = miss.norm2();
    if (run.endpoint_miss > endpoint_tol)
        throw InternalConsistencyError(
            "simulate_min_energy endpoint missed x1 by " + std::to_string(run.endpoint_miss) +
            " (Gramian/integration mismatch)");
    return run;
}

AugmentComparison augment_cost_compare(const LtiSystem& sys, const SteeringTask& task,
                                       const Vec& extra_col) {
    if (extra_col.dim() != sys.n())
        throw DimensionError("augment_cost_compare extra column dimension mismatch");
    const MinEnergyPlan before =
        min_energy_plan(sys, task, ProjectionPattern::full(sys.m()));

    Mat col(sys.n(), 1);
    for (std::size_t i = 0; i < sys.n(); ++i) col(i, 0) = extra_col[i];
    const LtiSystem augmented(sys.A, numerics::hcat(sys.B, col));
    const MinEnergyPlan after =
        min_energy_plan(augmented, task, ProjectionPattern::full(augmented.m()));
    return AugmentComparison{before.cost_eta, after.cost_eta};
}

std::size_t kalman_rank(const Mat& A, const Mat& B) {
    Mat block = B;
    Mat K = B;
    for (std::size_t i = 1; i < A.rows(); ++i) {
        block = A * block;
        K = numerics::hcat(K, block);
    }
    return numerics::rank(K);
}

bool k_channel_controllable(const LtiSystem& sys, const ProjectionPattern& pattern,
                            double T) {
    const Gramian G = gramian(sys, T, pattern);
    const SymmetricSpectrum spec = symmetric_extremes(G.W);
    const bool by_gramian = spec.max_eig > 0.0 && spec.min_eig > 1e-10 * spec.max_eig;
    const bool by_kalman = kalman_rank(sys.A, pattern.apply_to(sys.B)) == sys.n();
    if (by_gramian != by_kalman)
        throw InternalConsistencyError("Gramian and Kalman-rank controllability verdicts "
                                       "disagree for pattern " +
                                       pattern.name());
    return by_gramian;
}

std::vector<PatternVerdict> enumerate_patterns(const LtiSystem& sys, double T) {
    const std::size_t m = sys.m();
    if (m > 16)
        throw ParameterError("enumerate_patterns supports m <= 16; test specific patterns "
                             "with k_channel_controllable instead");

    std::vector<PatternVerdict> out;
    out.reserve(std::size_t{1} << m);
    for (std::size_t code = 0; code < (std::size_t{1} << m); ++code) {
        std::vector<int> bits(m, 0);
        for (std::size_t j = 0; j < m; ++j) bits[j] = (code >> j) & 1u ? 1 : 0;
        ProjectionPattern p(bits);
        out.push_back(PatternVerdict{p, k_channel_controllable(sys, p, T)});
    }

    // Lattice monotonicity: a superset of a controllable pattern is controllable.
    for (const PatternVerdict& a : out) {
        if (!a.controllable) continue;
        for (const PatternVerdict& b : out)
            if (a.pattern.is_subset_of(b.pattern) && !b.controllable)
                throw InternalConsistencyError(
                    "pattern lattice monotonicity violated: " + a.pattern.name() +
                    " controllable but superset " + b.pattern.name() + " is not");
    }
    return out;
}

} // namespace percept::multichannel

#include "opsplit/strengthened.hpp"

#include <cmath>
#include <sstream>

namespace opsplit {

double strengthened_mu(const StrengthenConfig& config, double beta) {
    const double theta_over_beta = std::isinf(beta) ? 0.0 : config.theta / beta;
    return 1.0 / (theta_over_beta + config.sigma_t);
}

ValidationResult validate_strengthen(const StrengthenConfig& config, double beta, double gamma) {
    ValidationResult res;
    if (!(config.theta > 0.0))
        res.errors.push_back({"theta must be positive", config.theta, 0.0});
    if (config.sigma_t < 0.0)
        res.errors.push_back({"sigma_T must be nonnegative", config.sigma_t, 0.0});
    const double sum = config.sigma_sum();
    if (!(sum > 0.0))
        res.errors.push_back({"sigma_A + sigma_B + sigma_T must be positive", sum, 0.0});
    const double ca = config.theta * config.alpha_a + config.sigma_a;
    const double cb = config.theta * config.alpha_b + config.sigma_b;
    const double ct = config.theta * config.alpha_t + config.sigma_t;
    if (ca < 0.0 || cb < 0.0 || ct < 0.0) {
        std::ostringstream os;
        os << "(theta alpha + sigma) componentwise nonnegative required, got (" << ca << ", "
           << cb << ", " << ct << ")";
        res.errors.push_back({os.str(), std::min(std::min(ca, cb), ct), 0.0});
    } else if (ca == 0.0 && cb == 0.0 && ct == 0.0) {
        res.errors.push_back({"(theta alpha + sigma) must not vanish for all three operators", 0.0, 0.0});
    }
    if (res.errors.empty()) {
        const double mu = strengthened_mu(config, beta);
        if (!(mu > 0.0))
            res.errors.push_back({"derived mu = (theta/beta + sigma_T)^{-1} must be positive", mu, 0.0});
        else if (!(gamma > 0.0) || !(gamma < 4.0 * mu)) {
            std::ostringstream os;
            os << "stepsize gamma = " << gamma << " outside ]0, 4 mu[ = ]0, " << 4.0 * mu << "[";
            res.errors.push_back({os.str(), gamma, 4.0 * mu});
        }
        if (!(1.0 + gamma * config.sigma_a > 0.0))
            res.errors.push_back({"1 + gamma sigma_A must be positive", 1.0 + gamma * config.sigma_a, 0.0});
        if (!(1.0 + gamma * config.sigma_b > 0.0))
            res.errors.push_back({"1 + gamma sigma_B must be positive", 1.0 + gamma * config.sigma_b, 0.0});
    }
    return res;
}

Vector strengthened_shadow(const ThreeOperatorProblem& problem, const StrengthenConfig& config,
                           double gamma, const Vector& x) {
    const double da = 1.0 + gamma * config.sigma_a;
    Vector arg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        arg[i] = (x[i] + gamma * config.sigma_a * config.q[i]) / da;
    return problem.A(gamma * config.theta / da, arg);
}

StepResult strengthened_dy_step(const ThreeOperatorProblem& problem,
                                const StrengthenConfig& config, double gamma, double lambda,
                                const Vector& x, int iteration) {
    const double db = 1.0 + gamma * config.sigma_b;
    const Vector& q = config.q;

    StepResult r;
    r.u = strengthened_shadow(problem, config, gamma, x);
    const Vector tu = problem.T(r.u);
    Vector arg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        arg[i] = ((2.0 - gamma * config.sigma_t) * r.u[i] - x[i] - config.theta * gamma * tu[i] +
                  gamma * (config.sigma_b + config.sigma_t) * q[i]) /
                 db;
    r.v = problem.B(gamma * config.theta / db, arg);
    r.x_next = x;
    for (std::size_t i = 0; i < x.size(); ++i) r.x_next[i] += lambda * (r.v[i] - r.u[i]);
    if (!all_finite(r.x_next) || !all_finite(r.u) || !all_finite(r.v))
        throw NumericalError("strengthened_dy_step: non-finite iterate", iteration);
    return r;
}

SolveResult strengthened_solve(const ThreeOperatorProblem& problem,
                               const StrengthenConfig& config, const SolverConfig& solver,
                               const Vector& x0) {
    if (static_cast<int>(x0.size()) != problem.dim || static_cast<int>(config.q.size()) != problem.dim)
        throw std::invalid_argument("strengthened_solve: dimension mismatch");
    ValidationResult v = validate_strengthen(config, problem.beta, solver.gamma);
    if (v.ok()) {
        const double mu = strengthened_mu(config, problem.beta);
        const double bound = relaxation_bound(solver.gamma, mu);
        for (double lam : solver.schedule.checked_values(solver.max_iter)) {
            if (!(lam > 0.0) || lam > bound) {
                std::ostringstream os;
                os << "relaxation parameter " << lam << " outside ]0, " << bound << "] (mu = " << mu << ")";
                v.errors.push_back({os.str(), lam, bound});
                break;
            }
        }
    }
    if (!v.ok())
        throw std::invalid_argument("strengthened_solve: invalid configuration\n" + v.summary());

    // Same driver loop as solve(); duplicated here to keep the plain engine
    // free of strengthening parameters.
    SolveResult out;
    out.trace.recorded = solver.record_trace;
    Vector x = x0;
    for (int k = 0;; ++k) {
        StepResult s = strengthened_dy_step(problem, config, solver.gamma, solver.schedule.at(k), x, k);
        const Vector w = subtract(s.v, s.u);
        const double res = norm(w);
        std::optional<double> shadow_err;
        if (solver.reference) shadow_err = distance(s.u, solver.reference->point);
        if (solver.record_trace) {
            out.trace.x.push_back(x);
            out.trace.u.push_back(s.u);
            out.trace.v.push_back(s.v);
            out.trace.residual.push_back(res);
            if (shadow_err) out.trace.shadow_error.push_back(*shadow_err);
        }
        out.iterations = k + 1;
        const bool shadow_hit = shadow_err && *shadow_err < solver.reference->tol;
        const bool residual_hit = res <= solver.tol_residual;
        if (shadow_hit || residual_hit || out.iterations >= solver.max_iter) {
            out.solution = std::move(s.u);
            out.fixed_point = std::move(x);
            out.final_residual = res;
            out.final_shadow_error = shadow_err;
            out.reason = shadow_hit      ? TerminationReason::ShadowConverged
                         : residual_hit ? TerminationReason::ResidualConverged
                                        : TerminationReason::MaxIterReached;
            return out;
        }
        x = std::move(s.x_next);
    }
}

ResolventResult resolvent_of_sum(const ThreeOperatorProblem& problem,
                                 const StrengthenConfig& config, double gamma,
                                 const RelaxationSchedule& schedule, const Vector& x0,
                                 double tol, int max_iter) {
    SolverConfig solver;
    solver.gamma = gamma;
    solver.schedule = schedule;
    solver.max_iter = max_iter;
    solver.tol_residual = tol;
    solver.record_trace = false;
    ResolventResult out;
    out.details = strengthened_solve(problem, config, solver, x0);
    out.point = out.details.solution;
    out.served_parameter = config.served_parameter();
    return out;
}

ThreeOperatorProblem shifted_problem(const ThreeOperatorProblem& problem, double mu,
                                     const Vector& q) {
    if (!(mu > 0.0)) throw std::invalid_argument("shifted_problem: mu must be positive");
    if (static_cast<int>(q.size()) != problem.dim)
        throw std::invalid_argument("shifted_problem: q dimension mismatch");
    CocoerciveMap shifted;
    shifted.dim = problem.dim;
    shifted.beta = 1.0 / ((std::isinf(problem.beta) ? 0.0 : 1.0 / problem.beta) + 1.0 / mu);
    shifted.name = problem.T.name + "+shift";
    shifted.apply = [T = problem.T, mu, q](const Vector& x) {
        Vector r = T(x);
        for (std::size_t i = 0; i < x.size(); ++i) r[i] += (x[i] - q[i]) / mu;
        return r;
    };
    return make_problem(problem.A, problem.B, std::move(shifted));
}

ResolventResult resolvent_via_shift(const ThreeOperatorProblem& problem, double mu,
                                    const Vector& q, double gamma,
                                    const RelaxationSchedule& schedule, const Vector& x0,
                                    double tol, int max_iter) {
    const ThreeOperatorProblem shifted = shifted_problem(problem, mu, q);
    SolverConfig solver;
    solver.gamma = gamma;
    solver.schedule = schedule;
    solver.max_iter = max_iter;
    solver.tol_residual = tol;
    solver.record_trace = false;
    ResolventResult out;
    out.details = solve(shifted, solver, x0);
    out.point = out.details.solution;
    out.served_parameter = mu;
    return out;
}

} // namespace opsplit

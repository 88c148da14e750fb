#include "opsplit/splitting.hpp"

#include <cmath>
#include <sstream>

namespace opsplit {

ThreeOperatorProblem make_problem(ResolventOperator A, ResolventOperator B, CocoerciveMap T) {
    if (A.dim != B.dim || A.dim != T.dim)
        throw std::invalid_argument("make_problem: operator dimensions disagree");
    if (!(T.beta > 0.0))
        throw std::invalid_argument("make_problem: cocoercivity constant must be positive");
    ThreeOperatorProblem p;
    p.dim = A.dim;
    p.beta = T.beta;
    p.A = std::move(A);
    p.B = std::move(B);
    p.T = std::move(T);
    return p;
}

RelaxationSchedule RelaxationSchedule::constant(double value) {
    RelaxationSchedule s;
    s.kind_ = Kind::Constant;
    s.value_ = value;
    return s;
}

RelaxationSchedule RelaxationSchedule::table(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("RelaxationSchedule::table: empty table");
    RelaxationSchedule s;
    s.kind_ = Kind::Table;
    s.table_ = std::move(values);
    return s;
}

RelaxationSchedule RelaxationSchedule::formula(std::function<double(int)> rule) {
    if (!rule) throw std::invalid_argument("RelaxationSchedule::formula: empty rule");
    RelaxationSchedule s;
    s.kind_ = Kind::Formula;
    s.rule_ = std::move(rule);
    return s;
}

double RelaxationSchedule::at(int k) const {
    switch (kind_) {
        case Kind::Constant: return value_;
        case Kind::Table: return table_[static_cast<std::size_t>(k) % table_.size()];
        case Kind::Formula: return rule_(k);
    }
    return value_;
}

std::vector<double> RelaxationSchedule::checked_values(int max_iter) const {
    switch (kind_) {
        case Kind::Constant: return {value_};
        case Kind::Table: return table_;
        case Kind::Formula: {
            std::vector<double> vals(static_cast<std::size_t>(max_iter));
            for (int k = 0; k < max_iter; ++k) vals[static_cast<std::size_t>(k)] = rule_(k);
            return vals;
        }
    }
    return {};
}

double relaxation_bound(double gamma, double beta) {
    if (std::isinf(beta)) return 2.0;
    return 2.0 - gamma / (2.0 * beta);
}

std::string ValidationResult::summary() const {
    std::ostringstream os;
    for (const auto& e : errors) os << "error: " << e.message << "\n";
    for (const auto& w : warnings) os << "warning: " << w.message << "\n";
    return os.str();
}

ValidationResult validate(const ThreeOperatorProblem& problem, const SolverConfig& config) {
    ValidationResult res;
    const double beta = problem.beta;
    const double gamma = config.gamma;

    if (!(gamma > 0.0) || !(std::isinf(beta) || gamma < 4.0 * beta)) {
        std::ostringstream os;
        os << "stepsize gamma = " << gamma << " outside ]0, 4 beta[ = ]0, " << 4.0 * beta << "[";
        res.errors.push_back({os.str(), gamma, 4.0 * beta});
    }
    if (config.max_iter < 1)
        res.errors.push_back({"max_iter must be >= 1", static_cast<double>(config.max_iter), 1.0});
    if (!(config.tol_residual >= 0.0))
        res.errors.push_back({"tol_residual must be nonnegative", config.tol_residual, 0.0});
    if (config.reference && static_cast<int>(config.reference->point.size()) != problem.dim)
        res.errors.push_back({"shadow reference dimension mismatch",
                              static_cast<double>(config.reference->point.size()),
                              static_cast<double>(problem.dim)});

    if (res.errors.empty()) {
        const double bound = relaxation_bound(gamma, beta);
        const auto values = config.schedule.checked_values(config.max_iter);
        bool all_at_bound = !values.empty();
        for (double lam : values) {
            if (!(lam > 0.0) || lam > bound) {
                std::ostringstream os;
                os << "relaxation parameter " << lam << " outside ]0, " << bound << "]";
                res.errors.push_back({os.str(), lam, bound});
                break;
            }
            if (lam != bound) all_at_bound = false;
        }
        if (res.errors.empty() && all_at_bound) {
            std::ostringstream os;
            os << "schedule constantly equal to the bound " << bound
               << "; the divergence condition sum lambda_k (bound - lambda_k) = +inf fails, "
                  "so residual convergence needs uniform monotonicity of A or B";
            res.warnings.push_back({os.str(), values.front(), bound});
        }
    }
    return res;
}

std::string to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::ShadowConverged: return "shadow_converged";
        case TerminationReason::ResidualConverged: return "residual_converged";
        case TerminationReason::MaxIterReached: return "max_iter_reached";
    }
    return "unknown";
}

StepResult davis_yin_step(const ThreeOperatorProblem& problem, double gamma, double lambda,
                          const Vector& x, int iteration) {
    StepResult r;
    r.u = problem.A(gamma, x);
    const Vector tu = problem.T(r.u);
    Vector arg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) arg[i] = 2.0 * r.u[i] - x[i] - gamma * tu[i];
    r.v = problem.B(gamma, arg);
    r.x_next = x;
    for (std::size_t i = 0; i < x.size(); ++i) r.x_next[i] += lambda * (r.v[i] - r.u[i]);
    if (!all_finite(r.x_next) || !all_finite(r.u) || !all_finite(r.v))
        throw NumericalError("davis_yin_step: non-finite iterate", iteration);
    return r;
}

Vector dy_operator_apply(const ThreeOperatorProblem& problem, double gamma, const Vector& x) {
    if (!(gamma > 0.0)) throw std::invalid_argument("dy_operator_apply: gamma must be positive");
    return davis_yin_step(problem, gamma, 1.0, x).x_next;
}

namespace {

/// Shared driver: iterates an arbitrary step map with the standard
/// stopping rules.  `shadow` extracts u_k from x_k (the same evaluation
/// the step performs first), so stopping is checked on the iterate before
/// it is advanced; the returned pair (fixed_point, solution) is therefore
/// consistent: solution = shadow(fixed_point).
struct StepOutput {
    Vector x_next, u, v;
};

SolveResult run_iteration(const std::function<StepOutput(const Vector&, int)>& step,
                          const SolverConfig& config, const Vector& x0) {
    SolveResult out;
    out.trace.recorded = config.record_trace;
    Vector x = x0;
    for (int k = 0;; ++k) {
        StepOutput s = step(x, k);
        Vector w = subtract(s.v, s.u);
        const double res = norm(w);
        std::optional<double> shadow_err;
        if (config.reference) shadow_err = distance(s.u, config.reference->point);
        if (config.record_trace) {
            out.trace.x.push_back(x);
            out.trace.u.push_back(s.u);
            out.trace.v.push_back(s.v);
            out.trace.residual.push_back(res);
            if (shadow_err) out.trace.shadow_error.push_back(*shadow_err);
        }
        out.iterations = k + 1;
        const bool shadow_hit = shadow_err && *shadow_err < config.reference->tol;
        const bool residual_hit = res <= config.tol_residual;
        if (shadow_hit || residual_hit || out.iterations >= config.max_iter) {
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

} // namespace

SolveResult solve(const ThreeOperatorProblem& problem, const SolverConfig& config,
                  const Vector& x0) {
    if (static_cast<int>(x0.size()) != problem.dim)
        throw std::invalid_argument("solve: starting point dimension mismatch");
    if (!all_finite(x0)) throw std::invalid_argument("solve: starting point not finite");
    const ValidationResult v = validate(problem, config);
    if (!v.ok()) throw std::invalid_argument("solve: invalid configuration\n" + v.summary());
    auto step = [&problem, &config](const Vector& x, int k) {
        StepResult s = davis_yin_step(problem, config.gamma, config.schedule.at(k), x, k);
        return StepOutput{std::move(s.x_next), std::move(s.u), std::move(s.v)};
    };
    return run_iteration(step, config, x0);
}

ForwardBackwardResult forward_backward(const ResolventOperator& B, const CocoerciveMap& T,
                                       const SolverConfig& config, const Vector& x0) {
    if (static_cast<int>(x0.size()) != B.dim)
        throw std::invalid_argument("forward_backward: starting point dimension mismatch");
    const ThreeOperatorProblem proxy = make_problem(zero_resolvent(B.dim), B, T);
    const ValidationResult v = validate(proxy, config);
    if (!v.ok()) throw std::invalid_argument("forward_backward: invalid configuration\n" + v.summary());
    // Direct transcription of the A = 0 specialization; matches the generic
    // engine exactly since J_{gamma A} = Id.
    auto step = [&B, &T, &config](const Vector& x, int k) {
        const Vector tx = T(x);
        Vector arg(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) arg[i] = 2.0 * x[i] - x[i] - config.gamma * tx[i];
        Vector vk = B(config.gamma, arg);
        const double lambda = config.schedule.at(k);
        Vector xn = x;
        for (std::size_t i = 0; i < x.size(); ++i) xn[i] += lambda * (vk[i] - x[i]);
        if (!all_finite(xn) || !all_finite(vk))
            throw NumericalError("forward_backward: non-finite iterate", k);
        return StepOutput{std::move(xn), x, std::move(vk)};
    };
    ForwardBackwardResult out;
    out.result = run_iteration(step, config, x0);
    out.dual = T(out.result.fixed_point);
    return out;
}

SolveResult douglas_rachford(const ResolventOperator& A, const ResolventOperator& B,
                             const SolverConfig& config, const Vector& x0) {
    return solve(make_problem(A, B, zero_map(A.dim)), config, x0);
}

SolveResult backward_forward(const ResolventOperator& A, const CocoerciveMap& T,
                             const SolverConfig& config, const Vector& x0) {
    return solve(make_problem(A, zero_resolvent(A.dim), T), config, x0);
}

FejerReport fejer_report(const Trace& trace, const Vector& reference, double tol) {
    if (!trace.recorded || trace.x.empty())
        throw std::invalid_argument("fejer_report: trace has no recorded iterates");
    FejerReport rep;
    rep.max_increase = -std::numeric_limits<double>::infinity();
    double prev = distance(trace.x.front(), reference);
    for (std::size_t k = 1; k < trace.x.size(); ++k) {
        const double cur = distance(trace.x[k], reference);
        rep.max_increase = std::max(rep.max_increase, cur - prev);
        prev = cur;
    }
    if (trace.x.size() == 1) rep.max_increase = 0.0;
    rep.pass = rep.max_increase <= tol;
    return rep;
}

} // namespace opsplit

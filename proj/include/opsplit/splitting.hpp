/* Davis-Yin three-operator splitting engine.
 *
 * Solves 0 in (A + B + T)(x) for maximally monotone A, B and
 * beta-cocoercive T via
 *
 *     u_k = J_{gamma A}(x_k)
 *     v_k = J_{gamma B}(2 u_k - x_k - gamma T(u_k))
 *     x_{k+1} = x_k + lambda_k (v_k - u_k),
 *
 * with stepsizes admitted anywhere in ]0, 4 beta[ and relaxation
 * parameters in ]0, 2 - gamma/(2 beta)].  The shadow sequence
 * u_k = J_{gamma A}(x_k) converges to a zero of the sum while x_k
 * converges to a fixed point of the splitting map.
 *
 * Douglas-Rachford (T = 0), forward-backward (A = 0) and
 * backward-forward (B = 0) are special cases.
 */
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opsplit/operators.hpp"
#include "opsplit/vector.hpp"

namespace opsplit {

struct ThreeOperatorProblem {
    ResolventOperator A;
    ResolventOperator B;
    CocoerciveMap T;
    double beta = 0.0; // equals T.beta
    int dim = 0;
};

/// Validates dimensions and records beta = T.beta.
ThreeOperatorProblem make_problem(ResolventOperator A, ResolventOperator B, CocoerciveMap T);

class RelaxationSchedule {
public:
    static RelaxationSchedule constant(double value);
    static RelaxationSchedule table(std::vector<double> values);
    /// Closed-form rule k -> lambda_k; validated lazily over the first
    /// max_iter indices.
    static RelaxationSchedule formula(std::function<double(int)> rule);

    double at(int k) const;
    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const { return value_; }

    /// All values the solver may use for indices 0 .. max_iter-1.
    std::vector<double> checked_values(int max_iter) const;

private:
    enum class Kind { Constant, Table, Formula };
    Kind kind_ = Kind::Constant;
    double value_ = 1.0;
    std::vector<double> table_;
    std::function<double(int)> rule_;
};

struct ShadowTarget {
    Vector point;   // known solution s
    double tol;     // stop when |u_k - s| < tol
};

struct SolverConfig {
    double gamma = 1.0;
    RelaxationSchedule schedule = RelaxationSchedule::constant(1.0);
    int max_iter = 10000;
    double tol_residual = 1e-10;
    std::optional<ShadowTarget> reference;
    bool record_trace = true;
};

struct ValidationIssue {
    std::string message;
    double value = 0.0;
    double bound = 0.0;
};

struct ValidationResult {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;
    bool ok() const { return errors.empty(); }
    std::string summary() const;
};

/// Checks gamma in ]0, 4 beta[ and every schedule value in
/// ]0, 2 - gamma/(2 beta)].  A schedule constantly equal to the upper
/// bound is legal but gets a warning: the divergence condition
/// sum lambda_k (2 - gamma/(2 beta) - lambda_k) = +inf fails, so residual
/// convergence is only guaranteed under uniform monotonicity.
ValidationResult validate(const ThreeOperatorProblem& problem, const SolverConfig& config);

/// Upper bound 2 - gamma/(2 beta) for the relaxation parameters (2 when
/// beta = +inf, i.e. for Douglas-Rachford).
double relaxation_bound(double gamma, double beta);

enum class TerminationReason { ShadowConverged, ResidualConverged, MaxIterReached };

std::string to_string(TerminationReason reason);

struct Trace {
    // Per-iteration history; populated only when record_trace is set.
    std::vector<Vector> x, u, v;
    std::vector<double> residual;       // |w_k| = |v_k - u_k|
    std::vector<double> shadow_error;   // |u_k - s|; empty without a reference
    bool recorded = false;
    std::size_t size() const { return residual.size(); }
};

struct StepResult {
    Vector x_next;
    Vector u;
    Vector v;
};

/// One iteration of the splitting map at x_k; exactly one resolvent
/// evaluation of A and of B and one evaluation of T.
StepResult davis_yin_step(const ThreeOperatorProblem& problem, double gamma, double lambda,
                          const Vector& x, int iteration = -1);

/// The splitting operator itself:
/// DY(x) = J_{gamma B}(2 J_{gamma A}(x) - x - gamma T(J_{gamma A}(x))) + x - J_{gamma A}(x),
/// equal to davis_yin_step with lambda = 1.
Vector dy_operator_apply(const ThreeOperatorProblem& problem, double gamma, const Vector& x);

struct SolveResult {
    Vector solution;      // last shadow point u_k: the estimate of a zero of A+B+T
    Vector fixed_point;   // last x_k: the estimate of a fixed point of the splitting map
    Trace trace;
    TerminationReason reason = TerminationReason::MaxIterReached;
    /// Number of evaluations of the splitting map performed.
    int iterations = 0;
    double final_residual = 0.0;
    std::optional<double> final_shadow_error;
    bool converged() const { return reason != TerminationReason::MaxIterReached; }
};

/// Iterates until a stopping rule fires.  Rule priority: shadow error
/// (when a reference is supplied), then residual, then max_iter.  Hitting
/// max_iter is reported through the result, not an exception, so sweeps
/// can record saturated cells.  Throws NumericalError on non-finite
/// iterates and std::invalid_argument when validate() fails.
SolveResult solve(const ThreeOperatorProblem& problem, const SolverConfig& config,
                  const Vector& x0);

struct ForwardBackwardResult {
    SolveResult result;
    Vector dual; // T(x_bar), the unique dual solution
};

/// Forward-backward splitting: x_{k+1} = x_k + lambda_k (J_{gamma B}(x_k - gamma T(x_k)) - x_k).
/// Identical trajectory to solve() with A = 0.
ForwardBackwardResult forward_backward(const ResolventOperator& B, const CocoerciveMap& T,
                                       const SolverConfig& config, const Vector& x0);

/// Douglas-Rachford: solve() with T = 0 (relaxation bound becomes 2, any gamma > 0).
SolveResult douglas_rachford(const ResolventOperator& A, const ResolventOperator& B,
                             const SolverConfig& config, const Vector& x0);

/// Backward-forward: solve() with B = 0.
SolveResult backward_forward(const ResolventOperator& A, const CocoerciveMap& T,
                             const SolverConfig& config, const Vector& x0);

struct FejerReport {
    double max_increase = 0.0; // max over k of |x_{k+1}-ref| - |x_k-ref|
    bool pass = false;
};

/// Fejer monotonicity of the recorded x-sequence with respect to a point.
FejerReport fejer_report(const Trace& trace, const Vector& reference, double tol = 1e-12);

} // namespace opsplit

/* Resolvent of a sum via strengthened splitting.
 *
 * Computes J_{(theta/(sigma_A+sigma_B+sigma_T))(A+B+T)}(q) by running the
 * three-operator iteration on strengthened copies of A, B, T:
 *
 *   u_k = J_{(gamma theta/(1+gamma sigma_A)) A}((x_k + gamma sigma_A q)/(1+gamma sigma_A))
 *   v_k = J_{(gamma theta/(1+gamma sigma_B)) B}(((2-gamma sigma_T) u_k - x_k
 *           - theta gamma T(u_k) + gamma (sigma_B+sigma_T) q)/(1+gamma sigma_B))
 *   x_{k+1} = x_k + lambda_k (v_k - u_k)
 *
 * with mu = (theta/beta + sigma_T)^{-1} playing the role of the
 * cocoercivity constant: gamma in ]0, 4 mu[ and lambda_k in
 * ]0, 2 - gamma/(2 mu)].  Both (u_k) and (v_k) converge to the resolvent
 * point.  The special case sigma_A = sigma_B = 0, theta = 1,
 * sigma_T = 1/mu is the same as running the plain splitting on
 * (A, B, T~) with the shifted map T~ = (1/mu)(Id - q) + T.
 */
#pragma once

#include "opsplit/splitting.hpp"

namespace opsplit {

struct StrengthenConfig {
    double theta = 1.0;
    double sigma_a = 0.0;
    double sigma_b = 0.0;
    double sigma_t = 1.0; // must stay >= 0
    // Monotonicity moduli of A, B, T (metadata; 0 for all catalog operators).
    double alpha_a = 0.0;
    double alpha_b = 0.0;
    double alpha_t = 0.0;
    Vector q; // resolvent query point

    double sigma_sum() const { return sigma_a + sigma_b + sigma_t; }
    /// Resolvent parameter served: theta / (sigma_A + sigma_B + sigma_T).
    double served_parameter() const { return theta / sigma_sum(); }
};

/// mu = (theta/beta + sigma_T)^{-1}.
double strengthened_mu(const StrengthenConfig& config, double beta);

/// Checks, each reported separately: sigma_A + sigma_B + sigma_T > 0;
/// (theta alpha_A + sigma_A, theta alpha_B + sigma_B, theta alpha_T + sigma_T)
/// componentwise >= 0 and not all zero; sigma_T >= 0; gamma in ]0, 4 mu[;
/// 1 + gamma sigma_A > 0 and 1 + gamma sigma_B > 0 (positive scaled
/// resolvent parameters).
ValidationResult validate_strengthen(const StrengthenConfig& config, double beta, double gamma);

/// One strengthened iteration at x.
StepResult strengthened_dy_step(const ThreeOperatorProblem& problem,
                                const StrengthenConfig& config, double gamma, double lambda,
                                const Vector& x, int iteration = -1);

/// The shadow map of the strengthened iteration (what u_k is computed from x_k).
Vector strengthened_shadow(const ThreeOperatorProblem& problem, const StrengthenConfig& config,
                           double gamma, const Vector& x);

/// Full driver with the same stopping rules as solve(); the relaxation
/// bound uses mu in place of beta.
SolveResult strengthened_solve(const ThreeOperatorProblem& problem,
                               const StrengthenConfig& config, const SolverConfig& solver,
                               const Vector& x0);

struct ResolventResult {
    Vector point;            // u-limit = J_{(theta/sigma_sum)(A+B+T)}(q)
    double served_parameter; // theta / sigma_sum
    SolveResult details;
};

/// Iterates to residual tolerance and returns the u-limit.  Requires
/// q in ran(Id + served_parameter (A+B+T)); this holds for every catalog
/// operator (maximally monotone, full-domain resolvents) and is not
/// checked at runtime.
ResolventResult resolvent_of_sum(const ThreeOperatorProblem& problem,
                                 const StrengthenConfig& config, double gamma,
                                 const RelaxationSchedule& schedule, const Vector& x0,
                                 double tol, int max_iter = 100000);

/// Same resolvent via the shifted cocoercive map: runs the plain engine on
/// (A, B, T~) with T~ = (1/mu)(Id - q) + T, cocoercive with constant
/// (1/beta + 1/mu)^{-1}, and returns the shadow limit.
ResolventResult resolvent_via_shift(const ThreeOperatorProblem& problem, double mu,
                                    const Vector& q, double gamma,
                                    const RelaxationSchedule& schedule, const Vector& x0,
                                    double tol, int max_iter = 100000);

/// The shifted problem used by resolvent_via_shift (exposed for tests and
/// sweeps): (A, B, (1/mu)(Id - q) + T) with the combined constant.
ThreeOperatorProblem shifted_problem(const ThreeOperatorProblem& problem, double mu,
                                     const Vector& q);

} // namespace opsplit

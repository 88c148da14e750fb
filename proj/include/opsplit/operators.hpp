/* Operator catalog: resolvents of maximally monotone operators and
 * cocoercive maps, plus samplers that falsify their defining inequalities.
 *
 * A ResolventOperator represents a set-valued operator A through its
 * resolvent J_{gamma A} = (Id + gamma A)^{-1}, which is what splitting
 * schemes actually evaluate.  A CocoerciveMap is a single-valued T with
 * <x-y, Tx-Ty> >= beta |Tx-Ty|^2.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "opsplit/vector.hpp"

namespace opsplit {

/// Thrown when an iterative routine fails to meet its tolerance; carries
/// the last estimate so callers can still inspect it.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double last_estimate)
        : std::runtime_error(msg), last_estimate_(last_estimate) {}
    double last_estimate() const { return last_estimate_; }

private:
    double last_estimate_;
};

/// Thrown when an iteration produces a non-finite value.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& msg, int iteration)
        : std::runtime_error(msg + " at iteration " + std::to_string(iteration)),
          iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

struct ResolventOperator {
    int dim = 0;
    /// eta-monotonicity modulus of the underlying operator (metadata; 0 for
    /// plain maximal monotonicity).  The resolvent is single-valued and
    /// total whenever 1 + gamma*modulus > 0.
    double modulus = 0.0;
    std::function<Vector(double gamma, const Vector& x)> resolvent;
    std::string name;

    Vector operator()(double gamma, const Vector& x) const { return resolvent(gamma, x); }
};

struct CocoerciveMap {
    int dim = 0;
    /// Cocoercivity constant; +infinity encodes the zero map.
    double beta = 0.0;
    std::function<Vector(const Vector& x)> apply;
    std::string name;

    Vector operator()(const Vector& x) const { return apply(x); }
};

/// Matrix-free linear map with its adjoint.
struct LinearOperator {
    int rows = 0;
    int cols = 0;
    std::function<Vector(const Vector&)> apply;
    std::function<Vector(const Vector&)> apply_adjoint;
};

// ---- projections and proximity operators -------------------------------

/// Projection onto the closed ball {y : |y - center| <= radius}.
Vector project_ball(const Vector& center, double radius, const Vector& x);

/// Componentwise clamp onto the box [lo, hi].
Vector project_box(const Vector& lo, const Vector& hi, const Vector& x);

/// Proximity operator of t*|.|_1: the soft thresholding function.
Vector soft_threshold(double t, const Vector& x);

/// Resolvent of the zero operator: the identity, for every gamma > 0.
Vector zero_operator_resolvent(double gamma, const Vector& x);

/// Gradient of x -> 0.5 |Mx - b|^2, i.e. M^T(Mx - b).
Vector least_squares_gradient(const LinearOperator& M, const Vector& b, const Vector& x);

/// Gradient of x -> (1/(2 rho)) d^2(x, C) where P_C is the projector onto
/// a closed convex set C; returns (x - P_C(x)) / rho.
Vector squared_distance_gradient(const std::function<Vector(const Vector&)>& projector,
                                 double rho, const Vector& x);

// ---- catalog constructors ----------------------------------------------

ResolventOperator zero_resolvent(int dim);
ResolventOperator ball_normal_cone(Vector center, double radius);
ResolventOperator box_normal_cone(Vector lo, Vector hi);
/// Subdifferential of weight * |.|_1; resolvent at gamma is soft
/// thresholding with parameter gamma * weight.
ResolventOperator l1_subdifferential(int dim, double weight);
/// Normal cone of the box [0,1]^n expressed through an orthonormal change
/// of coordinates: resolvent is x -> Wt(clamp(W x)).
ResolventOperator box_normal_cone_through(const LinearOperator& synthesis, int dim);

CocoerciveMap zero_map(int dim);
CocoerciveMap identity_map(int dim);
/// T(x) = M^T(Mx - b) with beta = 1/|M^T M| estimated by power iteration.
CocoerciveMap least_squares_map(const LinearOperator& M, Vector b);
/// T = (1/rho)(Id - P_C), cocoercive with constant rho.
CocoerciveMap squared_distance_map(std::function<Vector(const Vector&)> projector,
                                   double rho, int dim);

// ---- linear operator helpers -------------------------------------------

LinearOperator dense_operator(int rows, int cols, std::vector<double> row_major);
LinearOperator identity_operator(int n);
LinearOperator diagonal_operator(Vector d);
LinearOperator compose(const LinearOperator& outer, const LinearOperator& inner);

/// Largest eigenvalue of M^T M to relative accuracy tol.  Deterministic
/// given the seed of the starting vector.  Throws ConvergenceError (with
/// the last estimate attached) if max_iter is hit first.
double power_iteration(const LinearOperator& M, double tol, int max_iter,
                       std::uint64_t seed = 0);

// ---- sampled inequality checks -----------------------------------------

struct CheckReport {
    bool pass = false;
    double worst_margin = 0.0;
    int samples = 0;
};

inline constexpr double kCheckSlack = 1e-10;

/// Draws `samples` pairs uniformly from [-10,10]^dim and reports the worst
/// value of <x-y, Tx-Ty> - beta |Tx-Ty|^2 (negative margin beyond the
/// slack means the declared constant is falsified).
CheckReport check_cocoercive(const CocoerciveMap& T, int samples, std::uint64_t seed);

/// Worst margin of <x-y, Jx-Jy> - |Jx-Jy|^2 over sampled pairs; resolvents
/// of (maximally) monotone operators are firmly nonexpansive, so a
/// modulus-0 catalog entry must pass.
CheckReport check_firmly_nonexpansive(const ResolventOperator& A, double gamma,
                                      int samples, std::uint64_t seed);

} // namespace opsplit

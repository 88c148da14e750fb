#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "opsplit/csv.hpp"
#include "opsplit/experiments.hpp"
#include "opsplit/rng.hpp"
#include "opsplit/splitting.hpp"
#include "support/test_oracles.hpp"

using namespace opsplit;

namespace {

ThreeOperatorProblem scalar_problem(double beta = 1.0) {
    // A = B = 0, T = Id (beta = 1): the splitting map reduces to (1 - gamma) Id.
    CocoerciveMap t = identity_map(1);
    t.beta = beta;
    return make_problem(zero_resolvent(1), zero_resolvent(1), std::move(t));
}

double max_abs_diff(const Vector& a, const Vector& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("validate: stepsize and relaxation ranges") {
    const ThreeOperatorProblem p = scalar_problem();

    SolverConfig c;
    c.gamma = 3.9;
    c.schedule = RelaxationSchedule::constant(0.04);
    CHECK(validate(p, c).ok()); // 0.04 < 2 - 3.9/2 = 0.05

    c.schedule = RelaxationSchedule::constant(0.06);
    CHECK_FALSE(validate(p, c).ok());

    for (double gamma : {0.0, 4.0, 5.0}) {
        c.gamma = gamma;
        c.schedule = RelaxationSchedule::constant(0.01);
        const ValidationResult v = validate(p, c);
        CHECK_FALSE(v.ok());
        CHECK(v.errors.front().value == gamma);
    }

    // lambda exactly at the bound: allowed, but a constant-at-bound schedule warns.
    c.gamma = 1.0;
    c.schedule = RelaxationSchedule::constant(1.5); // bound = 2 - 0.5 = 1.5
    const ValidationResult v = validate(p, c);
    CHECK(v.ok());
    REQUIRE(v.warnings.size() == 1);

    // A table touching the bound only sometimes does not warn.
    c.schedule = RelaxationSchedule::table({1.5, 1.0});
    const ValidationResult v2 = validate(p, c);
    CHECK(v2.ok());
    CHECK(v2.warnings.empty());

    // Formula schedules are checked over the horizon.
    c.max_iter = 10;
    c.schedule = RelaxationSchedule::formula([](int k) { return k < 5 ? 1.0 : 2.0; });
    CHECK_FALSE(validate(p, c).ok());
}

TEST_CASE("davis_yin_step: fixed points and the gradient-descent reduction") {
    // A = B = 0, T = 0: everything is a fixed point.
    const ThreeOperatorProblem pz =
        make_problem(zero_resolvent(2), zero_resolvent(2), zero_map(2));
    const StepResult s = davis_yin_step(pz, 1.7, 0.9, {0.3, -2});
    CHECK(s.x_next == Vector{0.3, -2});
    CHECK(s.u == Vector{0.3, -2});
    CHECK(s.v == Vector{0.3, -2});

    // A = B = 0: x_{k+1} = x_k - gamma lambda_k T(x_k).
    const ThreeOperatorProblem p = scalar_problem();
    CHECK(davis_yin_step(p, 0.5, 1.0, {1.0}).x_next == Vector{0.5});
    CHECK(davis_yin_step(p, 0.5, 0.5, {1.0}).x_next == Vector{0.75});
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const double x = rng.uniform(-5, 5), g = rng.uniform(0.1, 3.9), l = rng.uniform(0.05, 1.0);
        CHECK(davis_yin_step(p, g, l, {x}).x_next[0] ==
              doctest::Approx(x - g * l * x).epsilon(1e-15));
    }
}

TEST_CASE("davis_yin_step matches the hand-coded two-ball specialization") {
    const TwoBallProblem tb = build_two_ball();
    const Ball &A = tb.spec.a, &B = tb.spec.b;
    Rng rng(42);
    for (int i = 0; i < 100; ++i) {
        const Vector x = rng.uniform_vector(2, -5, 5);
        const double gamma = rng.uniform(0.1, 3.9);
        const double lambda = rng.uniform(0.05, 2.0 - gamma / 2.0);
        // x+ = x - lambda PA(x) + lambda PB((2 - gamma) PA(x) - x)
        const Vector pa = project_ball(A.center, A.radius, x);
        Vector arg(2);
        for (int j = 0; j < 2; ++j) arg[j] = (2.0 - gamma) * pa[j] - x[j];
        const Vector pb = project_ball(B.center, B.radius, arg);
        Vector expected(2);
        for (int j = 0; j < 2; ++j) expected[j] = x[j] - lambda * pa[j] + lambda * pb[j];

        const StepResult s = davis_yin_step(tb.problem, gamma, lambda, x);
        CHECK(max_abs_diff(s.x_next, expected) < 1e-14);
    }
}

TEST_CASE("dy_operator_apply: non-averagedness for gamma > 2 beta") {
    const ThreeOperatorProblem p = scalar_problem();
    CHECK(dy_operator_apply(p, 3.0, {1.0}) == Vector{-2.0});
    CHECK(dy_operator_apply(p, 3.0, {-1.0}) == Vector{2.0});
    const double spread =
        std::abs(dy_operator_apply(p, 3.0, {1.0})[0] - dy_operator_apply(p, 3.0, {-1.0})[0]);
    CHECK(spread == 4.0);
    CHECK(spread > 2.0); // |1 - (-1)|: the map expands, so it is not averaged

    CHECK(dy_operator_apply(p, 1.0, {5.0}) == Vector{0.0});   // (1 - gamma) Id at gamma = 1
    CHECK(dy_operator_apply(p, 0.25, {0.0}) == Vector{0.0});  // fixed point stays

    // Agreement with a lambda = 1 step on a nontrivial problem.
    const TwoBallProblem tb = build_two_ball();
    const Vector x{0.4, 1.2};
    CHECK(dy_operator_apply(tb.problem, 0.8, x) ==
          davis_yin_step(tb.problem, 0.8, 1.0, x).x_next);
}

TEST_CASE("solve: two-ball shadow limit hits the minimum-norm point") {
    const TwoBallProblem tb = build_two_ball();

    // Reference cross-checks: closed form (projection of the origin onto
    // ball A lands inside ball B) and the grid oracle.
    const Vector closed_form = project_ball(tb.spec.a.center, tb.spec.a.radius, {0, 0});
    CHECK(distance(closed_form, tb.spec.b.center) <= tb.spec.b.radius);
    CHECK(distance(tb.min_norm_point, closed_form) < 1e-12);
    auto half_norm2 = [](const Vector& x) { return 0.5 * norm_squared(x); };
    const Vector oracle = oracle_minimize_2d(half_norm2, tb.region, {-4, -4}, {4, 4}, 1e-9);
    CHECK(distance(oracle, tb.min_norm_point) < 1e-6);

    SolverConfig c;
    c.gamma = 1.0;
    c.schedule = RelaxationSchedule::constant(0.99 * 1.5);
    c.max_iter = 100000;
    c.reference = ShadowTarget{tb.min_norm_point, 1e-10};
    const SolveResult r = solve(tb.problem, c, {2.0, 2.0});
    CHECK(r.reason == TerminationReason::ShadowConverged);
    CHECK(distance(r.solution, tb.min_norm_point) < 1e-8);

    // The returned pair is consistent: solution = J_{gamma A}(fixed_point).
    CHECK(r.solution == tb.problem.A(c.gamma, r.fixed_point));
}

TEST_CASE("solve: scalar contraction and saturation as a value") {
    const ThreeOperatorProblem p = scalar_problem();
    SolverConfig c;
    c.gamma = 3.5;
    c.schedule = RelaxationSchedule::constant(0.2);
    c.max_iter = 2000;
    c.tol_residual = 1e-14;
    const SolveResult r = solve(p, c, {1.0});
    CHECK(r.converged());
    CHECK(std::abs(r.solution[0]) < 1e-12);

    c.max_iter = 3;
    const SolveResult sat = solve(p, c, {1.0});
    CHECK_FALSE(sat.converged());
    CHECK(sat.reason == TerminationReason::MaxIterReached);
    CHECK(sat.iterations == 3);
    CHECK(sat.trace.size() == 3);

    SolverConfig bad = c;
    bad.gamma = 4.0;
    CHECK_THROWS_AS(solve(p, bad, {1.0}), std::invalid_argument);
}

TEST_CASE("trace invariants along catalog runs") {
    const TwoBallProblem tb = build_two_ball();
    for (double gamma : {0.5, 2.0, 3.5}) {
        SolverConfig c;
        c.gamma = gamma;
        c.schedule = RelaxationSchedule::constant(0.5 * relaxation_bound(gamma, tb.problem.beta));
        c.max_iter = 50000;
        c.tol_residual = 1e-12;
        const SolveResult r = solve(tb.problem, c, {2.0, 2.0});
        REQUIRE(r.converged());

        // |w_k| nonincreasing.
        for (std::size_t k = 0; k + 1 < r.trace.size(); ++k)
            CHECK(r.trace.residual[k + 1] <= r.trace.residual[k] + 1e-12);

        // Fejer monotone with respect to the final fixed-point estimate.
        CHECK(fejer_report(r.trace, r.fixed_point).pass);

        // Consecutive-iterate inequality:
        // <x_{k+1}-x_k, w_k-w_{k+1}> - |w_k-w_{k+1}|^2
        //   - gamma <T(u_{k+1})-T(u_k), v_{k+1}-v_k> >= 0.
        for (std::size_t k = 0; k + 1 < r.trace.size(); ++k) {
            const Vector wk = subtract(r.trace.v[k], r.trace.u[k]);
            const Vector wk1 = subtract(r.trace.v[k + 1], r.trace.u[k + 1]);
            const Vector dx = subtract(r.trace.x[k + 1], r.trace.x[k]);
            const Vector dw = subtract(wk, wk1);
            const Vector dT = subtract(tb.problem.T(r.trace.u[k + 1]), tb.problem.T(r.trace.u[k]));
            const Vector dv = subtract(r.trace.v[k + 1], r.trace.v[k]);
            const double lhs = dot(dx, dw) - norm_squared(dw) - gamma * dot(dT, dv);
            CHECK(lhs >= -1e-10);
        }

        // Residual-zero characterization at the returned point.
        CHECK(r.final_residual <= c.tol_residual);
        const Vector u = tb.problem.A(gamma, r.fixed_point);
        const Vector tu = tb.problem.T(u);
        Vector arg(2);
        for (int j = 0; j < 2; ++j) arg[j] = 2.0 * u[j] - r.fixed_point[j] - gamma * tu[j];
        const Vector v = tb.problem.B(gamma, arg);
        CHECK(distance(u, v) <= c.tol_residual);
    }
}

TEST_CASE("shadow limits from distinct starts agree in T-value") {
    const TwoBallProblem tb = build_two_ball();
    SolverConfig c;
    c.gamma = 1.3;
    c.schedule = RelaxationSchedule::constant(1.0);
    c.max_iter = 200000;
    c.tol_residual = 1e-13;
    c.record_trace = false;
    Vector first;
    for (const Vector& x0 : {Vector{2, 2}, Vector{-3, -3}, Vector{5, 0}, Vector{0.7, 1.7}}) {
        const SolveResult r = solve(tb.problem, c, x0);
        REQUIRE(r.converged());
        const Vector t_val = tb.problem.T(r.solution);
        if (first.empty())
            first = t_val;
        else
            CHECK(distance(t_val, first) < 1e-6);
    }
}

TEST_CASE("forward_backward equals the generic engine with A = 0") {
    // Small LASSO: B = l1 subdifferential, T = least squares gradient.
    const int rows = 6, cols = 4;
    Rng rng(99);
    std::vector<double> Mdata(static_cast<std::size_t>(rows) * cols);
    for (auto& v : Mdata) v = rng.normal();
    Vector b(rows);
    for (auto& v : b) v = rng.normal();
    const double mu = 0.3;

    const LinearOperator M = dense_operator(rows, cols, Mdata);
    const ResolventOperator B = l1_subdifferential(cols, mu);
    const CocoerciveMap T = least_squares_map(M, b);

    SolverConfig c;
    c.gamma = 1.5 * T.beta;
    c.schedule = RelaxationSchedule::constant(1.0);
    c.max_iter = 50;
    c.tol_residual = 0.0;
    const ForwardBackwardResult fb = forward_backward(B, T, c, zeros(cols));
    const SolveResult generic = solve(make_problem(zero_resolvent(cols), B, T), c, zeros(cols));
    REQUIRE(fb.result.trace.size() == generic.trace.size());
    for (std::size_t k = 0; k < generic.trace.size(); ++k)
        CHECK(max_abs_diff(fb.result.trace.x[k], generic.trace.x[k]) <= 1e-15);

    // Driving it to convergence beats the coordinate-descent oracle objective.
    c.max_iter = 200000;
    c.tol_residual = 1e-14;
    const ForwardBackwardResult full = forward_backward(B, T, c, zeros(cols));
    REQUIRE(full.result.converged());
    const Vector cd = testing::coordinate_descent_lasso(rows, cols, Mdata, b, mu);
    const double f_fb = testing::lasso_objective(rows, cols, Mdata, b, mu, full.result.solution);
    const double f_cd = testing::lasso_objective(rows, cols, Mdata, b, mu, cd);
    CHECK(f_fb <= f_cd + 1e-8);

    // Dual value is T at the fixed point.
    CHECK(full.dual == T(full.result.fixed_point));
}

TEST_CASE("forward_backward reductions") {
    // B = 0: gradient descent.
    const CocoerciveMap T = identity_map(1);
    SolverConfig c;
    c.gamma = 0.5;
    c.schedule = RelaxationSchedule::constant(1.0);
    c.max_iter = 20;
    c.tol_residual = 0.0;
    const ForwardBackwardResult r = forward_backward(zero_resolvent(1), T, c, {1.0});
    double x = 1.0;
    for (std::size_t k = 0; k + 1 < r.result.trace.size(); ++k) {
        CHECK(r.result.trace.x[k][0] == doctest::Approx(x).epsilon(1e-15));
        x -= c.gamma * 1.0 * x;
    }

    // T = 0: proximal point iteration on B.
    const ResolventOperator Bball = ball_normal_cone({3, 0}, 1.0);
    SolverConfig cp;
    cp.gamma = 2.0;
    cp.schedule = RelaxationSchedule::constant(1.0);
    cp.max_iter = 10;
    cp.tol_residual = 0.0;
    const ForwardBackwardResult pp = forward_backward(Bball, zero_map(2), cp, {0, 0});
    // One proximal step from the origin lands on the ball boundary.
    CHECK(max_abs_diff(pp.result.trace.v[0], {2, 0}) < 1e-15);
}

TEST_CASE("douglas_rachford and backward_forward specializations") {
    const TwoBallProblem tb = build_two_ball();

    // DR on the two balls: the shadow limit is feasible.
    SolverConfig c;
    c.gamma = 1.0;
    c.schedule = RelaxationSchedule::constant(1.5);
    c.max_iter = 100000;
    c.tol_residual = 1e-12;
    const SolveResult dr = douglas_rachford(tb.problem.A, tb.problem.B, c, {2.0, 2.0});
    REQUIRE(dr.converged());
    CHECK(tb.region.contains(dr.solution, 1e-8));

    // Trajectory equals the generic engine with T = 0, bitwise.
    c.max_iter = 50;
    c.tol_residual = 0.0;
    const SolveResult dr2 = douglas_rachford(tb.problem.A, tb.problem.B, c, {2.0, 2.0});
    const SolveResult generic =
        solve(make_problem(tb.problem.A, tb.problem.B, zero_map(2)), c, {2.0, 2.0});
    REQUIRE(dr2.trace.size() == generic.trace.size());
    for (std::size_t k = 0; k < generic.trace.size(); ++k)
        CHECK(dr2.trace.x[k] == generic.trace.x[k]);

    // DR admits relaxation up to 2 and any positive gamma.
    SolverConfig wide;
    wide.gamma = 10.0;
    wide.schedule = RelaxationSchedule::constant(1.99);
    wide.max_iter = 10;
    CHECK_NOTHROW(douglas_rachford(tb.problem.A, tb.problem.B, wide, {2.0, 2.0}));

    // A = B: any feasible point has residual 0 immediately.
    SolverConfig same;
    same.gamma = 0.7;
    same.schedule = RelaxationSchedule::constant(1.0);
    same.max_iter = 10;
    same.tol_residual = 1e-15;
    const Vector inside = tb.spec.a.center;
    const SolveResult eq = douglas_rachford(tb.problem.A, tb.problem.A, same, inside);
    CHECK(eq.reason == TerminationReason::ResidualConverged);
    CHECK(eq.iterations == 1);

    // backward_forward with A = 0 equals gradient descent.
    SolverConfig g;
    g.gamma = 0.8;
    g.schedule = RelaxationSchedule::constant(0.9);
    g.max_iter = 30;
    g.tol_residual = 0.0;
    const SolveResult bf = backward_forward(zero_resolvent(1), identity_map(1), g, {2.0});
    const SolveResult gd =
        solve(make_problem(zero_resolvent(1), zero_resolvent(1), identity_map(1)), g, {2.0});
    for (std::size_t k = 0; k < gd.trace.size(); ++k)
        CHECK(bf.trace.x[k] == gd.trace.x[k]);
}

TEST_CASE("fejer_report") {
    const TwoBallProblem tb = build_two_ball();
    SolverConfig c;
    c.gamma = 2.5;
    c.schedule = RelaxationSchedule::constant(0.3);
    c.max_iter = 100000;
    c.tol_residual = 1e-12;
    const SolveResult r = solve(tb.problem, c, {-4.0, 3.0});
    REQUIRE(r.converged());
    CHECK(fejer_report(r.trace, r.fixed_point).pass);

    // Constant trace: margin exactly zero.
    Trace constant;
    constant.recorded = true;
    constant.x = {Vector{1, 1}, Vector{1, 1}, Vector{1, 1}};
    constant.residual = {0, 0, 0};
    const FejerReport rep = fejer_report(constant, {0, 0});
    CHECK(rep.pass);
    CHECK(rep.max_increase == 0.0);

    Trace empty;
    CHECK_THROWS_AS(fejer_report(empty, {0, 0}), std::invalid_argument);
}

TEST_CASE("trace CSV export") {
    const ThreeOperatorProblem p = scalar_problem();
    SolverConfig c;
    c.gamma = 1.0;
    c.schedule = RelaxationSchedule::constant(1.0);
    c.max_iter = 4;
    c.tol_residual = 0.0;
    const SolveResult r = solve(p, c, {1.0});
    std::ostringstream os;
    write_trace_csv(os, r.trace);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "k,residual,shadow_error");
    std::getline(is, line);
    CHECK(line == "0,1,"); // residual |v - u| = gamma |x0| = 1; no reference column

    // With a reference the shadow column is filled and round-trips at 17
    // significant digits.
    c.reference = ShadowTarget{{0.0}, 1e-30};
    const SolveResult r2 = solve(p, c, {1.0 / 3.0});
    std::ostringstream os2;
    write_trace_csv(os2, r2.trace);
    std::istringstream is2(os2.str());
    std::getline(is2, line);
    std::getline(is2, line);
    const auto comma = line.rfind(',');
    CHECK(std::stod(line.substr(comma + 1)) == r2.trace.shadow_error[0]);
}

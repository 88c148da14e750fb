#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opsplit/experiments.hpp"
#include "opsplit/rng.hpp"
#include "opsplit/strengthened.hpp"

using namespace opsplit;

namespace {

double max_abs_diff(const Vector& a, const Vector& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

StrengthenConfig make_config(double theta, double sa, double sb, double st, Vector q) {
    StrengthenConfig c;
    c.theta = theta;
    c.sigma_a = sa;
    c.sigma_b = sb;
    c.sigma_t = st;
    c.q = std::move(q);
    return c;
}

} // namespace

TEST_CASE("validate_strengthen") {
    // (theta, sA, sB, sT) = (1,0,0,1), beta = 1: mu = 1/2, gamma in ]0,2[.
    const StrengthenConfig c1 = make_config(1, 0, 0, 1, {0, 0});
    CHECK(strengthened_mu(c1, 1.0) == doctest::Approx(0.5));
    CHECK(validate_strengthen(c1, 1.0, 1.9).ok());
    CHECK_FALSE(validate_strengthen(c1, 1.0, 2.0).ok());

    // (2,0,1,1), beta = 1: mu = (2 + 1)^{-1} = 1/3, gamma in ]0, 4/3[.
    const StrengthenConfig c2 = make_config(2, 0, 1, 1, {0, 0});
    CHECK(strengthened_mu(c2, 1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(validate_strengthen(c2, 1.0, 1.3).ok());
    CHECK_FALSE(validate_strengthen(c2, 1.0, 4.0 / 3.0).ok());

    // All sigmas zero violates the base assumption.
    CHECK_FALSE(validate_strengthen(make_config(1, 0, 0, 0, {0, 0}), 1.0, 0.5).ok());

    // Negative sigma_T rejected outright.
    CHECK_FALSE(validate_strengthen(make_config(1, 0, 1, -0.5, {0, 0}), 1.0, 0.1).ok());

    // Negative sigma_A is admissible only when theta alpha_A compensates
    // and the scaled resolvent parameter stays positive.
    StrengthenConfig neg = make_config(1, -0.5, 1, 1, {0, 0});
    CHECK_FALSE(validate_strengthen(neg, 1.0, 0.4).ok()); // alpha_A = 0: componentwise check fails
    neg.alpha_a = 1.0;                                    // theta alpha_A + sigma_A = 0.5 > 0
    CHECK(validate_strengthen(neg, 1.0, 0.4).ok());
    CHECK_FALSE(validate_strengthen(neg, 1.0, 2.5).ok()); // 1 + gamma sigma_A <= 0
}

TEST_CASE("strengthened step with the Remark-style parameters equals the shifted plain step") {
    const HardSoftProblem hs = build_hard_soft();
    const double mu_tilde = 1.0;
    const StrengthenConfig c = make_config(1, 0, 0, 1.0 / mu_tilde, hs.q);
    const ThreeOperatorProblem shifted = shifted_problem(hs.problem, mu_tilde, hs.q);
    const double mu = strengthened_mu(c, hs.problem.beta);
    CHECK(shifted.beta == doctest::Approx(mu).epsilon(1e-15));

    Rng rng(5);
    Vector xs = hs.x0, xp = hs.x0;
    const double gamma = 1.5 * mu;
    const double lambda = 0.8;
    for (int k = 0; k < 200; ++k) {
        const StepResult a = strengthened_dy_step(hs.problem, c, gamma, lambda, xs);
        const StepResult b = davis_yin_step(shifted, gamma, lambda, xp);
        CHECK(max_abs_diff(a.u, b.u) <= 1e-13);
        CHECK(max_abs_diff(a.v, b.v) <= 1e-13);
        CHECK(max_abs_diff(a.x_next, b.x_next) <= 1e-13);
        xs = a.x_next;
        xp = b.x_next;
    }
}

TEST_CASE("strengthened step against an independent transcription on the hard-soft data") {
    const HardSoftProblem hs = build_hard_soft();
    const StrengthenConfig c = make_config(2, 0, 1, 1, hs.q);
    const double mu = strengthened_mu(c, hs.problem.beta); // 1/3
    const double gamma = 1.5 * mu;
    const double lambda = 0.99 * (2.0 - gamma / (2.0 * mu));
    const Vector x = hs.x0; // (0.7, 1.7)

    // Hand-rolled transcription, written independently of the library path.
    const Ball A = hs.spec.hard.a, B = hs.spec.hard.b, C = hs.spec.soft;
    const auto PA = [&](const Vector& y) { return project_ball(A.center, A.radius, y); };
    const auto PB = [&](const Vector& y) { return project_ball(B.center, B.radius, y); };
    const auto PC = [&](const Vector& y) { return project_ball(C.center, C.radius, y); };
    Vector ua(2), arg(2);
    for (int i = 0; i < 2; ++i) ua[i] = (x[i] + gamma * c.sigma_a * hs.q[i]) / (1 + gamma * c.sigma_a);
    const Vector u = PA(ua);
    Vector pc = PC(u);
    for (int i = 0; i < 2; ++i) {
        const double tu = (u[i] - pc[i]) / hs.rho;
        arg[i] = ((2 - gamma * c.sigma_t) * u[i] - x[i] - c.theta * gamma * tu +
                  gamma * (c.sigma_b + c.sigma_t) * hs.q[i]) /
                 (1 + gamma * c.sigma_b);
    }
    const Vector v = PB(arg);
    Vector x_next(2);
    for (int i = 0; i < 2; ++i) x_next[i] = x[i] + lambda * (v[i] - u[i]);

    const StepResult s = strengthened_dy_step(hs.problem, c, gamma, lambda, x);
    CHECK(max_abs_diff(s.u, u) <= 1e-14);
    CHECK(max_abs_diff(s.v, v) <= 1e-14);
    CHECK(max_abs_diff(s.x_next, x_next) <= 1e-14);
}

TEST_CASE("resolvent of the zero sum returns q") {
    // A = B = T = 0 with theta = 1, sigma_A = 1: u_k = (x_k + gamma q)/(1 + gamma).
    CocoerciveMap zero_t = zero_map(1);
    zero_t.beta = 1.0; // treat the zero map as 1-cocoercive so mu stays finite
    const ThreeOperatorProblem p =
        make_problem(zero_resolvent(1), zero_resolvent(1), std::move(zero_t));
    const StrengthenConfig c = make_config(1, 1, 0, 0, {3.0});
    const double gamma = 0.9;
    const StepResult s = strengthened_dy_step(p, c, gamma, 1.0, {0.0});
    CHECK(s.u[0] == doctest::Approx(gamma * 3.0 / (1 + gamma)).epsilon(1e-15));

    const ResolventResult r = resolvent_of_sum(p, c, gamma, RelaxationSchedule::constant(1.0),
                                               {0.0}, 1e-13);
    CHECK(r.details.converged());
    CHECK(std::abs(r.point[0] - 3.0) < 1e-10);
    CHECK(std::abs(r.details.fixed_point[0] - 3.0) < 1e-9); // fixed point x = q
}

TEST_CASE("resolvent of the identity sum is q/2") {
    // A = B = 0, T = Id, sigma = (0,0,1), theta = 1: parameter 1, J(q) = q/2.
    const ThreeOperatorProblem p =
        make_problem(zero_resolvent(1), zero_resolvent(1), identity_map(1));
    const StrengthenConfig c = make_config(1, 0, 0, 1, {2.0});
    const double mu = strengthened_mu(c, 1.0);
    const ResolventResult r = resolvent_of_sum(p, c, 1.2 * mu,
                                               RelaxationSchedule::constant(1.0), {0.0}, 1e-13);
    CHECK(r.served_parameter == doctest::Approx(1.0));
    CHECK(std::abs(r.point[0] - 1.0) < 1e-10);
}

TEST_CASE("resolvent_via_shift trivial cases") {
    // A = B = 0, T = 0, mu = 1, q = 3: zero of (Id - 3) is 3.
    const ThreeOperatorProblem p0 =
        make_problem(zero_resolvent(1), zero_resolvent(1), zero_map(1));
    const ResolventResult r0 = resolvent_via_shift(p0, 1.0, {3.0}, 1.0,
                                                   RelaxationSchedule::constant(1.0), {0.0}, 1e-13);
    CHECK(std::abs(r0.point[0] - 3.0) < 1e-10);

    // A = B = 0, T = Id, mu = 1, q = 2: zero of (Id - 2) + Id is 1 = J_{Id}(2).
    const ThreeOperatorProblem p1 =
        make_problem(zero_resolvent(1), zero_resolvent(1), identity_map(1));
    const ThreeOperatorProblem shifted = shifted_problem(p1, 1.0, {2.0});
    CHECK(shifted.beta == doctest::Approx(0.5));
    const ResolventResult r1 = resolvent_via_shift(p1, 1.0, {2.0}, 0.6,
                                                   RelaxationSchedule::constant(1.0), {0.0}, 1e-13);
    CHECK(std::abs(r1.point[0] - 1.0) < 1e-10);
}

TEST_CASE("hard-soft resolvent: reference value and cross-validation") {
    const HardSoftProblem hs = build_hard_soft();

    // Reference from the paper-scale study.
    CHECK(std::abs(hs.reference[0] - (-1.227559)) < 1e-5);
    CHECK(std::abs(hs.reference[1] - (-0.3452923)) < 1e-5);

    const StrengthenConfig streng = hard_soft_strengthened_config(hs);
    const double mu_s = strengthened_mu(streng, hs.problem.beta);
    const ResolventResult a =
        resolvent_of_sum(hs.problem, streng, 1.5 * mu_s,
                         RelaxationSchedule::constant(0.99 * (2.0 - 0.75)), hs.x0, 1e-11);
    REQUIRE(a.details.converged());
    CHECK(distance(a.point, hs.reference) < 1e-5);

    const double beta_shifted = 1.0 / (1.0 / hs.problem.beta + 1.0);
    const ResolventResult b =
        resolvent_via_shift(hs.problem, 1.0, hs.q, 1.5 * beta_shifted,
                            RelaxationSchedule::constant(0.99 * (2.0 - 0.75)), hs.x0, 1e-11);
    REQUIRE(b.details.converged());
    CHECK(distance(b.point, hs.reference) < 1e-5);

    CHECK(distance(a.point, b.point) < 1e-8);

    // Independent grid oracle agreement.
    const Vector o = oracle_minimize_2d(hs.objective, hs.region, {-4, -4}, {4, 4}, 1e-9);
    CHECK(distance(a.point, o) < 1e-6);
    CHECK(distance(b.point, o) < 1e-6);
}

TEST_CASE("hard-soft resolvent characterization through the normal cones") {
    const HardSoftProblem hs = build_hard_soft();
    const StrengthenConfig c = hard_soft_strengthened_config(hs);
    const double mu = strengthened_mu(c, hs.problem.beta);
    const ResolventResult r = resolvent_of_sum(
        hs.problem, c, 1.5 * mu, RelaxationSchedule::constant(0.99 * 1.25), hs.x0, 1e-12);
    REQUIRE(r.details.converged());
    const Vector& p = r.point;

    // q - p must equal served * (n_A + n_B + T(p)) with n_A, n_B in the
    // normal cones at p.  Here ball B is inactive at the solution, so its
    // normal component vanishes and the remainder must be a nonnegative
    // multiple of the outward normal of ball A.
    const Vector tp = hs.problem.T(p);
    Vector rem(2);
    for (int i = 0; i < 2; ++i) rem[i] = (hs.q[i] - p[i]) / r.served_parameter - tp[i];
    const Ball& A = hs.spec.hard.a;
    CHECK(std::abs(distance(p, A.center) - A.radius) < 1e-7); // A active
    CHECK(distance(p, hs.spec.hard.b.center) < hs.spec.hard.b.radius - 1e-3); // B inactive
    Vector n_out(2);
    for (int i = 0; i < 2; ++i) n_out[i] = (p[i] - A.center[i]) / A.radius;
    const double mu_a = dot(rem, n_out);
    CHECK(mu_a > 0.0);
    Vector resid(2);
    for (int i = 0; i < 2; ++i) resid[i] = rem[i] - mu_a * n_out[i];
    CHECK(norm(resid) < 1e-6);
}

TEST_CASE("equivalence of resolvent_of_sum and resolvent_via_shift iterate-by-iterate") {
    const HardSoftProblem hs = build_hard_soft();
    const double mu_tilde = 1.0;
    const StrengthenConfig c = make_config(1, 0, 0, 1.0 / mu_tilde, hs.q);
    const double mu = strengthened_mu(c, hs.problem.beta);
    const double gamma = 2.5 * mu;
    const double lambda = 0.5 * (2.0 - 2.5 / 2.0);

    SolverConfig solver;
    solver.gamma = gamma;
    solver.schedule = RelaxationSchedule::constant(lambda);
    solver.max_iter = 300;
    solver.tol_residual = 0.0;
    const SolveResult s1 = strengthened_solve(hs.problem, c, solver, hs.x0);
    const SolveResult s2 = solve(shifted_problem(hs.problem, mu_tilde, hs.q), solver, hs.x0);
    REQUIRE(s1.trace.size() == s2.trace.size());
    for (std::size_t k = 0; k < s1.trace.size(); ++k) {
        CHECK(max_abs_diff(s1.trace.x[k], s2.trace.x[k]) <= 1e-13);
        CHECK(max_abs_diff(s1.trace.u[k], s2.trace.u[k]) <= 1e-13);
    }
}

TEST_CASE("strong convergence with relaxation at the bound") {
    // theta alpha_B + sigma_B = 1 > 0, so the u-sequence still converges
    // with lambda fixed at 2 - gamma/(2 mu).
    const HardSoftProblem hs = build_hard_soft();
    const StrengthenConfig c = hard_soft_strengthened_config(hs);
    const double mu = strengthened_mu(c, hs.problem.beta);
    const double gamma = 1.5 * mu;
    const double bound = 2.0 - gamma / (2.0 * mu);
    SolverConfig solver;
    solver.gamma = gamma;
    solver.schedule = RelaxationSchedule::constant(bound);
    solver.max_iter = 100000;
    solver.tol_residual = 0.0;
    solver.reference = ShadowTarget{hs.reference, 1e-9};
    solver.record_trace = false;
    const SolveResult r = strengthened_solve(hs.problem, c, solver, hs.x0);
    CHECK(r.reason == TerminationReason::ShadowConverged);
}

TEST_CASE("scale consistency: halving sigma and theta leaves the resolvent unchanged") {
    const HardSoftProblem hs = build_hard_soft();
    const StrengthenConfig full = hard_soft_strengthened_config(hs);
    StrengthenConfig half = full;
    half.theta *= 0.5;
    half.sigma_a *= 0.5;
    half.sigma_b *= 0.5;
    half.sigma_t *= 0.5;
    CHECK(full.served_parameter() == doctest::Approx(half.served_parameter()));

    const double gamma = 1.5 * strengthened_mu(full, hs.problem.beta);
    // The same gamma remains valid for the halved triple since mu doubles.
    const ResolventResult a = resolvent_of_sum(hs.problem, full, gamma,
                                               RelaxationSchedule::constant(0.9), hs.x0, 1e-11);
    const ResolventResult b = resolvent_of_sum(hs.problem, half, gamma,
                                               RelaxationSchedule::constant(0.9), hs.x0, 1e-11);
    REQUIRE(a.details.converged());
    REQUIRE(b.details.converged());
    CHECK(distance(a.point, b.point) < 1e-8);
}

TEST_CASE("strengthened runs keep the residual monotone and Fejer properties") {
    const HardSoftProblem hs = build_hard_soft();
    for (const StrengthenConfig& c :
         {hard_soft_davis_yin_config(hs), hard_soft_strengthened_config(hs)}) {
        const double mu = strengthened_mu(c, hs.problem.beta);
        SolverConfig solver;
        solver.gamma = 2.2 * mu;
        solver.schedule = RelaxationSchedule::constant(0.5 * (2.0 - 1.1));
        solver.max_iter = 100000;
        solver.tol_residual = 1e-12;
        const SolveResult r = strengthened_solve(hs.problem, c, solver, hs.x0);
        REQUIRE(r.converged());
        for (std::size_t k = 0; k + 1 < r.trace.size(); ++k)
            CHECK(r.trace.residual[k + 1] <= r.trace.residual[k] + 1e-12);
        CHECK(fejer_report(r.trace, r.fixed_point).pass);
    }
}

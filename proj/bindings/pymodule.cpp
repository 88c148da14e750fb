// Python bindings for the main operations: projections and proximity
// operators, power iteration, the splitting solver on the bundled
// experiments, resolvent-of-sum computations and the Haar transform.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "opsplit/experiments.hpp"

namespace py = pybind11;
using namespace opsplit;

namespace {

py::dict solve_summary(const SolveResult& r) {
    py::dict d;
    d["solution"] = r.solution;
    d["fixed_point"] = r.fixed_point;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged();
    d["reason"] = to_string(r.reason);
    d["final_residual"] = r.final_residual;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Three-operator splitting toolkit";

    m.def("project_ball", &project_ball, py::arg("center"), py::arg("radius"), py::arg("x"));
    m.def("project_box", &project_box, py::arg("lo"), py::arg("hi"), py::arg("x"));
    m.def("soft_threshold", &soft_threshold, py::arg("t"), py::arg("x"));

    m.def(
        "power_iteration",
        [](int rows, int cols, std::vector<double> row_major, double tol, int max_iter,
           std::uint64_t seed) {
            return power_iteration(dense_operator(rows, cols, std::move(row_major)), tol,
                                   max_iter, seed);
        },
        py::arg("rows"), py::arg("cols"), py::arg("row_major"), py::arg("tol") = 1e-10,
        py::arg("max_iter") = 100000, py::arg("seed") = 0,
        "Largest eigenvalue of M^T M for a dense row-major matrix");

    m.def(
        "haar2d_forward",
        [](const Vector& img, int width, int height, int stages) {
            return haar2d_forward(img, width, height, stages);
        },
        py::arg("image"), py::arg("width"), py::arg("height"), py::arg("stages") = 3);
    m.def(
        "haar2d_inverse",
        [](const Vector& co, int width, int height, int stages) {
            return haar2d_inverse(co, width, height, stages);
        },
        py::arg("coeffs"), py::arg("width"), py::arg("height"), py::arg("stages") = 3);

    m.def(
        "solve_two_ball",
        [](double gamma, double lambda, Vector x0, double shadow_tol, int max_iter) {
            TwoBallProblem p = build_two_ball();
            SolverConfig config;
            config.gamma = gamma;
            config.schedule = RelaxationSchedule::constant(lambda);
            config.max_iter = max_iter;
            config.reference = ShadowTarget{p.min_norm_point, shadow_tol};
            SolveResult r = solve(p.problem, config, x0);
            py::dict d = solve_summary(r);
            d["reference"] = p.min_norm_point;
            return d;
        },
        py::arg("gamma") = 1.0, py::arg("lambda") = 1.485, py::arg("x0") = Vector{2.0, 2.0},
        py::arg("shadow_tol") = 1e-8, py::arg("max_iter") = 100000,
        "Minimum-norm point in the intersection of the two bundled balls");

    m.def(
        "hard_soft_resolvent",
        [](const std::string& method, double rho, double gamma_norm, double lambda_frac,
           double tol, int max_iter) {
            HardSoftSpec spec;
            spec.rho = rho;
            HardSoftProblem p = build_hard_soft(spec);
            ResolventResult r;
            if (method == "shift") {
                const double beta_shifted = 1.0 / (1.0 / p.problem.beta + 1.0);
                const double gamma = gamma_norm * beta_shifted;
                r = resolvent_via_shift(
                    p.problem, 1.0, p.q, gamma,
                    RelaxationSchedule::constant(lambda_frac * relaxation_bound(gamma, beta_shifted)),
                    p.x0, tol, max_iter);
            } else if (method == "strengthened") {
                StrengthenConfig c = hard_soft_strengthened_config(p);
                const double mu = strengthened_mu(c, p.problem.beta);
                const double gamma = gamma_norm * mu;
                r = resolvent_of_sum(
                    p.problem, c, gamma,
                    RelaxationSchedule::constant(lambda_frac * relaxation_bound(gamma, mu)), p.x0,
                    tol, max_iter);
            } else {
                throw std::invalid_argument("method must be 'strengthened' or 'shift'");
            }
            py::dict d;
            d["point"] = r.point;
            d["served_parameter"] = r.served_parameter;
            d["iterations"] = r.details.iterations;
            d["converged"] = r.details.converged();
            d["reference"] = p.reference;
            return d;
        },
        py::arg("method") = "strengthened", py::arg("rho") = 1.0, py::arg("gamma_norm") = 1.5,
        py::arg("lambda_frac") = 0.99, py::arg("tol") = 1e-10, py::arg("max_iter") = 100000,
        "Resolvent of the hard-soft operator sum at the bundled query point");

    m.def(
        "oracle_minimize_2d",
        [](const std::function<double(const Vector&)>& objective,
           const std::vector<std::pair<Vector, double>>& balls, Vector box_lo, Vector box_hi,
           double tol) {
            ConvexRegion region;
            for (const auto& [c, r] : balls) region.balls.push_back(Ball{c, r});
            return oracle_minimize_2d(objective, region, box_lo, box_hi, tol);
        },
        py::arg("objective"), py::arg("balls"), py::arg("box_lo"), py::arg("box_hi"),
        py::arg("tol") = 1e-9,
        "Nested-grid minimizer over an intersection of balls");

    m.def(
        "deblur_objective",
        [](int width, int height, double gamma, double lambda, int iters, double noise_std,
           std::uint64_t seed, double reg_weight) {
            ImageProblemSpec spec;
            spec.width = width;
            spec.height = height;
            spec.noise_std = noise_std;
            spec.seed = seed;
            spec.reg_weight = reg_weight;
            DeblurProblem p = build_deblur(spec, synthetic_test_image(width, height));
            SolverConfig config;
            config.gamma = gamma;
            config.schedule = RelaxationSchedule::constant(lambda);
            config.max_iter = iters + 1;
            config.tol_residual = 0.0;
            config.record_trace = false;
            SolveResult r = solve(p.problem, config, p.x0);
            return p.objective(r.solution);
        },
        py::arg("width") = 32, py::arg("height") = 32, py::arg("gamma") = 1.98,
        py::arg("lambda") = 0.99, py::arg("iters") = 200, py::arg("noise_std") = 1e-3,
        py::arg("seed") = 2023, py::arg("reg_weight") = 2e-5,
        "Objective value after a fixed number of iterations on the synthetic deblur problem");

    m.attr("__version__") = "0.1.0";
}

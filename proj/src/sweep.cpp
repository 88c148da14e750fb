#include "opsplit/experiments.hpp"

#include <atomic>
#include <fstream>
#include <ostream>
#include <thread>

#include "opsplit/csv.hpp"

namespace opsplit {

const SweepCell& SweepResult::cell(int gi, int li) const {
    return cells[static_cast<std::size_t>(gi) * grid.lambda_axis.count + li];
}

std::vector<std::pair<int, int>> SweepResult::argmin_iterations() const {
    std::vector<std::pair<int, int>> out;
    int best = std::numeric_limits<int>::max();
    for (int gi = 0; gi < grid.gamma_axis.count; ++gi) {
        for (int li = 0; li < grid.lambda_axis.count; ++li) {
            const SweepCell& c = cell(gi, li);
            if (c.status != CellStatus::Converged) continue;
            if (c.iterations < best) {
                best = c.iterations;
                out.clear();
            }
            if (c.iterations == best) out.emplace_back(gi, li);
        }
    }
    return out;
}

std::vector<std::pair<int, int>> SweepResult::argmin_objective() const {
    std::vector<std::pair<int, int>> out;
    double best = std::numeric_limits<double>::infinity();
    for (int gi = 0; gi < grid.gamma_axis.count; ++gi) {
        for (int li = 0; li < grid.lambda_axis.count; ++li) {
            const SweepCell& c = cell(gi, li);
            if (c.status != CellStatus::Evaluated) continue;
            if (c.objective < best) {
                best = c.objective;
                out.clear();
                out.emplace_back(gi, li);
            } else if (c.objective == best) {
                out.emplace_back(gi, li);
            }
        }
    }
    return out;
}

SweepResult grid_sweep(const CellRunner& runner, const GridSpec& grid, int workers) {
    if (grid.gamma_axis.count <= 0 || grid.lambda_axis.count <= 0)
        throw std::invalid_argument("grid_sweep: empty grid");
    SweepResult result;
    result.grid = grid;
    const std::size_t total =
        static_cast<std::size_t>(grid.gamma_axis.count) * grid.lambda_axis.count;
    result.cells.assign(total, SweepCell{});

    auto run_cell = [&](std::size_t idx) {
        const int gi = static_cast<int>(idx) / grid.lambda_axis.count;
        const int li = static_cast<int>(idx) % grid.lambda_axis.count;
        const double g = grid.gamma_axis.at(gi);
        const double lam = grid.lambda_axis.at(li);
        // Feasible relaxation range in normalized units: lambda <= 2 - g/2,
        // with equality allowed.  The 1e-12 slack only absorbs the binary
        // rounding of decimal grid values at exact-boundary cells.
        if (!(g > 0.0) || !(g < 4.0) || !(lam > 0.0) || lam > 2.0 - g / 2.0 + 1e-12) {
            result.cells[idx] = SweepCell{CellStatus::Infeasible, 0, 0.0};
            return;
        }
        result.cells[idx] = runner(g, lam);
    };

    if (workers <= 1) {
        for (std::size_t idx = 0; idx < total; ++idx) run_cell(idx);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    const std::size_t idx = next.fetch_add(1);
                    if (idx >= total) return;
                    run_cell(idx);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    return result;
}

CellRunner hard_soft_cell_runner(const HardSoftProblem& problem, const StrengthenConfig& config,
                                 const GridSpec& grid) {
    const double mu = strengthened_mu(config, problem.problem.beta);
    return [problem, config, grid, mu](double gamma_norm, double lambda) {
        SolverConfig solver;
        solver.gamma = gamma_norm * mu;
        // Guard against one-ulp overshoot of the bound after the
        // normalized-units feasibility test.
        solver.schedule = RelaxationSchedule::constant(
            std::min(lambda, relaxation_bound(solver.gamma, mu)));
        solver.max_iter = grid.max_iter;
        solver.tol_residual = 0.0;
        solver.reference = ShadowTarget{problem.reference, grid.shadow_tol};
        solver.record_trace = false;
        const SolveResult r = strengthened_solve(problem.problem, config, solver, problem.x0);
        SweepCell cell;
        cell.iterations = r.iterations;
        cell.status = r.converged() ? CellStatus::Converged : CellStatus::Saturated;
        return cell;
    };
}

CellRunner deblur_cell_runner(const DeblurProblem& problem, int iters, bool with_box_constraint) {
    ThreeOperatorProblem p = problem.problem;
    if (!with_box_constraint) p = make_problem(zero_resolvent(p.dim), p.B, p.T);
    return [p, problem, iters](double gamma_norm, double lambda) {
        SolverConfig solver;
        solver.gamma = gamma_norm * p.beta;
        solver.schedule =
            RelaxationSchedule::constant(std::min(lambda, relaxation_bound(solver.gamma, p.beta)));
        // `iters` updates of x; the final evaluation supplies the shadow point.
        solver.max_iter = iters + 1;
        solver.tol_residual = 0.0;
        solver.record_trace = false;
        const SolveResult r = solve(p, solver, problem.x0);
        SweepCell cell;
        cell.status = CellStatus::Evaluated;
        cell.iterations = iters;
        cell.objective = problem.objective(r.solution);
        return cell;
    };
}

namespace {

const char* status_name(CellStatus s) {
    switch (s) {
        case CellStatus::Converged: return "converged";
        case CellStatus::Saturated: return "saturated";
        case CellStatus::Infeasible: return "infeasible";
        case CellStatus::Evaluated: return "evaluated";
    }
    return "unknown";
}

} // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "gamma_norm,lambda,status,iterations,objective\n";
    for (int gi = 0; gi < result.grid.gamma_axis.count; ++gi) {
        for (int li = 0; li < result.grid.lambda_axis.count; ++li) {
            const SweepCell& c = result.cell(gi, li);
            os << format_double(result.grid.gamma_axis.at(gi)) << ','
               << format_double(result.grid.lambda_axis.at(li)) << ',' << status_name(c.status)
               << ',';
            if (c.status == CellStatus::Converged || c.status == CellStatus::Saturated ||
                c.status == CellStatus::Evaluated)
                os << c.iterations;
            os << ',';
            if (c.status == CellStatus::Evaluated) os << format_double(c.objective);
            os << '\n';
        }
    }
}

void write_sweep_csv_file(const std::string& path, const SweepResult& result) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_sweep_csv_file: cannot open " + path);
    write_sweep_csv(os, result);
}

} // namespace opsplit

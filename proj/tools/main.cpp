// Command-line surface: solve | resolvent | sweep | deblur.
//
// Every command accepts --config <file.json>; explicit flags override
// config-file values, unknown config keys are rejected.  All outputs are
// deterministic given the seeds, including parallel sweeps.
//
// Exit codes: 0 success/convergence, 1 configuration error, 2 iteration
// budget exhausted without meeting the tolerance.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "opsplit/csv.hpp"
#include "opsplit/experiments.hpp"

using json = nlohmann::json;
using namespace opsplit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitSaturated = 2;

std::string resolve_output(const std::string& path) {
    if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
    const char* outdir = std::getenv("OPSPLIT_OUTDIR");
    if (outdir == nullptr || *outdir == '\0') return path;
    return (std::filesystem::path(outdir) / path).string();
}

Vector parse_vector(const std::string& text) {
    Vector v;
    std::string cell;
    std::stringstream ss(text);
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.empty()) throw std::invalid_argument("empty vector literal");
    return v;
}

std::string vector_to_string(const Vector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s + ")";
}

// Applies config-file values to CLI11 options that were not passed
// explicitly; rejects keys that do not correspond to an option.
void apply_config(CLI::App* cmd, const std::string& config_path) {
    std::ifstream is(config_path);
    if (!is) throw std::invalid_argument("cannot open config file " + config_path);
    json doc = json::parse(is, nullptr, true, true);
    if (!doc.is_object()) throw std::invalid_argument("config root must be an object");
    for (const auto& [key, value] : doc.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw std::invalid_argument("unknown config key '" + key + "'");
        if (opt->count() > 0) continue; // explicit flag wins
        std::string text;
        if (value.is_string())
            text = value.get<std::string>();
        else if (value.is_boolean())
            text = value.get<bool>() ? "true" : "false";
        else
            text = value.dump();
        opt->add_result(text);
        opt->run_callback();
    }
}

int report_solve(const SolveResult& r, const std::string& trace_path) {
    std::cout << "status: " << to_string(r.reason) << "\n"
              << "iterations: " << r.iterations << "\n"
              << "final_residual: " << format_double(r.final_residual) << "\n";
    if (r.final_shadow_error)
        std::cout << "final_shadow_error: " << format_double(*r.final_shadow_error) << "\n";
    if (r.solution.size() <= 8)
        std::cout << "solution: " << vector_to_string(r.solution) << "\n";
    if (!trace_path.empty()) {
        write_trace_csv_file(resolve_output(trace_path), r.trace);
        std::cout << "trace: " << resolve_output(trace_path) << "\n";
    }
    return r.converged() ? kExitOk : kExitSaturated;
}

// ---- solve ------------------------------------------------------------------

struct SolveArgs {
    std::string config;
    std::string experiment = "two-ball";
    double gamma = 1.0;
    double lambda = 1.0;
    std::string x0_text;
    int max_iter = 100000;
    double tol_residual = 1e-10;
    double shadow_tol = 1e-8;
    bool no_reference = false;
    double rho = 1.0;
    std::string trace_path;
};

int cmd_solve(CLI::App* cmd, SolveArgs& a) {
    if (!a.config.empty()) apply_config(cmd, a.config);

    ThreeOperatorProblem problem;
    Vector reference;
    Vector x0;
    if (a.experiment == "two-ball") {
        TwoBallProblem p = build_two_ball();
        problem = p.problem;
        reference = p.min_norm_point;
        x0 = {2.0, 2.0};
    } else if (a.experiment == "hard-soft") {
        HardSoftSpec spec;
        spec.rho = a.rho;
        HardSoftProblem p = build_hard_soft(spec);
        // Plain splitting on the shifted map serves the resolvent at q.
        problem = shifted_problem(p.problem, 1.0, p.q);
        reference = p.reference;
        x0 = p.x0;
    } else {
        throw std::invalid_argument("unknown experiment '" + a.experiment + "'");
    }
    if (!a.x0_text.empty()) {
        x0 = parse_vector(a.x0_text);
        if (static_cast<int>(x0.size()) != problem.dim)
            throw std::invalid_argument("x0 dimension mismatch");
    }

    SolverConfig config;
    config.gamma = a.gamma;
    config.schedule = RelaxationSchedule::constant(a.lambda);
    config.max_iter = a.max_iter;
    config.tol_residual = a.tol_residual;
    if (!a.no_reference) config.reference = ShadowTarget{reference, a.shadow_tol};
    config.record_trace = true;

    const ValidationResult v = validate(problem, config);
    for (const auto& w : v.warnings) std::cerr << "warning: " << w.message << "\n";
    if (!v.ok()) {
        std::cerr << v.summary();
        return kExitConfigError;
    }
    return report_solve(solve(problem, config, x0), a.trace_path);
}

// ---- resolvent ---------------------------------------------------------------

struct ResolventArgs {
    std::string config;
    std::string method = "strengthened";
    double theta = 2.0;
    double sigma_a = 0.0;
    double sigma_b = 1.0;
    double sigma_t = 1.0;
    double mu = 1.0; // shift method resolvent parameter
    std::string q_text;
    double rho = 1.0;
    double gamma_norm = 1.5;
    double lambda_frac = 0.99;
    int max_iter = 100000;
    double tol = 1e-10;
    bool cross_check = false;
    std::string x0_text;
};

int cmd_resolvent(CLI::App* cmd, ResolventArgs& a) {
    if (!a.config.empty()) apply_config(cmd, a.config);

    HardSoftSpec spec;
    spec.rho = a.rho;
    if (!a.q_text.empty()) spec.q = parse_vector(a.q_text);
    HardSoftProblem p = build_hard_soft(spec);
    Vector x0 = a.x0_text.empty() ? p.x0 : parse_vector(a.x0_text);

    auto run_strengthened_method = [&]() {
        StrengthenConfig c;
        c.theta = a.theta;
        c.sigma_a = a.sigma_a;
        c.sigma_b = a.sigma_b;
        c.sigma_t = a.sigma_t;
        c.q = p.q;
        const double mu = strengthened_mu(c, p.problem.beta);
        const double gamma = a.gamma_norm * mu;
        const ValidationResult v = validate_strengthen(c, p.problem.beta, gamma);
        if (!v.ok()) throw std::invalid_argument(v.summary());
        const double lambda = a.lambda_frac * relaxation_bound(gamma, mu);
        return resolvent_of_sum(p.problem, c, gamma, RelaxationSchedule::constant(lambda), x0,
                                a.tol, a.max_iter);
    };
    auto run_shift_method = [&]() {
        const double beta_shifted = 1.0 / (1.0 / p.problem.beta + 1.0 / a.mu);
        const double gamma = a.gamma_norm * beta_shifted;
        const double lambda = a.lambda_frac * relaxation_bound(gamma, beta_shifted);
        return resolvent_via_shift(p.problem, a.mu, p.q, gamma,
                                   RelaxationSchedule::constant(lambda), x0, a.tol, a.max_iter);
    };

    if (a.method != "shift" && a.method != "strengthened")
        throw std::invalid_argument("unknown method '" + a.method + "'");
    ResolventResult primary = (a.method == "shift") ? run_shift_method() : run_strengthened_method();

    std::cout << "method: " << a.method << "\n"
              << "resolvent_parameter: " << format_double(primary.served_parameter) << "\n"
              << "point: " << vector_to_string(primary.point) << "\n"
              << "iterations: " << primary.details.iterations << "\n";
    if (a.cross_check) {
        ResolventResult other = (a.method == "shift") ? run_strengthened_method() : run_shift_method();
        std::cout << "cross_check_point: " << vector_to_string(other.point) << "\n"
                  << "cross_check_delta: " << format_double(distance(primary.point, other.point))
                  << "\n";
    }
    return primary.details.converged() ? kExitOk : kExitSaturated;
}

// ---- sweep --------------------------------------------------------------------

struct SweepArgs {
    std::string config;
    std::string experiment = "hard-soft-dy";
    double gamma_start = 0.02, gamma_step = 0.04;
    int gamma_count = 99;
    double lambda_start = 0.03, lambda_step = 0.04;
    int lambda_count = 50;
    int max_iter = 50000;
    double shadow_tol = 1e-8;
    int iters = 200; // deblur sweeps
    int width = 32, height = 32;
    double noise_std = 1e-3;
    std::uint64_t seed = 2023;
    double reg_weight = 2e-5;
    double rho = 1.0;
    int workers = 0;
    std::string output = "sweep.csv";
};

int cmd_sweep(CLI::App* cmd, SweepArgs& a) {
    if (!a.config.empty()) apply_config(cmd, a.config);

    GridSpec grid;
    grid.gamma_axis = {a.gamma_start, a.gamma_step, a.gamma_count};
    grid.lambda_axis = {a.lambda_start, a.lambda_step, a.lambda_count};
    grid.max_iter = a.max_iter;
    grid.shadow_tol = a.shadow_tol;
    const int workers =
        a.workers > 0 ? a.workers : static_cast<int>(std::thread::hardware_concurrency());

    SweepResult result;
    bool iteration_sweep = true;
    if (a.experiment == "hard-soft-dy" || a.experiment == "hard-soft-strengthened") {
        HardSoftSpec spec;
        spec.rho = a.rho;
        HardSoftProblem p = build_hard_soft(spec);
        const StrengthenConfig c = (a.experiment == "hard-soft-dy")
                                       ? hard_soft_davis_yin_config(p)
                                       : hard_soft_strengthened_config(p);
        result = grid_sweep(hard_soft_cell_runner(p, c, grid), grid, workers);
    } else if (a.experiment == "deblur" || a.experiment == "deblur-fb") {
        ImageProblemSpec spec;
        spec.width = a.width;
        spec.height = a.height;
        spec.noise_std = a.noise_std;
        spec.seed = a.seed;
        spec.reg_weight = a.reg_weight;
        DeblurProblem p = build_deblur(spec, synthetic_test_image(a.width, a.height));
        result = grid_sweep(deblur_cell_runner(p, a.iters, a.experiment == "deblur"), grid, workers);
        iteration_sweep = false;
    } else {
        throw std::invalid_argument("unknown experiment '" + a.experiment + "'");
    }

    const std::string out = resolve_output(a.output);
    write_sweep_csv_file(out, result);
    std::cout << "sweep: " << out << "\n";

    const auto argmin = iteration_sweep ? result.argmin_iterations() : result.argmin_objective();
    for (const auto& [gi, li] : argmin) {
        const SweepCell& c = result.cell(gi, li);
        std::cout << "argmin: gamma_norm=" << format_double(grid.gamma_axis.at(gi))
                  << " lambda=" << format_double(grid.lambda_axis.at(li));
        if (iteration_sweep)
            std::cout << " iterations=" << c.iterations << "\n";
        else
            std::cout << " objective=" << format_double(c.objective) << "\n";
    }
    if (argmin.empty()) {
        std::cerr << "no cell converged\n";
        return kExitSaturated;
    }
    return kExitOk;
}

// ---- deblur ---------------------------------------------------------------------

struct DeblurArgs {
    std::string config;
    double gamma = 1.98;
    double lambda = 0.99;
    int iters = 200;
    int width = 32, height = 32;
    double noise_std = 1e-3;
    std::uint64_t seed = 2023;
    double reg_weight = 2e-5;
    std::string input; // optional ground-truth PGM
    std::string outdir = ".";
};

int cmd_deblur(CLI::App* cmd, DeblurArgs& a) {
    if (!a.config.empty()) apply_config(cmd, a.config);

    Image truth;
    if (!a.input.empty()) {
        truth = read_pgm_file(a.input);
        a.width = truth.width;
        a.height = truth.height;
    } else {
        truth = synthetic_test_image(a.width, a.height);
    }
    ImageProblemSpec spec;
    spec.width = a.width;
    spec.height = a.height;
    spec.noise_std = a.noise_std;
    spec.seed = a.seed;
    spec.reg_weight = a.reg_weight;
    DeblurProblem p = build_deblur(spec, truth);

    SolverConfig config;
    config.gamma = a.gamma;
    config.schedule = RelaxationSchedule::constant(a.lambda);
    config.max_iter = a.iters + 1; // `iters` updates of x
    config.tol_residual = 0.0;
    config.record_trace = true;
    const ValidationResult v = validate(p.problem, config);
    if (!v.ok()) {
        std::cerr << v.summary();
        return kExitConfigError;
    }
    const SolveResult r = solve(p.problem, config, p.x0);

    const std::filesystem::path outdir = resolve_output(a.outdir);
    std::filesystem::create_directories(outdir);
    Image observed = make_image(a.width, a.height);
    observed.pixels = p.b;
    Image restored = make_image(a.width, a.height);
    restored.pixels = haar2d_inverse(r.solution, a.width, a.height, spec.wavelet_stages);
    write_pgm_file((outdir / "truth.pgm").string(), truth);
    write_pgm_file((outdir / "observed.pgm").string(), observed);
    write_pgm_file((outdir / "restored.pgm").string(), restored);
    {
        std::ofstream os(outdir / "restored.csv");
        write_image_csv(os, restored);
    }
    {
        std::ofstream os(outdir / "objective.csv");
        os << "k,objective\n";
        for (std::size_t k = 0; k < r.trace.u.size(); ++k)
            os << k << ',' << format_double(p.objective(r.trace.u[k])) << '\n';
    }
    std::cout << "objective: " << format_double(p.objective(r.solution)) << "\n"
              << "outputs: " << outdir.string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-operator splitting toolkit"};
    app.require_subcommand(1);

    SolveArgs sa;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Run the splitting iteration on an experiment");
    solve_cmd->add_option("--config", sa.config, "JSON config file");
    solve_cmd->add_option("--experiment", sa.experiment, "two-ball | hard-soft");
    solve_cmd->add_option("--gamma", sa.gamma, "stepsize");
    solve_cmd->add_option("--lambda", sa.lambda, "relaxation parameter");
    solve_cmd->add_option("--x0", sa.x0_text, "starting point, comma separated");
    solve_cmd->add_option("--max-iter", sa.max_iter, "iteration budget");
    solve_cmd->add_option("--tol-residual", sa.tol_residual, "residual stopping tolerance");
    solve_cmd->add_option("--shadow-tol", sa.shadow_tol, "shadow-error stopping tolerance");
    solve_cmd->add_flag("--no-reference", sa.no_reference, "disable the shadow stopping rule");
    solve_cmd->add_option("--rho", sa.rho, "hard-soft regularization parameter");
    solve_cmd->add_option("--trace", sa.trace_path, "write the trace CSV here");

    ResolventArgs ra;
    CLI::App* resolvent_cmd =
        app.add_subcommand("resolvent", "Compute the resolvent of the hard-soft operator sum");
    resolvent_cmd->add_option("--config", ra.config, "JSON config file");
    resolvent_cmd->add_option("--method", ra.method, "strengthened | shift");
    resolvent_cmd->add_option("--theta", ra.theta, "strengthening theta");
    resolvent_cmd->add_option("--sigma-a", ra.sigma_a, "sigma_A");
    resolvent_cmd->add_option("--sigma-b", ra.sigma_b, "sigma_B");
    resolvent_cmd->add_option("--sigma-t", ra.sigma_t, "sigma_T");
    resolvent_cmd->add_option("--mu", ra.mu, "shift method resolvent parameter");
    resolvent_cmd->add_option("--q", ra.q_text, "query point, comma separated");
    resolvent_cmd->add_option("--rho", ra.rho, "soft-constraint weight");
    resolvent_cmd->add_option("--gamma-norm", ra.gamma_norm, "stepsize as a fraction of mu");
    resolvent_cmd->add_option("--lambda-frac", ra.lambda_frac, "relaxation as a fraction of the bound");
    resolvent_cmd->add_option("--max-iter", ra.max_iter, "iteration budget");
    resolvent_cmd->add_option("--tol", ra.tol, "residual tolerance");
    resolvent_cmd->add_flag("--cross-check", ra.cross_check, "also run the other method and report the delta");
    resolvent_cmd->add_option("--x0", ra.x0_text, "starting point");

    SweepArgs wa;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a (gamma, lambda) grid sweep");
    sweep_cmd->add_option("--config", wa.config, "JSON config file");
    sweep_cmd->add_option("--experiment", wa.experiment,
                          "hard-soft-dy | hard-soft-strengthened | deblur | deblur-fb");
    sweep_cmd->add_option("--gamma-start", wa.gamma_start, "normalized stepsize axis start");
    sweep_cmd->add_option("--gamma-step", wa.gamma_step, "normalized stepsize axis step");
    sweep_cmd->add_option("--gamma-count", wa.gamma_count, "normalized stepsize axis count");
    sweep_cmd->add_option("--lambda-start", wa.lambda_start, "relaxation axis start");
    sweep_cmd->add_option("--lambda-step", wa.lambda_step, "relaxation axis step");
    sweep_cmd->add_option("--lambda-count", wa.lambda_count, "relaxation axis count");
    sweep_cmd->add_option("--max-iter", wa.max_iter, "per-cell iteration budget");
    sweep_cmd->add_option("--shadow-tol", wa.shadow_tol, "per-cell stopping tolerance");
    sweep_cmd->add_option("--iters", wa.iters, "fixed iteration count for deblur sweeps");
    sweep_cmd->add_option("--width", wa.width, "deblur image width");
    sweep_cmd->add_option("--height", wa.height, "deblur image height");
    sweep_cmd->add_option("--noise-std", wa.noise_std, "deblur noise standard deviation");
    sweep_cmd->add_option("--seed", wa.seed, "deblur noise seed");
    sweep_cmd->add_option("--reg-weight", wa.reg_weight, "deblur regularization weight");
    sweep_cmd->add_option("--rho", wa.rho, "hard-soft regularization parameter");
    sweep_cmd->add_option("--workers", wa.workers, "worker threads (0 = hardware)");
    sweep_cmd->add_option("-o,--output", wa.output, "sweep CSV path");

    DeblurArgs da;
    CLI::App* deblur_cmd = app.add_subcommand("deblur", "Deblur an image at a single (gamma, lambda)");
    deblur_cmd->add_option("--config", da.config, "JSON config file");
    deblur_cmd->add_option("--gamma", da.gamma, "stepsize");
    deblur_cmd->add_option("--lambda", da.lambda, "relaxation parameter");
    deblur_cmd->add_option("--iters", da.iters, "number of iterations");
    deblur_cmd->add_option("--width", da.width, "image width (synthetic truth)");
    deblur_cmd->add_option("--height", da.height, "image height (synthetic truth)");
    deblur_cmd->add_option("--noise-std", da.noise_std, "noise standard deviation");
    deblur_cmd->add_option("--seed", da.seed, "noise seed");
    deblur_cmd->add_option("--reg-weight", da.reg_weight, "regularization weight");
    deblur_cmd->add_option("--input", da.input, "ground-truth PGM (else synthetic)");
    deblur_cmd->add_option("--outdir", da.outdir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return cmd_solve(solve_cmd, sa);
        if (resolvent_cmd->parsed()) return cmd_resolvent(resolvent_cmd, ra);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_cmd, wa);
        if (deblur_cmd->parsed()) return cmd_deblur(deblur_cmd, da);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}

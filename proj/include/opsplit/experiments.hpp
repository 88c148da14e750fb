/* Experiment builders, the (gamma, lambda) grid-sweep harness and
 * brute-force oracles providing ground truth.
 *
 * Three desk-scale studies ship with the toolkit:
 *   - two-ball: minimum-norm point in the intersection of two balls
 *     (A, B normal cones, T = Id);
 *   - hard-soft: a feasibility problem with two hard ball constraints, a
 *     soft third ball and a proximity term; the target quantity is the
 *     resolvent of N_A + N_B + (1/rho)(Id - P_C) at a query point;
 *   - deblur: l1-regularized wavelet deblurring of a synthetic image with
 *     a [0,1] pixel box constraint.
 */
#pragma once

#include <functional>
#include <optional>

#include "opsplit/imaging.hpp"
#include "opsplit/operators.hpp"
#include "opsplit/splitting.hpp"
#include "opsplit/strengthened.hpp"
#include "opsplit/wavelet.hpp"

namespace opsplit {

// ---- convex regions in the plane -----------------------------------------

struct Ball {
    Vector center;
    double radius = 1.0;
};

/// Intersection of closed balls.  Projection is exact: either a single
/// ball's projection is feasible, or (in 2-D) the projection lies on a
/// pairwise boundary intersection.
struct ConvexRegion {
    std::vector<Ball> balls;

    bool contains(const Vector& x, double slack = 1e-12) const;
    Vector project(const Vector& x) const;
};

/// The two intersection points of a pair of circles in the plane (empty if
/// they do not meet).
std::vector<Vector> circle_intersections(const Ball& a, const Ball& b);

// ---- oracles ---------------------------------------------------------------

/// Deterministic nested-grid minimizer of a continuous objective over a
/// region inside a bounding box.  Every grid point is first projected onto
/// the region and the objective is evaluated at the projected point, which
/// keeps the search accurate for minimizers sitting on curved boundaries.
/// Grids of n x n points are refined around the incumbent until the
/// spacing drops below tol.  Practical accuracy on the shipped problems is
/// ~1e-8.
Vector oracle_minimize_2d(const std::function<double(const Vector&)>& objective,
                          const ConvexRegion& region, const Vector& box_lo,
                          const Vector& box_hi, double tol = 1e-9, int grid_points = 201);

/// Polishes a near-minimizer to machine precision using the gradient of
/// the smooth objective and the active-set structure of the region
/// (interior stationary point, one active circle, or a circle-circle
/// intersection point).  Verifies KKT conditions of the polished point and
/// throws if they fail.  Used to produce reference solutions for shadow
/// stopping rules.
Vector refine_minimizer_2d(const std::function<double(const Vector&)>& objective,
                           const std::function<Vector(const Vector&)>& gradient,
                           const ConvexRegion& region, const Vector& seed,
                           double active_tol = 1e-4);

// ---- experiment builders ---------------------------------------------------

struct TwoBallSpec {
    Ball a{{-1.6, -0.75}, 0.55};
    Ball b{{-0.35, 0.12}, 1.0};
};

struct TwoBallProblem {
    ThreeOperatorProblem problem; // A = N_ball_a, B = N_ball_b, T = Id (beta = 1)
    ConvexRegion region;
    Vector min_norm_point; // refined reference solution
    TwoBallSpec spec;
};

TwoBallProblem build_two_ball(const TwoBallSpec& spec = {});

struct HardSoftSpec {
    TwoBallSpec hard;
    Ball soft{{1.0, -1.0}, 0.5};
    Vector q{-1.75, 1.5};
    double rho = 1.0;
    Vector x0{0.7, 1.7};
};

struct HardSoftProblem {
    ThreeOperatorProblem problem; // A = N_A, B = N_B, T = (1/rho)(Id - P_C), beta = rho
    Vector q;
    Vector x0;
    ConvexRegion region; // the hard constraints
    /// 0.5 d^2(x, C) + (rho/2)|x - q|^2; the resolvent target minimizes
    /// this over the hard region.
    std::function<double(const Vector&)> objective;
    std::function<Vector(const Vector&)> gradient;
    Vector reference; // refined minimizer (the resolvent of the sum at q)
    double rho = 1.0;
    HardSoftSpec spec;
};

HardSoftProblem build_hard_soft(const HardSoftSpec& spec = {});

/// Strengthening parameters for the hard-soft study.  The baseline
/// triple (0, 0, 1/parameter) with theta = 1 reproduces plain splitting on
/// the shifted map; (0, 1, 1) with theta = sigma_sum serves the same
/// resolvent parameter 1.
StrengthenConfig hard_soft_davis_yin_config(const HardSoftProblem& p);
StrengthenConfig hard_soft_strengthened_config(const HardSoftProblem& p);

// ---- deblurring -------------------------------------------------------------

struct ImageProblemSpec {
    int width = 32;
    int height = 32;
    int kernel_size = 9;
    double kernel_std = 4.0;
    double noise_std = 1e-3;
    std::uint64_t seed = 2023;
    double reg_weight = 2e-5;
    int wavelet_stages = 3;
};

/// The blur map R (periodic convolution with the normalized Gaussian
/// kernel of the spec).
LinearOperator blur_operator(const ImageProblemSpec& spec);

struct DeblurProblem {
    // Problem in wavelet coefficient coordinates:
    //   A = box [0,1]^n through the synthesis map, B = reg_weight * |.|_1,
    //   T = M^T(M . - b) with M = R W.
    ThreeOperatorProblem problem;
    LinearOperator M;
    Vector b;        // observed image: blurred truth + seeded Gaussian noise
    Vector x0;       // coefficients of the observed image
    std::function<double(const Vector&)> objective; // reg|x|_1 + 0.5|Mx-b|^2
    ImageProblemSpec spec;
};

DeblurProblem build_deblur(const ImageProblemSpec& spec, const Image& ground_truth);

/// Piecewise-constant grayscale test image with values in [0,1].
Image synthetic_test_image(int width, int height);

// ---- grid sweeps -------------------------------------------------------------

struct GridAxis {
    double start = 0.0;
    double step = 0.0;
    int count = 0;
    double at(int i) const { return start + step * i; }
};

struct GridSpec {
    /// Normalized stepsize gamma/beta (gamma/mu for strengthened runs).
    GridAxis gamma_axis{0.02, 0.04, 99};
    GridAxis lambda_axis{0.03, 0.04, 50};
    int max_iter = 50000;
    double shadow_tol = 1e-8;
};

enum class CellStatus { Converged, Saturated, Infeasible, Evaluated };

struct SweepCell {
    CellStatus status = CellStatus::Infeasible;
    int iterations = 0;
    double objective = 0.0;
};

struct SweepResult {
    GridSpec grid;
    std::vector<SweepCell> cells; // gamma-major: index = gi * lambda_count + li

    const SweepCell& cell(int gi, int li) const;
    /// Cells attaining the minimum iteration count (Converged cells only).
    std::vector<std::pair<int, int>> argmin_iterations() const;
    /// Cells attaining the minimum objective (Evaluated cells only).
    std::vector<std::pair<int, int>> argmin_objective() const;
};

/// Runs one cell of a sweep: normalized stepsize g and relaxation lambda.
using CellRunner = std::function<SweepCell(double gamma_norm, double lambda)>;

/// Evaluates every feasible cell (lambda <= 2 - g/2 on the normalized
/// grid); infeasible cells are marked, never run.  Cells may execute on
/// `workers` threads; results are written to disjoint slots so the output
/// is independent of scheduling.
SweepResult grid_sweep(const CellRunner& runner, const GridSpec& grid, int workers = 1);

/// Iteration-count cell for the hard-soft study under a given
/// strengthening configuration; stops on shadow error against the
/// problem's reference solution.
CellRunner hard_soft_cell_runner(const HardSoftProblem& problem, const StrengthenConfig& config,
                                 const GridSpec& grid);

/// Fixed-iteration objective cell for the deblurring study (records the
/// objective at the shadow point after `iters` iterations).
CellRunner deblur_cell_runner(const DeblurProblem& problem, int iters,
                              bool with_box_constraint = true);

/// Columns: gamma_norm, lambda, status, iterations, objective.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
void write_sweep_csv_file(const std::string& path, const SweepResult& result);

} // namespace opsplit

#include "opsplit/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "opsplit/rng.hpp"

namespace opsplit {

// ---- convex regions ---------------------------------------------------------

bool ConvexRegion::contains(const Vector& x, double slack) const {
    for (const auto& b : balls)
        if (distance(x, b.center) > b.radius + slack) return false;
    return true;
}

std::vector<Vector> circle_intersections(const Ball& a, const Ball& b) {
    if (a.center.size() != 2 || b.center.size() != 2)
        throw std::invalid_argument("circle_intersections: 2-D only");
    const double dx = b.center[0] - a.center[0];
    const double dy = b.center[1] - a.center[1];
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d == 0.0) return {};
    const double along = (a.radius * a.radius - b.radius * b.radius + d * d) / (2.0 * d);
    const double h2 = a.radius * a.radius - along * along;
    if (h2 < 0.0) return {};
    const double h = std::sqrt(h2);
    const double mx = a.center[0] + along * dx / d;
    const double my = a.center[1] + along * dy / d;
    const double px = -dy / d, py = dx / d;
    return {Vector{mx + h * px, my + h * py}, Vector{mx - h * px, my - h * py}};
}

Vector ConvexRegion::project(const Vector& x) const {
    if (balls.empty()) return x;
    if (contains(x, 0.0)) return x;
    Vector best;
    double best_dist = std::numeric_limits<double>::infinity();
    auto consider = [&](const Vector& y) {
        const double d = distance(y, x);
        if (d < best_dist) {
            best_dist = d;
            best = y;
        }
    };
    for (const auto& b : balls) {
        Vector y = project_ball(b.center, b.radius, x);
        if (contains(y, 1e-12)) consider(y);
    }
    if (!std::isfinite(best_dist)) {
        // Projection sits on the boundary of (at least) two balls; in the
        // plane it is one of the pairwise circle intersection points.
        for (std::size_t i = 0; i < balls.size(); ++i) {
            for (std::size_t j = i + 1; j < balls.size(); ++j) {
                for (const auto& p : circle_intersections(balls[i], balls[j]))
                    if (contains(p, 1e-9)) consider(p);
            }
        }
    }
    if (!std::isfinite(best_dist))
        throw std::runtime_error("ConvexRegion::project: region appears empty");
    return best;
}

// ---- oracle -------------------------------------------------------------------

Vector oracle_minimize_2d(const std::function<double(const Vector&)>& objective,
                          const ConvexRegion& region, const Vector& box_lo,
                          const Vector& box_hi, double tol, int grid_points) {
    if (box_lo.size() != 2 || box_hi.size() != 2)
        throw std::invalid_argument("oracle_minimize_2d: 2-D boxes only");
    if (!(box_lo[0] < box_hi[0]) || !(box_lo[1] < box_hi[1]))
        throw std::invalid_argument("oracle_minimize_2d: empty box");
    if (!(tol > 0.0)) throw std::invalid_argument("oracle_minimize_2d: tol must be positive");
    if (grid_points < 9) throw std::invalid_argument("oracle_minimize_2d: grid too coarse");

    Vector lo = box_lo, hi = box_hi;
    Vector best;
    double best_value = std::numeric_limits<double>::infinity();
    const int n = grid_points;
    for (int level = 0; level < 40; ++level) {
        const double sx = (hi[0] - lo[0]) / (n - 1);
        const double sy = (hi[1] - lo[1]) / (n - 1);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                Vector p = region.project({lo[0] + sx * i, lo[1] + sy * j});
                const double v = objective(p);
                if (v < best_value) {
                    best_value = v;
                    best = std::move(p);
                }
            }
        }
        if (best.empty())
            throw std::runtime_error("oracle_minimize_2d: no feasible point found in box");
        if (std::max(sx, sy) <= tol) break;
        const double wx = hi[0] - lo[0], wy = hi[1] - lo[1];
        lo = {best[0] - wx / 20.0, best[1] - wy / 20.0};
        hi = {best[0] + wx / 20.0, best[1] + wy / 20.0};
    }
    return best;
}

// ---- reference refinement ------------------------------------------------------

namespace {

Vector circle_point(const Ball& b, double phi) {
    return {b.center[0] + b.radius * std::cos(phi), b.center[1] + b.radius * std::sin(phi)};
}

// Stationary angle on one circle: root of the tangential derivative.
Vector refine_on_circle(const std::function<Vector(const Vector&)>& gradient, const Ball& ball,
                        double phi_seed) {
    auto h = [&](double phi) {
        const Vector x = circle_point(ball, phi);
        const Vector g = gradient(x);
        return -g[0] * std::sin(phi) + g[1] * std::cos(phi);
    };
    double width = 1e-3;
    double a = phi_seed - width, b = phi_seed + width;
    double ha = h(a), hb = h(b);
    int expansions = 0;
    while (ha * hb > 0.0) {
        if (++expansions > 24)
            throw std::runtime_error("refine_minimizer_2d: no bracket for the boundary stationary point");
        width *= 2.0;
        a = phi_seed - width;
        b = phi_seed + width;
        ha = h(a);
        hb = h(b);
    }
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double hm = h(m);
        if (ha * hm <= 0.0) {
            b = m;
            hb = hm;
        } else {
            a = m;
            ha = hm;
        }
    }
    return circle_point(ball, 0.5 * (a + b));
}

// Unconstrained stationary point by descent with adaptive step.
Vector refine_interior(const std::function<double(const Vector&)>& objective,
                       const std::function<Vector(const Vector&)>& gradient, Vector x) {
    double step = 1.0;
    double fx = objective(x);
    for (int it = 0; it < 20000; ++it) {
        const Vector g = gradient(x);
        const double gn2 = norm_squared(g);
        if (gn2 <= 1e-28 * (1.0 + std::abs(fx))) break;
        Vector y = x;
        axpy(-step, g, y);
        const double fy = objective(y);
        if (fy <= fx - 0.25 * step * gn2) {
            x = std::move(y);
            fx = fy;
            step *= 1.2;
        } else {
            step *= 0.5;
            if (step < 1e-18) break;
        }
    }
    return x;
}

} // namespace

Vector refine_minimizer_2d(const std::function<double(const Vector&)>& objective,
                           const std::function<Vector(const Vector&)>& gradient,
                           const ConvexRegion& region, const Vector& seed, double active_tol) {
    if (seed.size() != 2) throw std::invalid_argument("refine_minimizer_2d: 2-D only");
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < region.balls.size(); ++i) {
        const auto& b = region.balls[i];
        if (std::abs(distance(seed, b.center) - b.radius) <= active_tol) active.push_back(i);
    }

    Vector x;
    if (active.empty()) {
        x = refine_interior(objective, gradient, seed);
    } else if (active.size() == 1) {
        const Ball& ball = region.balls[active[0]];
        const double phi = std::atan2(seed[1] - ball.center[1], seed[0] - ball.center[0]);
        x = refine_on_circle(gradient, ball, phi);
    } else {
        // Two (or more) active circles: the minimizer is a circle-circle
        // intersection point; take the feasible one nearest the seed.
        const auto pts = circle_intersections(region.balls[active[0]], region.balls[active[1]]);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) {
            if (!region.contains(p, 1e-9)) continue;
            const double d = distance(p, seed);
            if (d < best) {
                best = d;
                x = p;
            }
        }
        if (x.empty())
            throw std::runtime_error("refine_minimizer_2d: no feasible intersection point");
    }

    // KKT verification: gradient + nonnegative combination of outward
    // normals of the active constraints must vanish.
    if (!region.contains(x, 1e-9))
        throw std::runtime_error("refine_minimizer_2d: refined point infeasible");
    const Vector g = gradient(x);
    std::vector<Vector> normals;
    for (const auto& b : region.balls) {
        if (std::abs(distance(x, b.center) - b.radius) <= 1e-7) {
            Vector n = subtract(x, b.center);
            const double nn = norm(n);
            for (auto& e : n) e /= nn;
            normals.push_back(std::move(n));
        }
    }
    const double scale = 1.0 + norm(g);
    Vector residual = g;
    if (normals.size() == 1) {
        const double mu = -dot(g, normals[0]);
        if (mu < -1e-7 * scale)
            throw std::runtime_error("refine_minimizer_2d: negative multiplier");
        axpy(std::max(mu, 0.0), normals[0], residual);
    } else if (normals.size() >= 2) {
        const Vector &n0 = normals[0], &n1 = normals[1];
        const double det = n0[0] * n1[1] - n0[1] * n1[0];
        if (std::abs(det) > 1e-12) {
            const double mu0 = (-g[0] * n1[1] + g[1] * n1[0]) / det;
            const double mu1 = (-n0[0] * g[1] + n0[1] * g[0]) / det;
            if (mu0 < -1e-7 * scale || mu1 < -1e-7 * scale)
                throw std::runtime_error("refine_minimizer_2d: negative multiplier");
            axpy(mu0, n0, residual);
            axpy(mu1, n1, residual);
        }
    }
    if (normals.empty() ? norm(g) > 1e-7 * scale : norm(residual) > 1e-6 * scale)
        throw std::runtime_error("refine_minimizer_2d: stationarity check failed");
    return x;
}

// ---- experiment builders ---------------------------------------------------------

TwoBallProblem build_two_ball(const TwoBallSpec& spec) {
    TwoBallProblem out;
    out.spec = spec;
    out.region.balls = {spec.a, spec.b};
    out.problem = make_problem(ball_normal_cone(spec.a.center, spec.a.radius),
                               ball_normal_cone(spec.b.center, spec.b.radius), identity_map(2));
    auto objective = [](const Vector& x) { return 0.5 * norm_squared(x); };
    auto gradient = [](const Vector& x) { return x; };
    const Vector seed = oracle_minimize_2d(objective, out.region, {-4.0, -4.0}, {4.0, 4.0}, 1e-7);
    out.min_norm_point = refine_minimizer_2d(objective, gradient, out.region, seed);
    return out;
}

HardSoftProblem build_hard_soft(const HardSoftSpec& spec) {
    if (!(spec.rho > 0.0)) throw std::invalid_argument("build_hard_soft: rho must be positive");
    HardSoftProblem out;
    out.spec = spec;
    out.q = spec.q;
    out.x0 = spec.x0;
    out.rho = spec.rho;
    out.region.balls = {spec.hard.a, spec.hard.b};
    const Ball soft = spec.soft;
    auto project_soft = [soft](const Vector& x) { return project_ball(soft.center, soft.radius, x); };
    out.problem = make_problem(ball_normal_cone(spec.hard.a.center, spec.hard.a.radius),
                               ball_normal_cone(spec.hard.b.center, spec.hard.b.radius),
                               squared_distance_map(project_soft, spec.rho, 2));
    const double rho = spec.rho;
    const Vector q = spec.q;
    out.objective = [project_soft, rho, q](const Vector& x) {
        const Vector p = project_soft(x);
        double d2 = 0.0, dq2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            d2 += (x[i] - p[i]) * (x[i] - p[i]);
            dq2 += (x[i] - q[i]) * (x[i] - q[i]);
        }
        return 0.5 * d2 + 0.5 * rho * dq2;
    };
    out.gradient = [project_soft, rho, q](const Vector& x) {
        const Vector p = project_soft(x);
        Vector g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = (x[i] - p[i]) + rho * (x[i] - q[i]);
        return g;
    };
    const Vector seed = oracle_minimize_2d(out.objective, out.region, {-4.0, -4.0}, {4.0, 4.0}, 1e-7);
    out.reference = refine_minimizer_2d(out.objective, out.gradient, out.region, seed);
    return out;
}

StrengthenConfig hard_soft_davis_yin_config(const HardSoftProblem& p) {
    StrengthenConfig c;
    c.theta = 1.0;
    c.sigma_a = 0.0;
    c.sigma_b = 0.0;
    c.sigma_t = 1.0; // resolvent parameter served: 1
    c.q = p.q;
    return c;
}

StrengthenConfig hard_soft_strengthened_config(const HardSoftProblem& p) {
    StrengthenConfig c;
    c.theta = 2.0; // sigma sum, so the served parameter stays 1
    c.sigma_a = 0.0;
    c.sigma_b = 1.0;
    c.sigma_t = 1.0;
    c.q = p.q;
    return c;
}

// ---- deblurring ---------------------------------------------------------------------

LinearOperator blur_operator(const ImageProblemSpec& spec) {
    return periodic_convolution(spec.width, spec.height,
                                gaussian_kernel(spec.kernel_size, spec.kernel_std),
                                spec.kernel_size);
}

Image synthetic_test_image(int width, int height) {
    Image img = make_image(width, height, 0.25);
    auto fill = [&](double r0, double r1, double c0, double c1, double v) {
        const int rlo = static_cast<int>(r0 * height), rhi = static_cast<int>(r1 * height);
        const int clo = static_cast<int>(c0 * width), chi = static_cast<int>(c1 * width);
        for (int r = rlo; r < rhi; ++r)
            for (int c = clo; c < chi; ++c) img.at(r, c) = v;
    };
    fill(0.125, 0.5, 0.1875, 0.625, 0.8);
    fill(0.5625, 0.875, 0.3125, 0.8125, 0.55);
    fill(0.25, 0.8125, 0.0625, 0.25, 0.4);
    return img;
}

DeblurProblem build_deblur(const ImageProblemSpec& spec, const Image& ground_truth) {
    if (ground_truth.width != spec.width || ground_truth.height != spec.height)
        throw std::invalid_argument("build_deblur: ground truth dimensions do not match spec");
    const int div = 1 << spec.wavelet_stages;
    if (spec.width % div != 0 || spec.height % div != 0)
        throw std::invalid_argument("build_deblur: dimensions must be divisible by 2^stages");
    for (double p : ground_truth.pixels)
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("build_deblur: ground truth pixels must lie in [0,1]");
    if (spec.noise_std < 0.0)
        throw std::invalid_argument("build_deblur: noise std must be nonnegative");
    if (!(spec.reg_weight > 0.0))
        throw std::invalid_argument("build_deblur: regularization weight must be positive");

    DeblurProblem out;
    out.spec = spec;
    const int n = spec.width * spec.height;
    const LinearOperator W = haar_synthesis_operator(spec.width, spec.height, spec.wavelet_stages);
    const LinearOperator R = blur_operator(spec);
    out.M = compose(R, W);

    out.b = R.apply(ground_truth.pixels);
    if (spec.noise_std > 0.0) {
        Rng rng(spec.seed);
        for (auto& v : out.b) v += rng.normal(0.0, spec.noise_std);
    }
    out.x0 = W.apply_adjoint(out.b);

    out.problem = make_problem(box_normal_cone_through(W, n),
                               l1_subdifferential(n, spec.reg_weight),
                               least_squares_map(out.M, out.b));

    const double reg = spec.reg_weight;
    const LinearOperator M = out.M;
    const Vector b = out.b;
    out.objective = [reg, M, b](const Vector& x) {
        double l1 = 0.0;
        for (double v : x) l1 += std::abs(v);
        Vector r = M.apply(x);
        double fit = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) fit += (r[i] - b[i]) * (r[i] - b[i]);
        return reg * l1 + 0.5 * fit;
    };
    return out;
}

} // namespace opsplit

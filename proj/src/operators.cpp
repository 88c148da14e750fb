#include "opsplit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "opsplit/rng.hpp"

namespace opsplit {

Vector project_ball(const Vector& center, double radius, const Vector& x) {
    require_same_dim(center, x, "project_ball");
    if (!(radius > 0.0)) throw std::invalid_argument("project_ball: radius must be positive");
    const double d = distance(x, center);
    if (d <= radius) return x;
    Vector r(x.size());
    const double s = radius / d;
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = center[i] + s * (x[i] - center[i]);
    return r;
}

Vector project_box(const Vector& lo, const Vector& hi, const Vector& x) {
    require_same_dim(lo, hi, "project_box");
    require_same_dim(lo, x, "project_box");
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (lo[i] > hi[i])
            throw std::invalid_argument("project_box: lo exceeds hi at component " + std::to_string(i));
        r[i] = std::min(std::max(x[i], lo[i]), hi[i]);
    }
    return r;
}

Vector soft_threshold(double t, const Vector& x) {
    if (!(t > 0.0)) throw std::invalid_argument("soft_threshold: threshold must be positive");
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > t)
            r[i] = x[i] - t;
        else if (x[i] < -t)
            r[i] = x[i] + t;
        else
            r[i] = 0.0;
    }
    return r;
}

Vector zero_operator_resolvent(double gamma, const Vector& x) {
    if (!(gamma > 0.0)) throw std::invalid_argument("zero_operator_resolvent: gamma must be positive");
    return x;
}

Vector least_squares_gradient(const LinearOperator& M, const Vector& b, const Vector& x) {
    Vector r = M.apply(x);
    require_same_dim(r, b, "least_squares_gradient");
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return M.apply_adjoint(r);
}

Vector squared_distance_gradient(const std::function<Vector(const Vector&)>& projector,
                                 double rho, const Vector& x) {
    if (!(rho > 0.0)) throw std::invalid_argument("squared_distance_gradient: rho must be positive");
    Vector p = projector(x);
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = (x[i] - p[i]) / rho;
    return r;
}

// ---- catalog -------------------------------------------------------------

ResolventOperator zero_resolvent(int dim) {
    ResolventOperator op;
    op.dim = dim;
    op.name = "zero";
    op.resolvent = [](double gamma, const Vector& x) { return zero_operator_resolvent(gamma, x); };
    return op;
}

ResolventOperator ball_normal_cone(Vector center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball_normal_cone: radius must be positive");
    ResolventOperator op;
    op.dim = static_cast<int>(center.size());
    op.name = "normal_cone_ball";
    op.resolvent = [center = std::move(center), radius](double, const Vector& x) {
        return project_ball(center, radius, x);
    };
    return op;
}

ResolventOperator box_normal_cone(Vector lo, Vector hi) {
    require_same_dim(lo, hi, "box_normal_cone");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i])
            throw std::invalid_argument("box_normal_cone: lo exceeds hi at component " + std::to_string(i));
    ResolventOperator op;
    op.dim = static_cast<int>(lo.size());
    op.name = "normal_cone_box";
    op.resolvent = [lo = std::move(lo), hi = std::move(hi)](double, const Vector& x) {
        return project_box(lo, hi, x);
    };
    return op;
}

ResolventOperator l1_subdifferential(int dim, double weight) {
    if (!(weight > 0.0)) throw std::invalid_argument("l1_subdifferential: weight must be positive");
    ResolventOperator op;
    op.dim = dim;
    op.name = "l1_subdifferential";
    op.resolvent = [weight](double gamma, const Vector& x) {
        return soft_threshold(gamma * weight, x);
    };
    return op;
}

ResolventOperator box_normal_cone_through(const LinearOperator& synthesis, int dim) {
    ResolventOperator op;
    op.dim = dim;
    op.name = "normal_cone_box_through";
    op.resolvent = [synthesis](double, const Vector& x) {
        Vector img = synthesis.apply(x);
        for (auto& p : img) p = std::min(std::max(p, 0.0), 1.0);
        return synthesis.apply_adjoint(img);
    };
    return op;
}

CocoerciveMap zero_map(int dim) {
    CocoerciveMap t;
    t.dim = dim;
    t.beta = std::numeric_limits<double>::infinity();
    t.name = "zero";
    t.apply = [dim](const Vector&) { return zeros(static_cast<std::size_t>(dim)); };
    return t;
}

CocoerciveMap identity_map(int dim) {
    CocoerciveMap t;
    t.dim = dim;
    t.beta = 1.0;
    t.name = "identity";
    t.apply = [](const Vector& x) { return x; };
    return t;
}

CocoerciveMap least_squares_map(const LinearOperator& M, Vector b) {
    CocoerciveMap t;
    t.dim = M.cols;
    t.beta = 1.0 / power_iteration(M, 1e-10, 100000);
    t.name = "least_squares";
    t.apply = [M, b = std::move(b)](const Vector& x) { return least_squares_gradient(M, b, x); };
    return t;
}

CocoerciveMap squared_distance_map(std::function<Vector(const Vector&)> projector,
                                   double rho, int dim) {
    if (!(rho > 0.0)) throw std::invalid_argument("squared_distance_map: rho must be positive");
    CocoerciveMap t;
    t.dim = dim;
    t.beta = rho;
    t.name = "squared_distance";
    t.apply = [projector = std::move(projector), rho](const Vector& x) {
        return squared_distance_gradient(projector, rho, x);
    };
    return t;
}

// ---- linear operators -----------------------------------------------------

LinearOperator dense_operator(int rows, int cols, std::vector<double> row_major) {
    if (rows <= 0 || cols <= 0 || row_major.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("dense_operator: shape does not match data");
    auto data = std::make_shared<std::vector<double>>(std::move(row_major));
    LinearOperator op;
    op.rows = rows;
    op.cols = cols;
    op.apply = [rows, cols, data](const Vector& x) {
        if (x.size() != static_cast<std::size_t>(cols))
            throw std::invalid_argument("dense_operator: input dimension mismatch");
        Vector y(rows, 0.0);
        for (int i = 0; i < rows; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols; ++j) s += (*data)[static_cast<std::size_t>(i) * cols + j] * x[j];
            y[i] = s;
        }
        return y;
    };
    op.apply_adjoint = [rows, cols, data](const Vector& y) {
        if (y.size() != static_cast<std::size_t>(rows))
            throw std::invalid_argument("dense_operator: adjoint input dimension mismatch");
        Vector x(cols, 0.0);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                x[j] += (*data)[static_cast<std::size_t>(i) * cols + j] * y[i];
        return x;
    };
    return op;
}

LinearOperator identity_operator(int n) {
    LinearOperator op;
    op.rows = op.cols = n;
    op.apply = [](const Vector& x) { return x; };
    op.apply_adjoint = [](const Vector& x) { return x; };
    return op;
}

LinearOperator diagonal_operator(Vector d) {
    auto diag = std::make_shared<Vector>(std::move(d));
    LinearOperator op;
    op.rows = op.cols = static_cast<int>(diag->size());
    auto mul = [diag](const Vector& x) {
        require_same_dim(*diag, x, "diagonal_operator");
        Vector y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = (*diag)[i] * x[i];
        return y;
    };
    op.apply = mul;
    op.apply_adjoint = mul;
    return op;
}

LinearOperator compose(const LinearOperator& outer, const LinearOperator& inner) {
    if (outer.cols != inner.rows)
        throw std::invalid_argument("compose: inner rows must match outer cols");
    LinearOperator op;
    op.rows = outer.rows;
    op.cols = inner.cols;
    op.apply = [outer, inner](const Vector& x) { return outer.apply(inner.apply(x)); };
    op.apply_adjoint = [outer, inner](const Vector& y) {
        return inner.apply_adjoint(outer.apply_adjoint(y));
    };
    return op;
}

double power_iteration(const LinearOperator& M, double tol, int max_iter, std::uint64_t seed) {
    if (!(tol > 0.0)) throw std::invalid_argument("power_iteration: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("power_iteration: max_iter must be positive");
    Rng rng(seed);
    Vector v = rng.uniform_vector(static_cast<std::size_t>(M.cols), -1.0, 1.0);
    double nv = norm(v);
    if (nv == 0.0) throw std::invalid_argument("power_iteration: degenerate start");
    for (auto& e : v) e /= nv;
    double estimate = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector w = M.apply_adjoint(M.apply(v));
        const double lam = norm(w);
        if (lam == 0.0) return 0.0; // M v = 0; with a random start this means M = 0
        for (auto& e : w) e /= lam;
        if (it > 0 && std::abs(lam - estimate) <= tol * std::abs(lam)) return lam;
        estimate = lam;
        v = std::move(w);
    }
    throw ConvergenceError("power_iteration: no convergence within max_iter", estimate);
}

// ---- sampled checks --------------------------------------------------------

namespace {
constexpr double kSampleLo = -10.0;
constexpr double kSampleHi = 10.0;
} // namespace

CheckReport check_cocoercive(const CocoerciveMap& T, int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("check_cocoercive: samples must be >= 1");
    Rng rng(seed);
    CheckReport rep;
    rep.samples = samples;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::size_t>(T.dim);
    for (int s = 0; s < samples; ++s) {
        const Vector x = rng.uniform_vector(n, kSampleLo, kSampleHi);
        const Vector y = rng.uniform_vector(n, kSampleLo, kSampleHi);
        const Vector tx = T(x);
        const Vector ty = T(y);
        const Vector dxy = subtract(x, y);
        const Vector dt = subtract(tx, ty);
        const double nsq = norm_squared(dt);
        double margin = dot(dxy, dt);
        if (std::isinf(T.beta)) {
            // beta = +inf encodes T = 0: any nonzero difference falsifies it
            if (nsq > 0.0) margin = -std::numeric_limits<double>::infinity();
        } else {
            margin -= T.beta * nsq;
        }
        rep.worst_margin = std::min(rep.worst_margin, margin);
    }
    rep.pass = rep.worst_margin >= -kCheckSlack;
    return rep;
}

CheckReport check_firmly_nonexpansive(const ResolventOperator& A, double gamma,
                                      int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("check_firmly_nonexpansive: samples must be >= 1");
    if (!(1.0 + gamma * A.modulus > 0.0))
        throw std::invalid_argument("check_firmly_nonexpansive: need 1 + gamma*modulus > 0");
    Rng rng(seed);
    CheckReport rep;
    rep.samples = samples;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::size_t>(A.dim);
    for (int s = 0; s < samples; ++s) {
        const Vector x = rng.uniform_vector(n, kSampleLo, kSampleHi);
        const Vector y = rng.uniform_vector(n, kSampleLo, kSampleHi);
        const Vector jx = A(gamma, x);
        const Vector jy = A(gamma, y);
        const Vector dxy = subtract(x, y);
        const Vector dj = subtract(jx, jy);
        const double margin = dot(dxy, dj) - norm_squared(dj);
        rep.worst_margin = std::min(rep.worst_margin, margin);
    }
    rep.pass = rep.worst_margin >= -kCheckSlack;
    return rep;
}

} // namespace opsplit

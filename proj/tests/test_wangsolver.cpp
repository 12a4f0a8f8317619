#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "aklab/errors.hpp"
#include "aklab/scenarios.hpp"
#include "aklab/wangsolver.hpp"

using namespace aklab;

namespace {

const double tau = 2.0 * M_PI;

double max_diff(const Scalar& a, const Scalar& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double max_dev(const Scalar& s, double v) {
    double m = 0.0;
    for (double x : s) m = std::max(m, std::abs(x - v));
    return m;
}

// 2 + sin(2 pi x) sin(2 pi y)
Scalar smooth_phi(const TorusGrid& g) {
    TrigScalar s;
    s.modes = {{0, 0, 2.0, 0.0}, {1, -1, 0.5, 0.0}, {1, 1, -0.5, 0.0}};
    return sample_scalar(g, s);
}

// Root of k/y^2 - 2y - 2 k0 = 0 in y = e^u by Newton from the right, independent of the solver's bisection.
double cubic_root_y(double k, double k0) {
    double y = std::max(1.0, k) + std::abs(k0) + 1.0;
    for (int it = 0; it < 100; ++it) {
        double f = k / (y * y) - 2 * y - 2 * k0, fp = -2 * k / (y * y * y) - 2;
        double step = f / fp;
        y -= step;
        if (std::abs(step) < 1e-16 * y) break;
    }
    return y;
}

}  // namespace

TEST(Wang, ZeroPhiGivesLogOfCurvature) {
    TorusGrid g(32);
    WangProblem p{g, Scalar(g.size(), 0.0)};
    WangSolution s = solve_wang(p);
    EXPECT_LE(max_dev(s.u, 0.0), 1e-12);
    p.k0 = -3.0;
    EXPECT_LE(max_dev(solve_wang(p).u, std::log(3.0)), 1e-11);
}

TEST(Wang, ConstantPhiMatchesScalarRoot) {
    TorusGrid g(64);
    for (double k : {0.5, 2.0, 7.0}) {
        WangProblem p{g, Scalar(g.size(), k)};
        WangSolution s = solve_wang(p);
        const double u_star = std::log(cubic_root_y(k, -1.0));
        EXPECT_NEAR(wang_constant_root(k), u_star, 1e-12);
        EXPECT_LE(max_dev(s.u, u_star), 1e-10);
    }
    // k = 2: y^3 - y^2 - 1 = 0, y = 1.46557..., so u* = 0.38224 rather than 0.2874.
    EXPECT_NEAR(wang_constant_root(2.0), 0.382245, 1e-6);
}

TEST(Wang, SmoothPhiConvergesQuadraticallyAndUniquely) {
    TorusGrid g(64);
    WangProblem p{g, smooth_phi(g)};
    WangSolution a = solve_wang(p);
    EXPECT_LE(a.residual_inf, p.newton_tol);
    EXPECT_LE(a.iterations, 20);
    EXPECT_LE(max_abs(wang_residual(p, a.u)), p.newton_tol);

    Rng rng(9);
    Scalar u0(g.size()), u1(g.size(), 2.0);
    for (auto& v : u0) v = rng.uniform(-1.0, 1.0);
    EXPECT_LE(max_diff(solve_wang(p, u0).u, a.u), 1e-9);
    EXPECT_LE(max_diff(solve_wang(p, u1).u, a.u), 1e-9);

    // Once the residual is small, r_{k+1} <= C r_k^2 with a moderate C, as long as r_k^2 is above round-off.
    const auto& h = a.residual_history;
    ASSERT_GE(h.size(), 3u);
    int quadratic_steps = 0;
    for (std::size_t k = 1; k + 1 < h.size(); ++k) {
        if (h[k] < 1e-1 && h[k] * h[k] > 1e-12) {
            EXPECT_LE(h[k + 1] / (h[k] * h[k]), 1.0) << k;
            ++quadratic_steps;
        }
    }
    EXPECT_GE(quadratic_steps, 1);

    ASSERT_EQ(a.jacobian_bound_history.size(), a.stability_threshold_history.size());
    for (std::size_t k = 0; k < a.jacobian_bound_history.size(); ++k)
        EXPECT_LE(a.jacobian_bound_history[k], a.stability_threshold_history[k]);
}

TEST(Wang, ManufacturedSolution) {
    TorusGrid g(64);
    Scalar u(g.size()), phi(g.size());
    const double k0 = -1.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        double x = g.x(k), uk = 0.1 * std::sin(tau * x), lap = -0.1 * tau * tau * std::sin(tau * x);
        u[k] = uk;
        phi[k] = (-lap + 2 * std::exp(uk) + 2 * k0) * std::exp(2 * uk);
    }
    ASSERT_LT(*std::min_element(phi.begin(), phi.end()), 0.0);
    WangProblem p{g, phi};
    EXPECT_THROW(solve_wang(p), PreconditionError);
    p.allow_signed_phi = true;
    EXPECT_LE(max_diff(solve_wang(p).u, u), 1e-10);
}

TEST(Wang, VortexResidualBoundedByNewtonTolerance) {
    TorusGrid g(64);
    Rng rng(10);
    TrigScalar s = TrigScalar::random(rng, 2, 3, 0.3);
    Scalar q(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) q[k] = 1.0 + std::pow(s.value(g.x(k), g.y(k)), 2);
    WangProblem p{g, phi_from_q(q, true)};
    WangSolution sol = solve_wang(p);
    const double umin = *std::min_element(sol.u.begin(), sol.u.end());
    const double v = max_abs(vortex_residual(g, sol.u, q, p.k0));
    EXPECT_LE(v, sol.residual_inf * std::exp(-umin) / 2 * (1 + 1e-6));
    EXPECT_LE(v, 1e-8);
}

TEST(Wang, FuchsianVortex) {
    TorusGrid g(32);
    Scalar q(g.size(), 0.0);
    WangProblem p{g, phi_from_q(q, true)};
    WangSolution sol = solve_wang(p);
    EXPECT_LE(max_abs(vortex_residual(g, sol.u, q, -1.0)), 1e-11);
}

TEST(Wang, FlatConstantCubicRescaling) {
    TorusGrid g(32);
    const double qn = 1.7;
    Scalar q(g.size(), qn);
    WangProblem half{g, phi_from_q(q, true)}, full{g, phi_from_q(q, false)};
    half.k0 = full.k0 = 0.0;
    EXPECT_LE(max_dev(half.phi, 2 * qn), 0.0);
    EXPECT_LE(max_dev(full.phi, 4 * qn), 0.0);
    WangSolution a = solve_wang(half), b = solve_wang(full);
    EXPECT_NEAR(std::exp(3 * a.u[0]), qn, 1e-10);
    EXPECT_NEAR(std::exp(3 * b.u[0]), 2 * qn, 1e-10);
    EXPECT_LE(max_abs(vortex_residual(g, a.u, q, 0.0)), 1e-10);
}

TEST(Wang, BridgeToConformalProfile) {
    // With k0 = c and phi = 2 ||q||^2, constant solutions satisfy the equation defining F at t = ||q||^2 / 2.
    TorusGrid g(32);
    for (double c : {-0.5, -1.0, -2.0})
        for (double qn : {0.0, 0.3, 4.0}) {
            WangProblem p{g, phi_from_q(Scalar(g.size(), qn), true)};
            p.k0 = c;
            WangSolution s = solve_wang(p);
            EXPECT_NEAR(s.u[0], eval_F(ConformalProfile{c}, qn / 2), 1e-10) << c << " " << qn;
        }
}

TEST(Wang, ConformalMetricFactor) {
    TorusGrid g(32);
    ConformalProfile prof{-2.0};
    FieldState fz = sample_field(g, TiteicaPair(0.0));
    EXPECT_LE(max_dev(conformal_metric_F(prof, fz), 2.0), 1e-14);
    const cplx w(0.4, 0.9);
    FieldState ft = sample_field(g, TiteicaPair(w));
    EXPECT_LE(max_dev(conformal_metric_F(prof, ft), std::exp(eval_F(prof, std::norm(w) / 2))), 1e-13);
    FieldState fw = sample_field(g, WarpedTiteicaPair(0.05, w));
    Scalar h = conformal_metric_F(prof, fw), qn = q_norm_sq_field(fw);
    for (std::size_t k = 0; k < g.size(); ++k) {
        double t = norm0_sq(pick_to_frame(fw.J[k], fw.A[k]));
        EXPECT_NEAR(h[k], std::exp(eval_F(prof, t)), 1e-12 * h[k]);
        EXPECT_NEAR(qn[k], 2 * t, 1e-13);
    }
}

TEST(Wang, ErrorsAndPreconditions) {
    TorusGrid g(32);
    WangProblem p{g, smooth_phi(g)};
    p.max_iters = 1;
    try {
        solve_wang(p);
        ADD_FAILURE() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_FALSE(e.history().empty());
        EXPECT_GT(e.residual(), 0.0);
    }
    WangProblem bad{g, Scalar(g.size(), 1.0)};
    bad.k0 = 0.5;
    EXPECT_THROW(solve_wang(bad), PreconditionError);
    WangProblem none{g, Scalar(g.size(), 0.0)};
    none.k0 = 0.0;
    EXPECT_THROW(solve_wang(none), PreconditionError);
    WangProblem wrong{g, Scalar(10, 1.0)};
    EXPECT_THROW(solve_wang(wrong), PreconditionError);
    EXPECT_THROW(wang_constant_root(-1.0), DomainError);
    EXPECT_THROW(wang_constant_root(0.0, 0.0), DomainError);
}

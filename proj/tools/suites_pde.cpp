#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "aklab/errors.hpp"
#include "aklab/framesphere.hpp"
#include "aklab/parallel.hpp"
#include "aklab/scenarios.hpp"
#include "aklab/wangsolver.hpp"
#include "suites.hpp"

namespace aklab::cli {

namespace {

double max_diff(const Scalar& a, const Scalar& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double max_dev(const Scalar& a, double v) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x - v));
    return m;
}

Scalar smooth_phi(const TorusGrid& g) {
    Scalar phi(g.size());
    for (std::size_t k = 0; k < phi.size(); ++k)
        phi[k] = 2.0 + std::sin(2.0 * M_PI * g.x(k)) * std::sin(2.0 * M_PI * g.y(k));
    return phi;
}

Scalar manufactured_u(const TorusGrid& g) {
    Scalar u(g.size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = 0.1 * std::sin(2.0 * M_PI * g.x(k));
    return u;
}

// phi making u an exact solution for background k0.
Scalar manufactured_phi(const TorusGrid& g, const Scalar& u, double k0) {
    Scalar lap = g.laplacian(u), phi(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) phi[k] = (-lap[k] + 2.0 * std::exp(u[k]) + 2.0 * k0) * std::exp(2.0 * u[k]);
    return phi;
}

json history_json(const WangSolution& s) {
    json j;
    j["iterations"] = s.iterations;
    j["residual_inf"] = s.residual_inf;
    j["residual_history"] = s.residual_history;
    j["jacobian_bound_history"] = s.jacobian_bound_history;
    j["stability_threshold_history"] = s.stability_threshold_history;
    j["linear_iterations"] = s.linear_iterations;
    return j;
}

// Largest r_{k+1} / r_k^2 over steps whose new residual is still above the round-off floor.
double quadratic_constant(const std::vector<double>& h, double floor) {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < h.size(); ++k)
        if (h[k] < 1e-1 && h[k + 1] > floor) m = std::max(m, h[k + 1] / (h[k] * h[k]));
    return m;
}

}  // namespace

Report run_wang_suite(const ExperimentConfig& cfg, const OutputDir& out) {
    const auto& wc = cfg.wang;
    Report r("wang", cfg.tol_scale, cfg.tolerance_overrides);
    const TorusGrid grid(wc.n);
    auto problem = [&](Scalar phi) {
        WangProblem p{grid, std::move(phi), wc.tol, wc.max_iters, wc.k0};
        return p;
    };

    {
        ScopedTimer timer(r, "constant phi", 6);
        const double root = wang_constant_root(2.0, wc.k0);
        WangSolution s = solve_wang(problem(Scalar(grid.size(), 2.0)));
        r.le("constant_phi_vs_root", 6, max_dev(s.u, root), 1e-10, "phi = 2, bisection root oracle");
        r.metrics()["constant_root_k2"] = root;
        if (wc.k0 < 0.0)
            r.le("zero_phi_solution", 0, max_dev(solve_wang(problem(Scalar(grid.size(), 0.0))).u, std::log(-wc.k0)),
                 1e-12, "u = ln(-k0)");
    }

    {
        ScopedTimer timer(r, "smooth phi", 6);
        WangProblem p = problem(smooth_phi(grid));
        WangSolution s = solve_wang(p);
        r.lt("newton_iterations_smooth", 6, s.iterations, 21.0, "at most 20 iterations");
        r.le("newton_residual_smooth", 0, s.residual_inf, wc.tol);
        Rng rng(cfg.seed);
        Scalar u0(grid.size());
        for (auto& v : u0) v = rng.uniform(-1.0, 1.0);
        double uniq = max_diff(solve_wang(p, u0).u, s.u);
        uniq = std::max(uniq, max_diff(solve_wang(p, Scalar(grid.size(), 1.5)).u, s.u));
        uniq = std::max(uniq, max_diff(solve_wang(p, Scalar(grid.size(), -1.0)).u, s.u));
        r.le("uniqueness_across_initializations", 6, uniq, 1e-9, "random, +1.5 and -1 starts");
        r.le("quadratic_convergence_constant", 6, quadratic_constant(s.residual_history, 1e-9), 1.0,
             "max r_{k+1} / r_k^2 once r_k < 0.1");
        double margin = -1e300;
        for (std::size_t k = 0; k < s.jacobian_bound_history.size(); ++k)
            margin = std::max(margin, s.jacobian_bound_history[k] - s.stability_threshold_history[k]);
        r.le("jacobian_below_stability_bound", 6, margin, 0.0, "max of spectral bound minus -2 min e^u");
        Scalar qn(grid.size());
        for (std::size_t k = 0; k < qn.size(); ++k) qn[k] = p.phi[k] / 2.0;
        const double umin = *std::min_element(s.u.begin(), s.u.end());
        const double bound = s.residual_inf * std::exp(-umin) / 2.0;
        r.le("vortex_residual_bound", 0, max_abs(vortex_residual(grid, s.u, qn, wc.k0)), bound * (1.0 + 1e-9) + 1e-15,
             "bounded by newton residual e^{-min u} / 2");
    }

    {
        ScopedTimer timer(r, "manufactured solution", 6);
        const Scalar ue = manufactured_u(grid);
        WangProblem p = problem(manufactured_phi(grid, ue, wc.k0));
        p.allow_signed_phi = true;
        r.le("manufactured_recovery", 6, max_diff(solve_wang(p).u, ue), 1e-10, "u = 0.1 sin(2 pi x)");
        bool threw = false;
        try {
            problem(manufactured_phi(grid, ue, wc.k0)).validate();
        } catch (const PreconditionError&) {
            threw = true;
        }
        r.truth("signed_phi_rejected_without_flag", 0, threw);
    }

    {
        ScopedTimer timer(r, "rescaling and bridge", 0);
        const double q2 = 1.7;
        auto flat = [&](bool half) {
            WangProblem p{grid, phi_from_q(Scalar(grid.size(), q2), half), wc.tol, wc.max_iters, 0.0};
            return solve_wang(p).u;
        };
        r.le("cubic_rescale_half_closes", 0, max_dev(flat(true), std::log(q2) / 3.0), 1e-10,
             "k0 = 0, constant q: e^{3u} = ||q||^2");
        r.ge("cubic_rescale_full_negative_control", 0, max_dev(flat(false), std::log(q2) / 3.0), 1e-3);
        ConformalProfile prof{-1.0};
        FieldState fs = sample_field(grid, TiteicaPair({0.6, -0.3}));
        WangProblem p{grid, phi_from_q(q_norm_sq_field(fs), true), wc.tol, wc.max_iters, prof.c};
        Scalar eu = solve_wang(p).u;
        for (auto& v : eu) v = std::exp(v);
        r.le("bridge_to_conformal_profile", 0, max_diff(eu, conformal_metric_F(prof, fs)), 1e-10,
             "e^u against e^F on the flat constant-cubic torus, k0 = c");
    }

    {
        ScopedTimer timer(r, "selected scenario " + wc.phi, 0);
        Scalar phi;
        bool signed_phi = false;
        if (wc.phi == "zero") phi = Scalar(grid.size(), 0.0);
        else if (wc.phi == "constant") phi = Scalar(grid.size(), 2.0);
        else if (wc.phi == "smooth") phi = smooth_phi(grid);
        else if (wc.phi == "titeica")
            phi = phi_from_q(q_norm_sq_field(sample_field(grid, TiteicaPair({0.6, -0.3}))), wc.cubic_rescale_half);
        else {
            phi = manufactured_phi(grid, manufactured_u(grid), wc.k0);
            signed_phi = true;
        }
        WangProblem p = problem(phi);
        p.allow_signed_phi = signed_phi;
        WangSolution s = solve_wang(p);
        r.le("selected_scenario_residual", 0, s.residual_inf, wc.tol);
        CsvWriter csv({"i", "j", "x", "y", "phi", "u"});
        for (std::size_t k = 0; k < grid.size(); ++k)
            csv.row({double(k / grid.n()), double(k % grid.n()), grid.x(k), grid.y(k), phi[k], s.u[k]});
        out.write_text("u.csv", csv.text());
        json h = history_json(s);
        h["phi"] = wc.phi;
        out.write_json("history.json", h);
    }
    return r;
}

Report run_titeica_suite(const ExperimentConfig& cfg, const OutputDir& out) {
    const auto& tc = cfg.titeica;
    Report r("titeica", cfg.tol_scale, cfg.tolerance_overrides);
    r.metrics()["frame_convention"] = frame_convention();

    {
        ScopedTimer timer(r, "zero curvature vs integrability", 11);
        const int N = tc.frame_samples;
        struct Case {
            std::shared_ptr<const SurfaceData> d;
            cplx Q0;
            std::vector<cplx> pts;
        };
        std::vector<Case> cases(static_cast<std::size_t>(N));
        Rng rng(cfg.seed);
        for (int s = 0; s < N; ++s) {
            auto& c = cases[static_cast<std::size_t>(s)];
            c.Q0 = cplx(rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? 1.0 : -1.0), rng.uniform(-1.0, 1.0));
            if (s % 2 == 0)
                c.d = std::make_shared<TiteicaData>(c.Q0, cplx(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)));
            else
                c.d = std::make_shared<LiouvilleData>(cplx(rng.uniform(0.5, 1.0), rng.uniform(-0.3, 0.3)),
                                                      cplx(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)));
            for (int k = 0; k < 20; ++k) c.pts.emplace_back(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
        }
        std::vector<std::array<double, 4>> e(cases.size());
        parallel_for(cases.size(), [&](std::size_t s) {
            const auto& c = cases[s];
            e[s][0] = curvature_residual(*c.d, c.pts);
            double ir = 0.0;
            for (cplx z : c.pts) ir = std::max(ir, integrability_residual(*c.d, z));
            e[s][1] = ir;
            e[s][2] = curvature_residual(ShiftedPsiData(c.d, 0.01), c.pts);
            e[s][3] = curvature_residual(NonHolomorphicQData(c.Q0, cplx(0.05, 0.0)), c.pts);
        });
        double on = 0, integ = 0, off = 1e300, nonhol = 1e300;
        for (const auto& v : e) {
            on = std::max(on, v[0]);
            integ = std::max(integ, v[1]);
            off = std::min(off, v[2]);
            nonhol = std::min(nonhol, v[3]);
        }
        r.le("curvature_on_shell", 11, on, 1e-10, "titeica reparametrisations and liouville data");
        r.le("integrability_on_shell", 0, integ, 1e-10);
        r.ge("curvature_off_shell_psi_shift", 11, off, 1e-3, "psi shifted by 0.01");
        r.ge("curvature_non_holomorphic_Q", 11, nonhol, 1e-3, "dQ/dzbar = 0.05");
        TiteicaData t(tc.Q);
        r.le("curvature_titeica_constant", 11, curvature_residual(t, 0.0), 1e-12);
    }

    {
        ScopedTimer timer(r, "frame integration", 11);
        TiteicaData t(tc.Q);
        const FrameState F0 = canonical_frame(t.psi(0.0));
        r.le("holonomy_unit_square", 11,
             holonomy_deviation(t, F0, {0.0, 1.0, cplx(1.0, 1.0), cplx(0.0, 1.0), 0.0}, tc.rk_step), 1e-6);
        TiteicaData tb(tc.Q, cplx(0.2, -0.1));
        const FrameState Fb = canonical_frame(tb.psi(0.0));
        r.le("holonomy_reparametrised_titeica", 11,
             holonomy_deviation(tb, Fb, {0.0, 0.5, cplx(0.5, 0.5), cplx(0.0, 0.5), 0.0}, tc.rk_step), 1e-6);
        LiouvilleData lv(cplx(0.7, 0.1), cplx(0.1, -0.1));
        const FrameState Fl = canonical_frame(lv.psi(0.0));
        r.le("holonomy_liouville", 11,
             holonomy_deviation(lv, Fl, {0.0, 0.5, cplx(0.5, 0.5), cplx(0.0, 0.5), 0.0}, tc.rk_step), 1e-6);
        r.le("path_independence", 11, path_independence(tb, Fb, 0.0, cplx(0.5, 0.4), tc.rk_step), 1e-6);
        IntegrationResult z = integrate_frame(t, F0, {cplx(0.0, 0.0), cplx(0.0, 0.0)}, tc.rk_step);
        r.le("zero_length_path", 0, (z.end.F - F0.F).cwiseAbs().maxCoeff(), 0.0);
        IntegrationResult e = integrate_frame(t, F0, {0.0, 1.0, cplx(1.0, 0.7)}, tc.rk_step);
        r.le("rk4_vs_exact_frame", 0, (e.end.F - exact_titeica_frame(tc.Q, cplx(1.0, 0.7)).F).cwiseAbs().maxCoeff(),
             1e-8);
        Rk4OrderResult o = rk4_order(tc.Q, cplx(1.0, 0.7), {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64});
        r.ge("rk4_observed_order_min", 11, o.observed_order, 3.7, "least-squares slope of log error vs log step");
        r.le("rk4_observed_order_max", 11, o.observed_order, 4.3);
        r.metrics()["rk4_errors"] = o.errors;
        r.metrics()["rk4_steps"] = o.steps;
        bool threw = false;
        try {
            integrate_frame(TiteicaData(cplx(8.0, 0.0)), canonical_frame(TiteicaData(cplx(8.0, 0.0)).psi(0.0)),
                            {0.0, 2.0}, 0.5);
        } catch (const NumericalError&) {
            threw = true;
        }
        r.truth("coarse_step_drift_guard", 0, threw);
    }

    {
        ScopedTimer timer(r, "titeica immersion", 11);
        TiteicaMesh m = titeica_immersion(tc.Q, tc.extent, tc.step, tc.rk_step);
        TiteicaHooks hk = titeica_hooks(m);
        r.le("reality_and_determinant_drift", 11, m.max_drift, 1e-8);
        r.le("affine_normal_equals_position", 11, hk.xi_residual, 1e-5, "fourth-order differences, relative");
        r.le("blaschke_metric_reproduction", 11, hk.blaschke_residual, 1e-5, "relative to e^psi");
        r.gt("transversality_min", 11, hk.min_transversality, 1e-6);
        TiteicaMesh mc = titeica_immersion(std::conj(tc.Q), tc.extent, tc.step, tc.rk_step);
        double mir = 0.0;
        for (int i = 0; i < m.side; ++i)
            for (int j = 0; j < m.side; ++j) {
                Vec3 b = m.at(i, m.side - 1 - j);
                b(1) = -b(1);
                mir = std::max(mir, (mc.at(i, j) - b).norm());
            }
        r.le("mirror_symmetry", 0, mir, 1e-9, "conj(Q) mesh against the (x, -y, z) reflection");
        const double lam = 1.5;
        TiteicaMesh ms = titeica_immersion(lam * lam * lam * tc.Q, tc.extent / lam, tc.step / lam, tc.rk_step / lam);
        double sc = 0.0;
        for (std::size_t k = 0; k < m.points.size(); ++k) sc = std::max(sc, (ms.points[k] - m.points[k]).norm());
        r.le("scaling_symmetry", 0, sc, 1e-8, "lambda^3 Q on the domain shrunk by lambda");
        r.metrics()["mesh_side"] = m.side;
        r.metrics()["psi"] = m.psi;

        CsvWriter csv({"i", "j", "x", "y", "fx", "fy", "fz"});
        std::string obj = "# titeica immersion, Q = " + fmt_num(tc.Q.real()) + " + " + fmt_num(tc.Q.imag()) + "i\n";
        for (int i = 0; i < m.side; ++i)
            for (int j = 0; j < m.side; ++j) {
                const Vec3& p = m.at(i, j);
                csv.row({double(i), double(j), m.coord(i), m.coord(j), p(0), p(1), p(2)});
                obj += "v " + fmt_num(p(0)) + " " + fmt_num(p(1)) + " " + fmt_num(p(2)) + "\n";
            }
        for (int i = 0; i + 1 < m.side; ++i)
            for (int j = 0; j + 1 < m.side; ++j) {
                const int a = i * m.side + j + 1, b = (i + 1) * m.side + j + 1;
                obj += "f " + std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(b + 1) + "\n";
                obj += "f " + std::to_string(a) + " " + std::to_string(b + 1) + " " + std::to_string(a + 1) + "\n";
            }
        out.write_text("mesh.csv", csv.text());
        out.write_text("mesh.obj", obj);
    }
    return r;
}

}  // namespace aklab::cli

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "aklab/errors.hpp"
#include "aklab/parallel.hpp"
#include "aklab/pointmodel.hpp"
#include "aklab/scalarfuncs.hpp"
#include "aklab/scenarios.hpp"
#include "aklab/symbol.hpp"
#include "suites.hpp"

namespace aklab::cli {

namespace {

std::vector<double> log_sweep(int samples, double t_max) {
    std::vector<double> ts{0.0};
    const double lo = -8.0, hi = std::log10(t_max);
    for (int k = 1; k < samples; ++k) ts.push_back(std::pow(10.0, lo + (hi - lo) * (k - 1) / (samples - 2)));
    return ts;
}

std::string c_tag(double c) { return fmt_num(c); }

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

Mat2 random_sl2(Rng& rng) {
    for (;;) {
        double a = rng.uniform(-3.0, 3.0), b = rng.uniform(-3.0, 3.0), c = rng.uniform(-3.0, 3.0);
        if (std::abs(a) < 0.2) continue;
        Mat2 P;
        P << a, b, c, (1.0 + b * c) / a;
        return P;
    }
}

Mat2 random_sl2_algebra(Rng& rng) {
    double a = rng.uniform(-1.0, 1.0);
    Mat2 X;
    X << a, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), -a;
    return X;
}

CoordPoint random_coord(Rng& rng, double w_max) {
    return {{rng.uniform(-2.0, 2.0), rng.uniform(0.3, 3.0)}, {rng.uniform(-w_max, w_max), rng.uniform(-w_max, w_max)}};
}

TangentVector random_coord_tangent(Rng& rng, const CoordPoint& p) {
    return tangent_from_coords(p, rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
}

// Moves a chart point along coordinate direction d.
CoordPoint shift(const CoordPoint& p, const std::array<double, 4>& d, double s) {
    return {p.z + s * cplx(d[0], d[1]), p.w + s * cplx(d[2], d[3])};
}

}  // namespace

Report run_scalarfuncs_suite(const ExperimentConfig& cfg, const OutputDir& out) {
    const auto& sc = cfg.scalarfuncs;
    Report r("scalarfuncs", cfg.tol_scale, cfg.tolerance_overrides);
    const auto ts = log_sweep(sc.samples, sc.t_max);
    CsvWriter csv({"c", "t", "F", "F_prime", "f", "f_prime", "residual"});

    for (double c : sc.c_values) {
        ConformalProfile prof{c};
        prof.validate();
        const std::string tag = "[c=" + c_tag(c) + "]";
        std::vector<double> F(ts.size()), Fp(ts.size()), res(ts.size()), closed(ts.size(), 0.0);
        std::vector<FValues> fv(ts.size());
        {
            ScopedTimer timer(r, "profile " + tag, 1);
            parallel_for(ts.size(), [&](std::size_t k) {
                F[k] = eval_F(prof, ts[k]);
                Fp[k] = eval_F_prime(prof, ts[k]);
                res[k] = std::abs(functional_residual(prof, ts[k], F[k]));
                if (ts[k] > 0.0) closed[k] = std::abs(eval_F_closed(prof, ts[k]) - F[k]);
            });
            r.le("functional_residual " + tag, 1, *std::max_element(res.begin(), res.end()), 1e-10);
            r.le("F0_equals_log_abs_c " + tag, 1, std::abs(F[0] - std::log(std::abs(c))), 1e-12);
            r.le("closed_form_vs_root " + tag, 1, *std::max_element(closed.begin(), closed.end()), 1e-9);
        }
        {
            ScopedTimer timer(r, "lemma " + tag, 2);
            parallel_for(ts.size(), [&](std::size_t k) { fv[k] = eval_f_both(prof, ts[k]); });
            r.le("f_at_zero " + tag, 2, std::abs(fv[0].f), 1e-14);
            double fp_max = -1e300, drop = 0.0, fp_scale = 0.0, lemma_min = 1e300, lemma_rel = 0.0;
            for (std::size_t k = 0; k < ts.size(); ++k) {
                fp_max = std::max(fp_max, fv[k].fp);
                fp_scale = std::max(fp_scale, std::abs(fv[k].fp));
                if (k > 0) drop = std::max(drop, fv[k - 1].fp - fv[k].fp);
                const double L = 1.0 - fv[k].f + 3.0 * ts[k] * fv[k].fp;
                lemma_min = std::min(lemma_min, L);
                if (ts[k] > 0.0) {
                    const double ratio = 3.0 * ts[k] * aux_g_prime(prof, ts[k]) / aux_g(prof, ts[k]);
                    lemma_rel = std::max(lemma_rel, std::abs(L - ratio) / std::abs(ratio));
                }
            }
            r.lt("f_prime_negative " + tag, 2, fp_max, 0.0);
            // Successive values may tie at the far end of the sweep where f' flattens out.
            r.le("f_prime_monotone_increasing " + tag, 2, drop / fp_scale, 1e-12,
                 "largest relative decrease between consecutive samples");
            r.gt("lemma_combination_positive " + tag, 2, lemma_min, 0.0);
            r.le("lemma_combination_vs_aux_g " + tag, 2, lemma_rel, 1e-6);
        }
        for (std::size_t k = 0; k < ts.size(); ++k) csv.row({c, ts[k], F[k], Fp[k], fv[k].f, fv[k].fp, res[k]});
    }

    {
        ConformalProfile prof{-1.0};
        const double h = 1e-5;
        const double fd = (eval_F(prof, 1.0 + h) - eval_F(prof, 1.0 - h)) / (2.0 * h);
        const double Fp1 = eval_F_prime(prof, 1.0);
        r.le("F_prime_vs_central_difference", 0, std::abs(Fp1 - fd), 1e-8);
        r.metrics()["F_prime_at_1_c_minus_1"] = Fp1;
        r.finding("F_prime_example_value", "F'(1) at c = -1 is about 0.2329", Fp1, std::abs(Fp1 - 0.2329) < 5e-5,
                  "implicit derivative and central difference of the root-found F agree with each other");
    }
    {
        // Domain guards.
        ConformalProfile prof{-1.0};
        bool threw = false;
        try {
            eval_F(prof, -1.0);
        } catch (const DomainError&) {
            threw = true;
        }
        r.truth("negative_t_rejected", 0, threw);
        threw = false;
        try {
            ConformalProfile{0.5}.validate();
        } catch (const DomainError&) {
            threw = true;
        }
        r.truth("nonnegative_c_rejected", 0, threw);
    }
    out.write_text("profile.csv", csv.text());
    return r;
}

Report run_pointmodel_suite(const ExperimentConfig& cfg, const OutputDir& out) {
    const auto& pc = cfg.pointmodel;
    Report r("pointmodel", cfg.tol_scale, cfg.tolerance_overrides);
    ConformalProfile prof{pc.c};
    prof.validate();
    const std::size_t N = static_cast<std::size_t>(pc.samples);

    struct Sample {
        CoordPoint p;
        PointState pt;
        TangentVector t1, t2;
        Mat2 P, X;
        double theta = 0.0;
        std::array<double, 4> d{};
    };
    std::vector<Sample> S(N);
    {
        Rng rng(cfg.seed);
        for (auto& s : S) {
            s.p = random_coord(rng, pc.w_max);
            s.pt = point_from_coords(s.p);
            s.t1 = random_coord_tangent(rng, s.p);
            s.t2 = random_coord_tangent(rng, s.p);
            s.P = random_sl2(rng);
            s.X = random_sl2_algebra(rng);
            s.theta = rng.uniform(0.0, 2.0 * M_PI);
            for (auto& x : s.d) x = rng.uniform(-1.0, 1.0);
        }
    }

    {
        ScopedTimer timer(r, "pseudo-kaehler suite", 3);
        std::vector<std::array<double, 12>> e(N);
        std::vector<GramSignature> sig(N);
        parallel_for(N, [&](std::size_t k) {
            const auto& s = S[k];
            const auto& pt = s.pt;
            const double n1 = std::max(1.0, max_abs(s.t1)), n2 = std::max(1.0, max_abs(s.t2));
            const double sc = n1 * n2;
            auto& v = e[k];
            const TangentVector It1 = cplx_I(pt, s.t1), It2 = cplx_I(pt, s.t2);
            v[0] = max_abs(cplx_I(pt, It1) + s.t1) / n1;
            v[1] = tangent_invariant_residual(pt, It1) / n1;
            const double g12 = metric_g(prof, pt, s.t1, s.t2);
            const double w12 = symp_omega(prof, pt, s.t1, s.t2);
            v[2] = std::abs(metric_g(prof, pt, It1, It2) - g12) / sc;
            v[3] = std::abs(w12 - metric_g(prof, pt, s.t1, It2)) / sc;
            v[4] = std::abs(w12 + symp_omega(prof, pt, s.t2, s.t1)) / sc;
            const PointState Ppt = sl2_act(s.P, pt);
            const TangentVector Pt1 = sl2_act_tangent(s.P, pt, s.t1), Pt2 = sl2_act_tangent(s.P, pt, s.t2);
            v[5] = std::abs(metric_g(prof, Ppt, Pt1, Pt2) - g12) / sc;
            v[6] = std::abs(symp_omega(prof, Ppt, Pt1, Pt2) - w12) / sc;
            v[7] = max_abs(sl2_act_tangent(s.P, pt, It1) - cplx_I(Ppt, Pt1)) / std::max(1.0, max_abs(Pt1));
            const PointState Cpt = circle_act(s.theta, pt);
            const TangentVector Ct1 = circle_act_tangent(s.theta, pt, s.t1),
                                Ct2 = circle_act_tangent(s.theta, pt, s.t2);
            v[8] = std::abs(metric_g(prof, Cpt, Ct1, Ct2) - g12) / sc;
            v[9] = std::abs(symp_omega(prof, Cpt, Ct1, Ct2) - w12) / sc;
            v[10] = max_abs(circle_act_tangent(s.theta, pt, It1) - cplx_I(Cpt, Ct1)) / n1;
            const PointState Q2 = circle_act(0.3, circle_act(s.theta, pt)), Q1 = circle_act(s.theta + 0.3, pt);
            v[11] = (Q2.J - Q1.J).cwiseAbs().maxCoeff() + (Q2.A - Q1.A).max_abs();
            sig[k] = gram_signature(prof, s.p);
        });
        auto worst = [&](int i) {
            double m = 0.0;
            for (const auto& v : e) m = std::max(m, v[i]);
            return m;
        };
        r.le("I_squared_is_minus_identity", 3, worst(0), 1e-12);
        r.le("I_preserves_tangent_space", 3, worst(1), 1e-12);
        r.le("metric_I_invariant", 3, worst(2), 1e-12);
        r.le("omega_equals_g_with_I", 3, worst(3), 1e-12);
        r.le("omega_antisymmetric", 3, worst(4), 1e-12);
        r.le("sl2_invariance_metric", 3, worst(5), 1e-9);
        r.le("sl2_invariance_omega", 3, worst(6), 1e-9);
        r.le("sl2_commutes_with_I", 3, worst(7), 1e-9);
        r.le("circle_invariance_metric", 3, worst(8), 1e-9);
        r.le("circle_invariance_omega", 3, worst(9), 1e-9);
        r.le("circle_commutes_with_I", 3, worst(10), 1e-9);
        r.le("circle_composition_law", 0, worst(11), 1e-12);

        int bad = 0;
        double min_eig = 1e300;
        for (const auto& g : sig) {
            if (g.n_plus != 2 || g.n_minus != 2 || g.degenerate) ++bad;
            min_eig = std::min(min_eig, g.min_abs_eig);
        }
        // Extra sweep of the fibre at z = i out to |w| = 50.
        std::vector<GramSignature> wsig(1000);
        parallel_for(wsig.size(), [&](std::size_t k) {
            const double rad = 50.0 * static_cast<double>(k + 1) / wsig.size();
            const double ang = 2.399963229728653 * static_cast<double>(k);
            wsig[k] = gram_signature(prof, CoordPoint{{0.0, 1.0}, std::polar(rad, ang)});
        });
        for (const auto& g : wsig) {
            if (g.n_plus != 2 || g.n_minus != 2 || g.degenerate) ++bad;
            min_eig = std::min(min_eig, g.min_abs_eig);
        }
        r.le("gram_signature_not_2_2_count", 3, bad, 0.0, "random points plus 1000 fibre points with |w| <= 50");
        r.gt("gram_min_abs_eigenvalue", 3, min_eig, 1e-10);

        // d omega by finite differences over every sample plus the two fibre points (i, 0) and (i, 1+i).
        std::vector<CoordPoint> pts{{{0.0, 1.0}, {0.0, 0.0}}, {{0.0, 1.0}, {1.0, 1.0}}};
        for (const auto& s : S) pts.push_back(s.p);
        std::vector<std::array<double, 4>> dres(pts.size());
        parallel_for(pts.size(), [&](std::size_t k) {
            dres[k] = {omega_closedness_residual(prof, pts[k], 1e-3), omega_closedness_residual(prof, pts[k], 2e-3),
                       omega_closedness_residual(prof, pts[k], 4e-3, 4), omega_closedness_residual(prof, pts[k], 8e-3, 4)};
        });
        double dw = 0.0, ord_lo = 1e300, ord_hi = -1e300, ord4_lo = 1e300, ord4_hi = -1e300;
        for (const auto& d : dres) {
            dw = std::max(dw, d[0]);
            if (d[0] > 1e-8) {
                const double o = std::log2(d[1] / d[0]);
                ord_lo = std::min(ord_lo, o);
                ord_hi = std::max(ord_hi, o);
            }
            if (d[2] > 1e-8) {
                const double o = std::log2(d[3] / d[2]);
                ord4_lo = std::min(ord4_lo, o);
                ord4_hi = std::max(ord4_hi, o);
            }
        }
        r.le("domega_fd_residual_h1e-3", 3, dw, 1e-5,
             "second-order central differences over all samples; the residual is pure truncation error C h^2");
        r.ge("domega_observed_order_min", 3, ord_lo, 1.8, "log2 of residual ratio between h = 2e-3 and h = 1e-3");
        r.le("domega_observed_order_max", 3, ord_hi, 2.2);
        r.ge("domega_fourth_order_observed_order_min", 3, ord4_lo, 3.6, "five-point stencil, h = 8e-3 vs 4e-3, points above round-off");
        r.le("domega_fourth_order_observed_order_max", 3, ord4_hi, 4.4);
        r.metrics()["domega_residual_at_i0"] = dres[0][0];
        r.metrics()["domega_residual_at_i_1pi"] = dres[1][0];
        r.metrics()["domega_truncation_constant_max"] = dw / 1e-6;
        r.metrics()["domega_order_range"] = {ord_lo, ord_hi};
    }

    {
        ScopedTimer timer(r, "moment maps", 4);
        const double h = 1e-5;
        std::vector<std::array<double, 3>> e(N);
        parallel_for(N, [&](std::size_t k) {
            const auto& s = S[k];
            const TangentVector v = tangent_from_coords(s.p, s.d[0], s.d[1], s.d[2], s.d[3]);
            const PointState pp = point_from_coords(shift(s.p, s.d, h)), pm = point_from_coords(shift(s.p, s.d, -h));
            const double fd = (moment_hat(prof, pp, s.X) - moment_hat(prof, pm, s.X)) / (2.0 * h);
            const double ex = symp_omega(prof, s.pt, sl2_generator(s.pt, s.X), v);
            e[k][0] = std::abs(fd - ex) / std::max(1.0, std::abs(ex));
            const double eq_l = moment_hat(prof, sl2_act(s.P, s.pt), s.X);
            const double eq_r = moment_hat(prof, s.pt, s.P.inverse() * s.X * s.P);
            e[k][1] = rel(eq_l, eq_r);
            const double hfd = (hamiltonian_hat(prof, pp) - hamiltonian_hat(prof, pm)) / (2.0 * h);
            const double hex = symp_omega(prof, s.pt, circle_generator(s.pt), v);
            e[k][2] = std::abs(hfd - hex) / std::max(1.0, std::abs(hex));
        });
        auto worst = [&](int i) {
            double m = 0.0;
            for (const auto& v : e) m = std::max(m, v[i]);
            return m;
        };
        r.le("moment_map_defining_property", 4, worst(0), 1e-6, "central differences, h = 1e-5");
        r.le("moment_map_equivariance", 4, worst(1), 1e-6);
        r.le("circle_hamiltonian_property", 4, worst(2), 1e-6);
        bool threw = false;
        try {
            Mat2 X = Mat2::Identity();
            moment_hat(prof, S[0].pt, X);
        } catch (const DomainError&) {
            threw = true;
        }
        r.truth("moment_map_rejects_trace", 0, threw);
    }

    {
        // ||q||^2 from the holomorphic coefficient against inner_A(A, A) / 4.
        double m = 0.0;
        for (const auto& s : S) m = std::max(m, rel(q_norm_sq(s.pt), inner_A(s.pt.A, s.pt.A) / 4.0));
        r.le("q_norm_normalisation", 0, m, 1e-12);
    }

    {
        ScopedTimer timer(r, "symbol determinant", 5);
        const std::size_t M = static_cast<std::size_t>(pc.symbol_samples);
        struct SymSample {
            cplx w;
            Eigen::Vector2d xi;
        };
        std::vector<SymSample> ss(M);
        Rng rng(cfg.seed + 1);
        for (auto& s : ss) {
            s.w = cplx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
            s.xi = Eigen::Vector2d(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
        }
        std::vector<std::array<double, 4>> e(M);
        parallel_for(M, [&](std::size_t k) {
            const auto& s = ss[k];
            const double ref = symbol_det_formula(prof, s.w, s.xi);
            e[k][0] = std::abs(symbol_det(prof, s.w, s.xi) - ref) / std::abs(ref);
            e[k][1] = std::abs(symbol_det_schur(prof, s.w, s.xi) - ref) / std::abs(ref);
            e[k][2] = std::abs(symbol_det(prof, s.w, s.xi)) / std::pow(s.xi.squaredNorm(), 3);
            e[k][3] = std::abs(symbol_det(prof, s.w, s.xi, SymbolEntry13::printed_product) - ref) / std::abs(ref);
        });
        double d0 = 0, d1 = 0, lo = 1e300, lit = 0;
        for (const auto& v : e) {
            d0 = std::max(d0, v[0]);
            d1 = std::max(d1, v[1]);
            lo = std::min(lo, v[2]);
            lit = std::max(lit, v[3]);
        }
        r.le("symbol_det_matches_formula", 5, d0, 1e-10, "relative");
        r.le("symbol_schur_matches_formula", 5, d1, 1e-10, "relative");
        r.gt("symbol_det_over_xi6_min", 5, lo, 0.0, "det vanishes nowhere with xi != 0");
        double at0 = 0.0;
        for (std::size_t k = 0; k < std::min<std::size_t>(M, 20); ++k)
            at0 = std::max(at0, std::abs(symbol_det(prof, ss[k].w, Eigen::Vector2d::Zero())));
        r.le("symbol_det_at_xi_zero", 5, at0, 0.0);
        r.finding("symbol_entry_13_as_printed", "entry (1,3) equal to -f' u xi1^2 xi2^2 gives the stated determinant",
                  lit, lit < 1e-6, "the |xi|^2 reading of the entry reproduces the determinant; this one does not");
    }

    CsvWriter csv({"x", "y", "u", "v", "t", "n_plus", "n_minus", "min_abs_eig", "moment_trace_X"});
    for (const auto& s : S) {
        const auto g = gram_signature(prof, s.p);
        csv.row({s.p.z.real(), s.p.z.imag(), s.p.w.real(), s.p.w.imag(), norm0_sq(s.pt.A), double(g.n_plus),
                 double(g.n_minus), g.min_abs_eig, moment_hat(prof, s.pt, s.X)});
    }
    out.write_text("samples.csv", csv.text());
    return r;
}

}  // namespace aklab::cli

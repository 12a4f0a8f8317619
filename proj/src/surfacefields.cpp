#include "aklab/surfacefields.hpp"

#include <cmath>

#include "aklab/errors.hpp"
#include "aklab/parallel.hpp"

namespace aklab {

namespace {

double inner_std(const Mat2& gi, const Pick& X, const Pick& Y) {
    double s = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) s += gi(k, l) * (X[k] * Y[l]).trace();
    return s;
}

Pick trace_free(const Pick& A) {
    Pick out = A;
    for (int k = 0; k < 2; ++k) out[k] -= 0.5 * A[k].trace() * Mat2::Identity();
    return out;
}

VecF gradient(const TorusGrid& grid, const Scalar& u) {
    auto g = grid.grad(u);
    VecF out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = Vec2(g[0][k], g[1][k]);
    return out;
}

EndoF metric_field(const EndoF& J) {
    EndoF g(J.size());
    for (std::size_t k = 0; k < J.size(); ++k) g[k] = metric_of(J[k]);
    return g;
}

Scalar curvature_of_J(const TorusGrid& grid, const EndoF& J) {
    return gauss_curvature(grid, christoffel_from_metric(grid, metric_field(J)));
}

}  // namespace

TangentFieldState zero_tangent(const TorusGrid& g) {
    return {EndoF(g.size(), Mat2::Zero()), PickF(g.size(), Pick::zero())};
}

TangentFieldState operator+(const TangentFieldState& a, const TangentFieldState& b) {
    TangentFieldState out = a;
    for (std::size_t k = 0; k < a.Jdot.size(); ++k) {
        out.Jdot[k] += b.Jdot[k];
        out.Adot[k] = a.Adot[k] + b.Adot[k];
    }
    return out;
}

TangentFieldState operator*(double s, const TangentFieldState& a) {
    TangentFieldState out = a;
    for (std::size_t k = 0; k < a.Jdot.size(); ++k) {
        out.Jdot[k] *= s;
        out.Adot[k] = s * a.Adot[k];
    }
    return out;
}

FieldState sample_field(const TorusGrid& grid, const AnalyticPair& pair) {
    FieldState fs{grid, EndoF(grid.size()), PickF(grid.size())};
    parallel_for(grid.size(), [&](std::size_t k) {
        double x = grid.x(k), y = grid.y(k);
        fs.J[k] = pair.J(x, y);
        fs.A[k] = raise_cubic(metric_of(fs.J[k]), pair.C(x, y));
    });
    return fs;
}

Scalar sample_scalar(const TorusGrid& grid, const TrigScalar& s) {
    Scalar out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = s.value(grid.x(k), grid.y(k));
    return out;
}

VecF sample_vector_field(const TorusGrid& grid, const TrigVectorField& v) {
    VecF out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = v.value(grid.x(k), grid.y(k));
    return out;
}

PointState point_at(const FieldState& fs, std::size_t k) { return {fs.J[k], pick_to_frame(fs.J[k], fs.A[k])}; }

TangentVector tangent_at(const FieldState& fs, const TangentFieldState& t, std::size_t k) {
    return {t.Jdot[k], pick_to_frame(fs.J[k], t.Adot[k])};
}

double field_invariant_residual(const FieldState& fs) {
    double r = 0.0;
    for (std::size_t k = 0; k < fs.J.size(); ++k) r = std::max(r, point_invariant_residual(point_at(fs, k)));
    return r;
}

double tangent_field_invariant_residual(const FieldState& fs, const TangentFieldState& t) {
    double r = 0.0;
    for (std::size_t k = 0; k < fs.J.size(); ++k)
        r = std::max(r, tangent_invariant_residual(point_at(fs, k), tangent_at(fs, t, k)));
    return r;
}

Geometry christoffel_from_metric(const TorusGrid& grid, const EndoF& g) {
    const std::size_t N = grid.size();
    Geometry geo;
    geo.g = g;
    geo.gi.resize(N);
    for (std::size_t k = 0; k < N; ++k) geo.gi[k] = g[k].inverse();
    auto dg = grad_field(grid, g);  // dg[b][k](d, c) = d_b g_dc
    geo.Gam = {EndoF(N), EndoF(N)};
    for (std::size_t k = 0; k < N; ++k) {
        for (int b = 0; b < 2; ++b) {
            Mat2 G;
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c) {
                    double s = 0.0;
                    for (int d = 0; d < 2; ++d) s += geo.gi[k](a, d) * (dg[b][k](d, c) + dg[c][k](d, b) - dg[d][k](b, c));
                    G(a, c) = 0.5 * s;
                }
            geo.Gam[b][k] = G;
        }
    }
    Scalar comp(N);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < N; ++k) comp[k] = g[k](i, j);
            geo.spectral_tail = std::max(geo.spectral_tail, grid.spectral_tail(comp));
        }
    geo.smooth_warning = geo.spectral_tail > 1e-6;
    return geo;
}

Geometry christoffel_from_J(const FieldState& fs) { return christoffel_from_metric(fs.grid, metric_field(fs.J)); }

double metric_compat_residual(const TorusGrid& grid, const Geometry& geo) {
    auto dg = grad_field(grid, geo.g);
    double r = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        for (int b = 0; b < 2; ++b) {
            const Mat2& G = geo.Gam[b][k];
            Mat2 res = dg[b][k] - G.transpose() * geo.g[k] - geo.g[k] * G;
            r = std::max(r, res.cwiseAbs().maxCoeff());
        }
    return r;
}

std::array<EndoF, 2> nabla_endo(const TorusGrid& grid, const Geometry& geo, const EndoF& B) {
    auto d = grad_field(grid, B);
    for (int b = 0; b < 2; ++b)
        for (std::size_t k = 0; k < grid.size(); ++k) d[b][k] += geo.Gam[b][k] * B[k] - B[k] * geo.Gam[b][k];
    return d;
}

std::array<PickF, 2> nabla_pick(const TorusGrid& grid, const Geometry& geo, const PickF& A) {
    auto d = grad_field(grid, A);
    for (int b = 0; b < 2; ++b)
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const Mat2& G = geo.Gam[b][k];
            Pick& out = d[b][k];
            for (int s = 0; s < 2; ++s)
                out[s] += G * A[k][s] - A[k][s] * G - (G(0, s) * A[k][0] + G(1, s) * A[k][1]);
        }
    return d;
}

EndoF nabla_vec(const TorusGrid& grid, const Geometry& geo, const VecF& V) {
    auto d = grad_field(grid, V);
    EndoF M(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        for (int b = 0; b < 2; ++b) M[k].col(b) = d[b][k] + geo.Gam[b][k] * V[k];
    return M;
}

VecF div_endo(const TorusGrid& grid, const Geometry& geo, const EndoF& B) {
    auto nb = nabla_endo(grid, geo, B);
    VecF out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = (nb[0][k].row(0) + nb[1][k].row(1)).transpose();
    return out;
}

VecF div_endo(const FieldState& fs, const EndoF& B) { return div_endo(fs.grid, christoffel_from_J(fs), B); }

Scalar div_vec(const TorusGrid& grid, const Geometry& geo, const VecF& V) {
    EndoF M = nabla_vec(grid, geo, V);
    Scalar out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = M[k].trace();
    return out;
}

Scalar d_oneform(const TorusGrid& grid, const VecF& alpha) {
    const std::size_t N = grid.size();
    Scalar ax(N), ay(N);
    for (std::size_t k = 0; k < N; ++k) {
        ax[k] = alpha[k](0);
        ay[k] = alpha[k](1);
    }
    Scalar a = grid.dx(ay), b = grid.dy(ax);
    for (std::size_t k = 0; k < N; ++k) a[k] -= b[k];
    return a;
}

VecF compose(const VecF& alpha, const EndoF& B) {
    VecF out(alpha.size());
    for (std::size_t k = 0; k < alpha.size(); ++k) out[k] = B[k].transpose() * alpha[k];
    return out;
}

Scalar pair(const VecF& alpha, const VecF& V) {
    Scalar out(alpha.size());
    for (std::size_t k = 0; k < alpha.size(); ++k) out[k] = alpha[k].dot(V[k]);
    return out;
}

VecF apply(const EndoF& B, const VecF& V) {
    VecF out(V.size());
    for (std::size_t k = 0; k < V.size(); ++k) out[k] = B[k] * V[k];
    return out;
}

double max_abs(const Scalar& s) {
    double r = 0.0;
    for (double v : s) r = std::max(r, std::abs(v));
    return r;
}

double max_abs(const VecF& v) {
    double r = 0.0;
    for (const auto& x : v) r = std::max(r, x.cwiseAbs().maxCoeff());
    return r;
}

double max_abs(const EndoF& e) {
    double r = 0.0;
    for (const auto& x : e) r = std::max(r, x.cwiseAbs().maxCoeff());
    return r;
}

EndoF d_nabla_pick(const TorusGrid& grid, const Geometry& geo, const PickF& P) {
    auto nP = nabla_pick(grid, geo, P);
    EndoF out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = nP[0][k][1] - nP[1][k][0];
    return out;
}

double codazzi_residual(const FieldState& fs) {
    return max_abs(d_nabla_pick(fs.grid, christoffel_from_J(fs), fs.A));
}

Scalar gauss_curvature(const TorusGrid& grid, const Geometry& geo) {
    // R^a_{1 0 1} from the Christoffel symbols, then K = R_{1212} / det g
    auto d0 = grad_field(grid, geo.Gam[1]);
    auto d1 = grad_field(grid, geo.Gam[0]);
    Scalar K(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Mat2& G0 = geo.Gam[0][k];
        const Mat2& G1 = geo.Gam[1][k];
        Vec2 R = d0[0][k].col(1) - d1[1][k].col(1) + G0 * G1.col(1) - G1 * G0.col(1);
        K[k] = geo.g[k].row(0).dot(R) / geo.g[k].determinant();
    }
    return K;
}

Scalar gauss_curvature(const FieldState& fs) { return curvature_of_J(fs.grid, fs.J); }

EndoF advance_J(const EndoF& J, const EndoF& Jdot, double eps) {
    EndoF out(J.size());
    for (std::size_t k = 0; k < J.size(); ++k)
        out[k] = (J[k] + eps * Jdot[k]) / std::sqrt(1.0 + eps * eps * Jdot[k].determinant());
    return out;
}

Scalar curvature_variation_residual(const FieldState& fs, const EndoF& Jdot, double eps) {
    Scalar Kp = curvature_of_J(fs.grid, advance_J(fs.J, Jdot, eps));
    Scalar Km = curvature_of_J(fs.grid, advance_J(fs.J, Jdot, -eps));
    Scalar rhs = d_oneform(fs.grid, div_endo(fs, Jdot));
    Scalar out(Kp.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (Kp[k] - Km[k]) / (2.0 * eps) - 0.5 * rhs[k];
    return out;
}

TangentFieldState lie_derivative(const FieldState& fs, const VecF& X) {
    const TorusGrid& grid = fs.grid;
    Geometry geo = christoffel_from_J(fs);
    EndoF M = nabla_vec(grid, geo, X);
    auto nA = nabla_pick(grid, geo, fs.A);
    TangentFieldState out = zero_tangent(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Mat2& J = fs.J[k];
        const Mat2& Mk = M[k];
        out.Jdot[k] = J * Mk - Mk * J;
        Mat2 Ms = geo.gi[k] * Mk.transpose() * geo.g[k];
        const Pick& A = fs.A[k];
        for (int s = 0; s < 2; ++s) {
            out.Adot[k][s] = X[k](0) * nA[0][k][s] + X[k](1) * nA[1][k][s] + Mk(0, s) * A[0] + Mk(1, s) * A[1] +
                             A[s] * Mk + Ms * A[s];
        }
    }
    return out;
}

Scalar symplectic_defect(const TorusGrid& grid, const VecF& X) {
    const std::size_t N = grid.size();
    Scalar x0(N), x1(N);
    for (std::size_t k = 0; k < N; ++k) {
        x0[k] = X[k](0);
        x1[k] = X[k](1);
    }
    Scalar a = grid.dx(x0), b = grid.dy(x1);
    for (std::size_t k = 0; k < N; ++k) a[k] += b[k];
    return a;
}

TangentFieldState field_cplx_I(const FieldState& fs, const TangentFieldState& t) {
    TangentFieldState out = t;
    for (std::size_t k = 0; k < fs.J.size(); ++k) {
        out.Jdot[k] = -fs.J[k] * t.Jdot[k];
        out.Adot[k] = -t.Adot[k].right(fs.J[k]) - fs.A[k].right(t.Jdot[k]);
    }
    return out;
}

double complex_structure_lie_check(const FieldState& fs, const VecF& X, double symplectic_tol) {
    double defect = max_abs(symplectic_defect(fs.grid, X));
    if (defect > symplectic_tol)
        throw PreconditionError("complex_structure_lie_check: X is not symplectic (d(iota_X rho) = " +
                                std::to_string(defect) + ")");
    TangentFieldState I_L = field_cplx_I(fs, lie_derivative(fs, X));
    TangentFieldState L_JX = lie_derivative(fs, apply(fs.J, X));
    double r = 0.0;
    for (std::size_t k = 0; k < fs.J.size(); ++k) {
        r = std::max(r, (I_L.Jdot[k] + L_JX.Jdot[k]).cwiseAbs().maxCoeff());
        r = std::max(r, (I_L.Adot[k] + L_JX.Adot[k]).max_abs());
    }
    return r;
}

EndoF linearized_codazzi_residual(const FieldState& fs, const TangentFieldState& t) {
    const TorusGrid& grid = fs.grid;
    Geometry geo = christoffel_from_J(fs);
    PickF A0(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) A0[k] = trace_free(t.Adot[k]);
    EndoF dA0 = d_nabla_pick(grid, geo, A0);
    VecF dv = div_endo(grid, geo, t.Jdot);
    EndoF out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Mat2 wedge = dv[k](0) * fs.A[k][1] - dv[k](1) * fs.A[k][0];
        out[k] = dA0[k] - fs.J[k] * wedge;
    }
    return out;
}

ProfileValues profile_values(const ConformalProfile& prof, const FieldState& fs) {
    const std::size_t N = fs.grid.size();
    ProfileValues pv{Scalar(N), Scalar(N), Scalar(N)};
    parallel_for(N, [&](std::size_t k) {
        double t = inner_std(metric_of(fs.J[k]).inverse(), fs.A[k], fs.A[k]) / 8.0;
        FValues fv = eval_f_both(prof, t);
        pv.t[k] = t;
        pv.f[k] = fv.f;
        pv.fp[k] = fv.fp;
    });
    return pv;
}

WSystemResidual w_system_residual(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t) {
    const TorusGrid& grid = fs.grid;
    const std::size_t N = grid.size();
    Geometry geo = christoffel_from_J(fs);
    auto nA = nabla_pick(grid, geo, fs.A);
    ProfileValues pv = profile_values(prof, fs);
    Scalar fdot(N), fdot0(N);
    EndoF scaled(N);
    VecF beta(N);
    for (std::size_t k = 0; k < N; ++k) {
        Pick A0 = trace_free(t.Adot[k]);
        fdot[k] = pv.fp[k] / 4.0 * inner_std(geo.gi[k], fs.A[k], A0);
        fdot0[k] = -pv.fp[k] / 4.0 * inner_std(geo.gi[k], fs.A[k], A0.right(fs.J[k]));
        scaled[k] = (pv.f[k] - 1.0) * t.Jdot[k];
        for (int b = 0; b < 2; ++b) beta[k](b) = inner_std(geo.gi[k], nA[b][k].right(fs.J[k]), A0);
    }
    VecF dv = div_endo(grid, geo, scaled);
    VecF dfd = compose(gradient(grid, fdot), fs.J);
    VecF dfd0 = compose(gradient(grid, fdot0), fs.J);
    VecF dvJ = compose(dv, fs.J);
    VecF betaJ = compose(beta, fs.J);
    WSystemResidual w;
    w.alpha1.resize(N);
    w.alpha2.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
        w.alpha1[k] = dv[k] + dfd[k] - pv.fp[k] / 6.0 * beta[k];
        w.alpha2[k] = dvJ[k] + dfd0[k] - pv.fp[k] / 6.0 * betaJ[k];
    }
    w.d_alpha1 = d_oneform(grid, w.alpha1);
    w.d_alpha2 = d_oneform(grid, w.alpha2);
    w.codazzi = linearized_codazzi_residual(fs, t);
    w.max_d_alpha1 = max_abs(w.d_alpha1);
    w.max_d_alpha2 = max_abs(w.d_alpha2);
    w.max_codazzi = max_abs(w.codazzi);
    return w;
}

HodgeParts hodge_decompose(const TorusGrid& grid, const VecF& alpha) { return hodge_decompose_oneform(grid, alpha); }

VMembership V_membership_test(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t,
                              double tol) {
    WSystemResidual w = w_system_residual(prof, fs, t);
    HodgeParts h1 = hodge_decompose(fs.grid, w.alpha1);
    HodgeParts h2 = hodge_decompose(fs.grid, w.alpha2);
    VMembership m;
    m.harmonic1 = h1.harmonic[0].cwiseAbs().maxCoeff();
    m.harmonic2 = h2.harmonic[0].cwiseAbs().maxCoeff();
    m.codazzi = w.max_codazzi;
    m.member = m.harmonic1 <= tol && m.harmonic2 <= tol && m.codazzi <= tol;
    return m;
}

VecF hamiltonian_vector_field(const TorusGrid& grid, const Scalar& H) {
    auto g = grid.grad(H);
    VecF out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = Vec2(g[1][k], -g[0][k]);
    return out;
}

VectorFieldSplit decompose_vector_field(const TorusGrid& grid, const VecF& X) {
    VecF alpha(X.size());
    for (std::size_t k = 0; k < X.size(); ++k) alpha[k] = Vec2(-X[k](1), X[k](0));  // iota_X rho
    HodgeParts h = hodge_decompose(grid, alpha);
    VectorFieldSplit s;
    s.H_W = h.exact_potential;
    s.H_Wp = h.coexact_potential;
    s.W = hamiltonian_vector_field(grid, s.H_W);
    VecF Wp = hamiltonian_vector_field(grid, s.H_Wp);
    s.V.resize(X.size());
    s.JWp.resize(X.size());
    for (std::size_t k = 0; k < X.size(); ++k) {
        s.V[k] = Vec2(h.harmonic[k](1), -h.harmonic[k](0));
        s.JWp[k] = J0() * Wp[k];
    }
    return s;
}

MuTildeTerms moment_field_terms(const ConformalProfile& prof, const FieldState& fs) {
    const TorusGrid& grid = fs.grid;
    const std::size_t N = grid.size();
    Geometry geo = christoffel_from_J(fs);
    auto nA = nabla_pick(grid, geo, fs.A);
    Scalar K = gauss_curvature(grid, geo);
    ProfileValues pv = profile_values(prof, fs);
    MuTildeTerms m{Scalar(N), Scalar(N), Scalar(N), Scalar(N)};
    for (std::size_t k = 0; k < N; ++k) {
        Vec2 e1(1.0 / std::sqrt(geo.g[k](0, 0)), 0.0);
        Vec2 e2 = fs.J[k] * e1;
        Pick B1 = e1(0) * nA[0][k] + e1(1) * nA[1][k];
        Pick B2 = e2(0) * nA[0][k] + e2(1) * nA[1][k];
        m.cubic[k] = -pv.fp[k] / 6.0 * inner_std(geo.gi[k], B1, B2.right(fs.J[k]));
        m.curvature[k] = 2.0 * K[k] * (pv.f[k] - 1.0);
    }
    m.laplacian = d_oneform(grid, compose(gradient(grid, pv.f), fs.J));
    for (std::size_t k = 0; k < N; ++k) m.total[k] = m.cubic[k] + m.curvature[k] + m.laplacian[k] + 2.0 * prof.c;
    return m;
}

Scalar moment_field_mu_tilde(const ConformalProfile& prof, const FieldState& fs) {
    return moment_field_terms(prof, fs).total;
}

Scalar wang_bridge_rhs(const ConformalProfile& prof, const FieldState& fs) {
    const TorusGrid& grid = fs.grid;
    const std::size_t N = grid.size();
    ProfileValues pv = profile_values(prof, fs);
    Scalar F(N);
    parallel_for(N, [&](std::size_t k) { F[k] = eval_F(prof, pv.t[k]); });
    Scalar K = gauss_curvature(fs);
    // Laplace-Beltrami of F is -d(dF o J)/rho since det g_J = 1
    Scalar lapF = d_oneform(grid, compose(gradient(grid, F), fs.J));
    Scalar rhs(N);
    for (std::size_t k = 0; k < N; ++k) {
        double Kh = std::exp(-F[k]) * (K[k] + 0.5 * lapF[k]);
        double tau_h = 2.0 * pv.t[k] * std::exp(-3.0 * F[k]);
        rhs[k] = -2.0 * std::exp(F[k]) * (Kh - tau_h + 1.0);
    }
    return rhs;
}

Scalar wang_bridge_residual(const ConformalProfile& prof, const FieldState& fs) {
    Scalar mu = moment_field_mu_tilde(prof, fs);
    Scalar rhs = wang_bridge_rhs(prof, fs);
    for (std::size_t k = 0; k < mu.size(); ++k) mu[k] -= rhs[k];
    return mu;
}

VecF dmu_primitive(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t) {
    const TorusGrid& grid = fs.grid;
    const std::size_t N = grid.size();
    Geometry geo = christoffel_from_J(fs);
    auto nA = nabla_pick(grid, geo, fs.A);
    ProfileValues pv = profile_values(prof, fs);
    Scalar fdot(N);
    VecF beta(N);
    for (std::size_t k = 0; k < N; ++k) {
        Pick A0 = trace_free(t.Adot[k]);
        fdot[k] = pv.fp[k] / 4.0 * inner_std(geo.gi[k], fs.A[k], A0);
        for (int b = 0; b < 2; ++b) beta[k](b) = inner_std(geo.gi[k], nA[b][k].right(fs.J[k]), A0);
    }
    VecF dv = div_endo(grid, geo, t.Jdot);
    VecF dfJd = compose(gradient(grid, pv.f), t.Jdot);
    VecF dfdJ = compose(gradient(grid, fdot), fs.J);
    VecF P(N);
    for (std::size_t k = 0; k < N; ++k)
        P[k] = (pv.f[k] - 1.0) * dv[k] + dfJd[k] + dfdJ[k] - pv.fp[k] / 6.0 * beta[k];
    return P;
}

FieldState advance(const FieldState& fs, const TangentFieldState& t, double eps) {
    FieldState out{fs.grid, advance_J(fs.J, t.Jdot, eps), PickF(fs.A.size())};
    for (std::size_t k = 0; k < fs.A.size(); ++k) {
        Mat2 g = metric_of(fs.J[k]);
        Cubic C = lower_pick(g, fs.A[k]);
        Cubic Cd = lower_pick(g, t.Adot[k]);
        out.A[k] = raise_cubic(metric_of(out.J[k]), C + eps * Cd);
    }
    return out;
}

double dmu_fd_consistency(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t,
                          double eps) {
    Scalar mp = moment_field_mu_tilde(prof, advance(fs, t, eps));
    Scalar mm = moment_field_mu_tilde(prof, advance(fs, t, -eps));
    Scalar dP = d_oneform(fs.grid, dmu_primitive(prof, fs, t));
    double r = 0.0;
    for (std::size_t k = 0; k < mp.size(); ++k) r = std::max(r, std::abs((mp[k] - mm[k]) / (2.0 * eps) - dP[k]));
    return r;
}

Scalar pointwise_metric(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& a,
                        const TangentFieldState& b) {
    Scalar out(fs.grid.size());
    parallel_for(out.size(), [&](std::size_t k) {
        out[k] = metric_g(prof, point_at(fs, k), tangent_at(fs, a, k), tangent_at(fs, b, k));
    });
    return out;
}

Scalar pointwise_omega(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& a,
                       const TangentFieldState& b) {
    Scalar out(fs.grid.size());
    parallel_for(out.size(), [&](std::size_t k) {
        out[k] = symp_omega(prof, point_at(fs, k), tangent_at(fs, a, k), tangent_at(fs, b, k));
    });
    return out;
}

double integrate(const TorusGrid& grid, const Scalar& s) { return grid.mean(s); }

IbpResult integration_by_parts_check(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t,
                                     const VecF& V, double symplectic_tol) {
    double defect = max_abs(symplectic_defect(fs.grid, V));
    if (defect > symplectic_tol)
        throw PreconditionError("integration_by_parts_check: V is not symplectic (d(iota_V rho) = " +
                                std::to_string(defect) + ")");
    IbpResult r;
    r.lhs = integrate(fs.grid, pointwise_omega(prof, fs, lie_derivative(fs, V), t));
    // int P ^ iota_V rho = int P(V) rho
    r.rhs = -integrate(fs.grid, pair(dmu_primitive(prof, fs, t), V));
    return r;
}

WpPairing wp_pairings(const TorusGrid& grid, const EndoF& J, const EndoF& Jd1, const EndoF& Jd2) {
    Scalar om(grid.size()), gg(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        om[k] = -(Jd1[k] * J[k] * Jd2[k]).trace() / 8.0;
        gg[k] = (Jd1[k] * Jd2[k]).trace() / 8.0;
    }
    return {integrate(grid, om), integrate(grid, gg)};
}

double fuchsian_restriction_check(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t1,
                                  const TangentFieldState& t2) {
    for (const auto& A : fs.A)
        if (A.max_abs() != 0.0) throw PreconditionError("fuchsian_restriction_check: requires A = 0");
    double lhs = integrate(fs.grid, pointwise_metric(prof, fs, t1, t2));
    return std::abs(lhs - 4.0 * wp_pairings(fs.grid, fs.J, t1.Jdot, t2.Jdot).g_wp);
}

double field_hamiltonian(const ConformalProfile& prof, const FieldState& fs) {
    ProfileValues pv = profile_values(prof, fs);
    Scalar h(pv.f.size());
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = 2.0 / 3.0 * pv.f[k];
    return integrate(fs.grid, h);
}

FieldState circle_act_field(double theta, const FieldState& fs) {
    FieldState out = fs;
    double c = std::cos(theta), s = std::sin(theta);
    for (std::size_t k = 0; k < fs.A.size(); ++k) out.A[k] = c * fs.A[k] - s * fs.A[k].right(fs.J[k]);
    return out;
}

TangentFieldState field_circle_generator(const FieldState& fs) {
    TangentFieldState t = zero_tangent(fs.grid);
    for (std::size_t k = 0; k < fs.A.size(); ++k) t.Adot[k] = -fs.A[k].right(fs.J[k]);
    return t;
}

TraceLemma trace_lemma_check(const FieldState& fs, const EndoF& Jdot, const VecF& X) {
    const TorusGrid& grid = fs.grid;
    Geometry geo = christoffel_from_J(fs);
    TangentFieldState L = lie_derivative(fs, X);
    VecF dv = div_endo(grid, geo, Jdot);
    Scalar divJX = div_vec(grid, geo, apply(fs.J, X));
    Scalar divJdX = div_vec(grid, geo, apply(Jdot, X));
    TraceLemma t{Scalar(grid.size()), Scalar(grid.size()), Scalar(grid.size())};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        t.lhs[k] = 0.5 * (Jdot[k] * fs.J[k] * L.Jdot[k]).trace();
        double dvX = dv[k].dot(X[k]);
        t.literal[k] = dvX - divJX[k];
        t.jdot_form[k] = dvX - divJdX[k];
        t.literal_residual = std::max(t.literal_residual, std::abs(t.lhs[k] - t.literal[k]));
        t.jdot_residual = std::max(t.jdot_residual, std::abs(t.lhs[k] - t.jdot_form[k]));
    }
    return t;
}

TangentFieldState random_tangent(const FieldState& fs, std::uint64_t seed, double amplitude) {
    Rng rng(seed);
    TrigScalar s00 = TrigScalar::random(rng, 1, 2, amplitude);
    TrigScalar s01 = TrigScalar::random(rng, 1, 2, amplitude);
    TrigScalar s10 = TrigScalar::random(rng, 1, 2, amplitude);
    TrigScalar qre = TrigScalar::random(rng, 1, 2, amplitude);
    TrigScalar qim = TrigScalar::random(rng, 1, 2, amplitude);
    std::complex<double> q0(rng.uniform(-amplitude, amplitude), rng.uniform(-amplitude, amplitude));
    const TorusGrid& grid = fs.grid;
    TangentFieldState t = zero_tangent(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double x = grid.x(k), y = grid.y(k);
        Mat2 S;
        double a = s00.value(x, y);
        S << a, s01.value(x, y), s10.value(x, y), -a;
        const Mat2& J = fs.J[k];
        Mat2 g = metric_of(J);
        t.Jdot[k] = S * J - J * S;
        Cubic C = lower_pick(g, fs.A[k]);
        Cubic Cd;
        for (int kk = 0; kk < 2; ++kk)
            for (int i = 0; i < 2; ++i)
                for (int l = 0; l < 2; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < 2; ++m)
                        s += C[m](i, l) * S(m, kk) + C[kk](m, l) * S(m, i) + C[kk](i, m) * S(m, l);
                    Cd[kk](i, l) = -s;
                }
        std::complex<double> Q = q0 + std::complex<double>(qre.value(x, y), qim.value(x, y));
        Cd = Cd + cubic_from_coefficient(Q, holomorphic_coframe(J));
        t.Adot[k] = raise_cubic(g, Cd);
    }
    return t;
}

TangentFieldState holomorphic_tangent(const TorusGrid& grid, const WarpedTiteicaPair& pair, std::complex<double> a,
                                      std::complex<double> b) {
    TangentFieldState t = zero_tangent(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double x = grid.x(k), y = grid.y(k);
        Mat2 D = pair.jacobian(x, y);
        Mat2 g = metric_of(pair.J(x, y));
        std::array<std::complex<double>, 2> th{std::complex<double>(D(0, 0), D(1, 0)),
                                               std::complex<double>(D(0, 1), D(1, 1))};
        Mat2 q2;
        for (int l = 0; l < 2; ++l)
            for (int j = 0; j < 2; ++j) q2(l, j) = (a * th[l] * th[j]).real();
        t.Jdot[k] = g.inverse() * q2;
        t.Adot[k] = raise_cubic(g, cubic_from_coefficient(b, th));
    }
    return t;
}

}  // namespace aklab

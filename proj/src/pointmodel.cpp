#include "aklab/pointmodel.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "aklab/errors.hpp"

namespace aklab {

Pick operator+(const Pick& a, const Pick& b) { return Pick{{a[0] + b[0], a[1] + b[1]}}; }
Pick operator-(const Pick& a, const Pick& b) { return Pick{{a[0] - b[0], a[1] - b[1]}}; }
Pick operator-(const Pick& a) { return Pick{{-a[0], -a[1]}}; }
Pick operator*(double s, const Pick& a) { return Pick{{s * a[0], s * a[1]}}; }

TangentVector operator+(const TangentVector& a, const TangentVector& b) {
    return {a.Jdot + b.Jdot, a.Adot + b.Adot};
}
TangentVector operator-(const TangentVector& a, const TangentVector& b) {
    return {a.Jdot - b.Jdot, a.Adot - b.Adot};
}
TangentVector operator*(double s, const TangentVector& a) { return {s * a.Jdot, s * a.Adot}; }

double max_abs(const TangentVector& t) { return std::max(t.Jdot.cwiseAbs().maxCoeff(), t.Adot.max_abs()); }

Mat2 metric_of(const Mat2& J) { return Omega() * J; }

Mat2 frame_of(const Mat2& J) {
    Mat2 g = metric_of(J);
    Eigen::Vector2d e1(1.0 / std::sqrt(g(0, 0)), 0.0);
    Mat2 E;
    E.col(0) = e1;
    E.col(1) = J * e1;
    return E;
}

Mat2 to_frame(const Mat2& J, const Mat2& M) {
    Mat2 E = frame_of(J);
    return E.inverse() * M * E;
}

Mat2 from_frame(const Mat2& J, const Mat2& M) {
    Mat2 E = frame_of(J);
    return E * M * E.inverse();
}

Pick pick_to_frame(const Mat2& J, const Pick& Astd) {
    Mat2 E = frame_of(J);
    Mat2 Ei = E.inverse();
    Pick out;
    for (int k = 0; k < 2; ++k) out[k] = Ei * (E(0, k) * Astd[0] + E(1, k) * Astd[1]) * E;
    return out;
}

Pick pick_to_std(const Mat2& J, const Pick& Af) {
    Mat2 E = frame_of(J);
    Mat2 Ei = E.inverse();
    Pick out;
    for (int j = 0; j < 2; ++j) out[j] = E * (Ei(0, j) * Af[0] + Ei(1, j) * Af[1]) * Ei;
    return out;
}

double point_invariant_residual(const PointState& pt) {
    if (!(pt.J(1, 0) > 0.0)) return std::numeric_limits<double>::infinity();
    double r = (pt.J * pt.J + Mat2::Identity()).cwiseAbs().maxCoeff();
    const Pick& A = pt.A;
    for (int k = 0; k < 2; ++k) {
        r = std::max(r, std::abs(A[k].trace()));
        r = std::max(r, std::abs(A[k](0, 1) - A[k](1, 0)));
    }
    r = std::max(r, (A[1] - A[0] * J0()).cwiseAbs().maxCoeff());
    r = std::max(r, (A[0].col(1) - A[1].col(0)).cwiseAbs().maxCoeff());
    return r;
}

double tangent_invariant_residual(const PointState& pt, const TangentVector& t) {
    double r = (pt.J * t.Jdot + t.Jdot * pt.J).cwiseAbs().maxCoeff();
    Mat2 Jdf = to_frame(pt.J, t.Jdot);
    for (int k = 0; k < 2; ++k)
        r = std::max(r, std::abs(t.Adot[k].trace() - (J0() * pt.A[k] * Jdf).trace()));
    return r;
}

double inner_A(const Pick& X, const Pick& Y) { return (X[0] * Y[0] + X[1] * Y[1]).trace(); }

double inner_J(const Mat2& a, const Mat2& b) { return 0.5 * (a * b).trace(); }

double norm0_sq(const Pick& A) { return inner_A(A, A) / 8.0; }

double q_norm_sq(const PointState& pt) {
    double c111 = pt.A[0](0, 0);
    double c112 = pt.A[0](1, 0);
    return c111 * c111 + c112 * c112;
}

Pick TangentVector::adot_tr() const {
    Pick out;
    for (int k = 0; k < 2; ++k) out[k] = 0.5 * Adot[k].trace() * Mat2::Identity();
    return out;
}

Pick TangentVector::adot_0() const { return Adot - adot_tr(); }

Pick tangent_T(const PointState& pt, const Mat2& Jdot) {
    const Mat2 E = (Mat2() << 1.0, 0.0, 0.0, -1.0).finished();
    Mat2 M = J0() * to_frame(pt.J, Jdot) * E;
    return Pick{{pt.A[0] * M, 2.0 * pt.A[1] * M}};
}

Pick TangentVector::adot_tilde0(const PointState& pt) const { return adot_0() - tangent_T(pt, Jdot); }

Mat2 upper_transport(cplx z) {
    double x = z.real(), y = z.imag();
    if (!(y > 0.0)) throw DomainError("upper_transport: Im z must be positive");
    double sy = std::sqrt(y);
    return (Mat2() << sy, x / sy, 0.0, 1.0 / sy).finished();
}

Mat2 chart_J(cplx z) {
    double x = z.real(), y = z.imag();
    if (!(y > 0.0)) throw DomainError("chart_J: Im z must be positive");
    return (Mat2() << x, -(x * x + y * y), 1.0, -x).finished() / y;
}

namespace {

// C_{abc} = Re(wbar th_a th_b th_c) contracted to A_std[k](i,j) = sum_l Ginv(i,l) C(k,j,l)
Pick pick_from_cubic(const Mat2& Ginv, const std::array<std::array<std::array<double, 2>, 2>, 2>& C) {
    Pick A;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) A[k](i, j) = Ginv(i, 0) * C[k][j][0] + Ginv(i, 1) * C[k][j][1];
    return A;
}

using Cubic = std::array<std::array<std::array<double, 2>, 2>, 2>;

Cubic cubic_real(cplx wb, const std::array<cplx, 2>& th) {
    Cubic C;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) C[a][b][c] = (wb * th[a] * th[b] * th[c]).real();
    return C;
}

void check_det(const Mat2& P) {
    if (std::abs(P.determinant() - 1.0) > 1e-10) throw DomainError("sl2_act: det P must equal 1");
}

Pick act_pick_std(const Mat2& P, const Mat2& Pinv, const Pick& A) {
    Pick out;
    for (int k = 0; k < 2; ++k) out[k] = P * (Pinv(0, k) * A[0] + Pinv(1, k) * A[1]) * Pinv;
    return out;
}

}  // namespace

Pick chart_pick_std(cplx z, cplx w) {
    Mat2 J = chart_J(z);
    Mat2 Gi = metric_of(J).inverse();
    std::array<cplx, 2> th{cplx(1.0, 0.0), -std::conj(z)};
    return pick_from_cubic(Gi, cubic_real(std::conj(w), th));
}

PointState point_at_i(cplx w) {
    PointState pt;
    pt.J = J0();
    double u = w.real(), v = w.imag();
    pt.A[0] << u, v, v, -u;
    pt.A[1] << v, -u, -u, -v;
    return pt;
}

PointState point_from_coords(const CoordPoint& p) {
    double y = p.z.imag();
    if (!(y > 0.0)) throw DomainError("point_from_coords: Im z must be positive");
    return sl2_act(upper_transport(p.z), point_at_i(p.w * std::pow(y, 1.5)));
}

CoordPoint coords_from_point(const PointState& pt) {
    double y = 1.0 / pt.J(1, 0);
    double x = pt.J(0, 0) * y;
    cplx wi(pt.A[0](0, 0), pt.A[0](0, 1));
    return {cplx(x, y), wi / std::pow(y, 1.5)};
}

TangentVector tangent_from_coords(const CoordPoint& p, double xd, double yd, double ud, double vd) {
    double x = p.z.real(), y = p.z.imag();
    if (!(y > 0.0)) throw DomainError("tangent_from_coords: Im z must be positive");
    Mat2 J = chart_J(p.z);
    Mat2 dJx = (Mat2() << 1.0, -2.0 * x, 0.0, -1.0).finished() / y;
    Mat2 dJy = (Mat2() << 0.0, -2.0 * y, 0.0, 0.0).finished() / y - J / y;
    Mat2 Jd = xd * dJx + yd * dJy;

    std::array<cplx, 2> th{cplx(1.0, 0.0), -std::conj(p.z)};
    std::array<cplx, 2> thd{cplx(0.0, 0.0), cplx(-xd, yd)};
    cplx wb = std::conj(p.w);
    cplx wbd(ud, -vd);
    Cubic Cd;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                Cd[a][b][c] = (wbd * th[a] * th[b] * th[c] +
                               wb * (thd[a] * th[b] * th[c] + th[a] * thd[b] * th[c] + th[a] * th[b] * thd[c]))
                                  .real();
    Pick Ad_std = pick_from_cubic(metric_of(J).inverse(), Cd);
    return {Jd, pick_to_frame(J, Ad_std)};
}

TangentVector make_tangent(const PointState& pt, const Mat2& Jdot, cplx a) {
    TangentVector t;
    t.Jdot = Jdot;
    Mat2 Jdf = to_frame(pt.J, Jdot);
    Pick free;
    free[0] << a.real(), a.imag(), a.imag(), -a.real();
    free[1] = free[0] * J0();
    Pick tr;
    for (int k = 0; k < 2; ++k) tr[k] = 0.5 * (J0() * pt.A[k] * Jdf).trace() * Mat2::Identity();
    t.Adot = free + tangent_T(pt, Jdot) + tr;
    return t;
}

double metric_g(const ConformalProfile& prof, const PointState& pt, const TangentVector& t1,
                const TangentVector& t2) {
    FValues fv = eval_f_both(prof, norm0_sq(pt.A));
    return (1.0 - fv.f) * inner_J(t1.Jdot, t2.Jdot) + fv.fp / 6.0 * inner_A(t1.adot_0(), t2.adot_0()) -
           fv.fp / 12.0 * inner_A(t1.adot_tr(), t2.adot_tr());
}

TangentVector cplx_I(const PointState& pt, const TangentVector& t) {
    Mat2 Jdf = to_frame(pt.J, t.Jdot);
    return {-pt.J * t.Jdot, -t.Adot.right(J0()) - pt.A.right(Jdf)};
}

double symp_omega(const ConformalProfile& prof, const PointState& pt, const TangentVector& t1,
                  const TangentVector& t2) {
    return metric_g(prof, pt, t1, cplx_I(pt, t2));
}

PointState sl2_act(const Mat2& P, const PointState& pt) {
    check_det(P);
    Mat2 Pi = P.inverse();
    PointState out;
    out.J = P * pt.J * Pi;
    out.A = pick_to_frame(out.J, act_pick_std(P, Pi, pick_to_std(pt.J, pt.A)));
    return out;
}

TangentVector sl2_act_tangent(const Mat2& P, const PointState& pt, const TangentVector& t) {
    check_det(P);
    Mat2 Pi = P.inverse();
    Mat2 J2 = P * pt.J * Pi;
    return {P * t.Jdot * Pi, pick_to_frame(J2, act_pick_std(P, Pi, pick_to_std(pt.J, t.Adot)))};
}

TangentVector sl2_generator(const PointState& pt, const Mat2& X) {
    Pick A = pick_to_std(pt.J, pt.A);
    Mat2 Jd = X * pt.J - pt.J * X;
    Pick dA;
    for (int k = 0; k < 2; ++k) dA[k] = X * A[k] - A[k] * X - (X(0, k) * A[0] + X(1, k) * A[1]);
    Pick Ad = dA - A.left(pt.J * Jd);
    return {Jd, pick_to_frame(pt.J, Ad)};
}

double moment_hat(const ConformalProfile& prof, const PointState& pt, const Mat2& X) {
    if (std::abs(X.trace()) > 1e-12) throw DomainError("moment_hat: X must be trace-free");
    return (1.0 - eval_f(prof, norm0_sq(pt.A))) * (pt.J * X).trace();
}

PointState circle_act(double theta, const PointState& pt) {
    return {pt.J, std::cos(theta) * pt.A - std::sin(theta) * pt.A.right(J0())};
}

TangentVector circle_act_tangent(double theta, const PointState& pt, const TangentVector& t) {
    Mat2 Jdf = to_frame(pt.J, t.Jdot);
    double c = std::cos(theta), s = std::sin(theta);
    return {t.Jdot, c * t.Adot - s * (t.Adot.right(J0()) + pt.A.right(Jdf))};
}

TangentVector circle_generator(const PointState& pt) { return {Mat2::Zero(), -pt.A.right(J0())}; }

double hamiltonian_hat(const ConformalProfile& prof, const PointState& pt) {
    return 2.0 / 3.0 * eval_f(prof, norm0_sq(pt.A));
}

std::array<TangentVector, 4> coord_basis(const CoordPoint& p) {
    return {tangent_from_coords(p, 1, 0, 0, 0), tangent_from_coords(p, 0, 1, 0, 0),
            tangent_from_coords(p, 0, 0, 1, 0), tangent_from_coords(p, 0, 0, 0, 1)};
}

Mat4 gram_matrix(const ConformalProfile& prof, const CoordPoint& p) {
    PointState pt = point_from_coords(p);
    auto T = coord_basis(p);
    FValues fv = eval_f_both(prof, norm0_sq(pt.A));
    Mat4 G;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            G(a, b) = (1.0 - fv.f) * inner_J(T[a].Jdot, T[b].Jdot) +
                      fv.fp / 6.0 * inner_A(T[a].adot_0(), T[b].adot_0()) -
                      fv.fp / 12.0 * inner_A(T[a].adot_tr(), T[b].adot_tr());
    return G;
}

Mat4 omega_matrix(const ConformalProfile& prof, const CoordPoint& p) {
    PointState pt = point_from_coords(p);
    auto T = coord_basis(p);
    FValues fv = eval_f_both(prof, norm0_sq(pt.A));
    Mat4 W;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            TangentVector It = cplx_I(pt, T[b]);
            W(a, b) = (1.0 - fv.f) * inner_J(T[a].Jdot, It.Jdot) +
                      fv.fp / 6.0 * inner_A(T[a].adot_0(), It.adot_0()) -
                      fv.fp / 12.0 * inner_A(T[a].adot_tr(), It.adot_tr());
        }
    }
    return W;
}

GramSignature gram_signature(const ConformalProfile& prof, const CoordPoint& p, double threshold) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(gram_matrix(prof, p), Eigen::EigenvaluesOnly);
    GramSignature s;
    s.min_abs_eig = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        double e = es.eigenvalues()(i);
        s.min_abs_eig = std::min(s.min_abs_eig, std::abs(e));
        if (e > threshold) ++s.n_plus;
        else if (e < -threshold) ++s.n_minus;
        else s.degenerate = true;
    }
    return s;
}

GramSignature gram_signature(const ConformalProfile& prof, const PointState& pt, double threshold) {
    return gram_signature(prof, coords_from_point(pt), threshold);
}

double omega_closedness_residual(const ConformalProfile& prof, const CoordPoint& p, double h, int order) {
    if (!(h > 0.0)) throw DomainError("omega_closedness_residual: h must be positive");
    if (order != 2 && order != 4) throw DomainError("omega_closedness_residual: order must be 2 or 4");
    auto shifted = [&](int a, double s) {
        double step[4] = {0, 0, 0, 0};
        step[a] = s;
        return omega_matrix(prof, CoordPoint{p.z + cplx(step[0], step[1]), p.w + cplx(step[2], step[3])});
    };
    std::array<Mat4, 4> dW;
    for (int a = 0; a < 4; ++a) {
        if (order == 2)
            dW[a] = (shifted(a, h) - shifted(a, -h)) / (2.0 * h);
        else
            dW[a] = (8.0 * (shifted(a, h) - shifted(a, -h)) - (shifted(a, 2 * h) - shifted(a, -2 * h))) / (12.0 * h);
    }
    double r = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) r = std::max(r, std::abs(dW[a](b, c) + dW[b](c, a) + dW[c](a, b)));
    return r;
}

}  // namespace aklab

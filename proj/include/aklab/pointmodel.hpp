#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "aklab/scalarfuncs.hpp"

namespace aklab {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using cplx = std::complex<double>;

// Endomorphism-valued 1-form on R^2: m[k] = A(v_k) for a basis (v_0, v_1).
// Eight contiguous doubles, which the field code relies on.
struct Pick {
    std::array<Mat2, 2> m{Mat2::Zero(), Mat2::Zero()};

    Mat2& operator[](int k) { return m[k]; }
    const Mat2& operator[](int k) const { return m[k]; }

    static Pick zero() { return Pick{}; }
    double max_abs() const { return std::max(m[0].cwiseAbs().maxCoeff(), m[1].cwiseAbs().maxCoeff()); }
    // Right multiplication of every slot: A(.) M
    Pick right(const Mat2& M) const { return Pick{{m[0] * M, m[1] * M}}; }
    Pick left(const Mat2& M) const { return Pick{{M * m[0], M * m[1]}}; }
};

Pick operator+(const Pick& a, const Pick& b);
Pick operator-(const Pick& a, const Pick& b);
Pick operator-(const Pick& a);
Pick operator*(double s, const Pick& a);

inline const Mat2& J0() {
    static const Mat2 j = (Mat2() << 0.0, -1.0, 1.0, 0.0).finished();
    return j;
}
// Area form rho_0 = dx ^ dy as a matrix: rho_0(u, v) = u^T Omega v.
inline const Mat2& Omega() {
    static const Mat2 o = (Mat2() << 0.0, 1.0, -1.0, 0.0).finished();
    return o;
}

// A is stored in the g_J-orthonormal frame e1 = d_x/|d_x|, e2 = J e1.
struct PointState {
    Mat2 J = J0();
    Pick A;
};

// Jdot in standard coordinates, Adot in the same frame as A.
struct TangentVector {
    Mat2 Jdot = Mat2::Zero();
    Pick Adot;

    Pick adot_tr() const;
    Pick adot_0() const;
    Pick adot_tilde0(const PointState& pt) const;
};

TangentVector operator+(const TangentVector& a, const TangentVector& b);
TangentVector operator-(const TangentVector& a, const TangentVector& b);
TangentVector operator*(double s, const TangentVector& a);
double max_abs(const TangentVector& t);

struct CoordPoint {
    cplx z{0.0, 1.0};
    cplx w{0.0, 0.0};
};

Mat2 metric_of(const Mat2& J);
Mat2 frame_of(const Mat2& J);
Mat2 to_frame(const Mat2& J, const Mat2& M);
Mat2 from_frame(const Mat2& J, const Mat2& M);
Pick pick_to_frame(const Mat2& J, const Pick& Astd);
Pick pick_to_std(const Mat2& J, const Pick& Aframe);

// Returns the largest deviation from the PointState invariants.
double point_invariant_residual(const PointState& pt);
// Largest deviation of anticommutation and the trace condition tr Adot(X) = tr(J A(X) Jdot).
double tangent_invariant_residual(const PointState& pt, const TangentVector& t);

double inner_A(const Pick& X, const Pick& Y);
double inner_J(const Mat2& Jd1, const Mat2& Jd2);
double norm0_sq(const Pick& A);
// ||q||^2 for the cubic form C = g_J A, from its holomorphic coefficient.
double q_norm_sq(const PointState& pt);

// T(J, A, Jdot) = A1 J Jdot E e1* + 2 A2 J Jdot E e2*, E = diag(1,-1), in the frame.
Pick tangent_T(const PointState& pt, const Mat2& Jdot);

Mat2 upper_transport(cplx z);
Mat2 chart_J(cplx z);
Pick chart_pick_std(cplx z, cplx w);
PointState point_at_i(cplx w);
PointState point_from_coords(const CoordPoint& p);
CoordPoint coords_from_point(const PointState& pt);
TangentVector tangent_from_coords(const CoordPoint& p, double xd, double yd, double ud, double vd);
// Valid tangent from Jdot (std coordinates, anticommuting with J) and the free coefficient of Adot_tilde0.
TangentVector make_tangent(const PointState& pt, const Mat2& Jdot, cplx adot_free);

double metric_g(const ConformalProfile& prof, const PointState& pt, const TangentVector& t1, const TangentVector& t2);
TangentVector cplx_I(const PointState& pt, const TangentVector& t);
double symp_omega(const ConformalProfile& prof, const PointState& pt, const TangentVector& t1, const TangentVector& t2);

PointState sl2_act(const Mat2& P, const PointState& pt);
TangentVector sl2_act_tangent(const Mat2& P, const PointState& pt, const TangentVector& t);
// d/ds exp(sX).pt at s = 0
TangentVector sl2_generator(const PointState& pt, const Mat2& X);
double moment_hat(const ConformalProfile& prof, const PointState& pt, const Mat2& X);

PointState circle_act(double theta, const PointState& pt);
TangentVector circle_act_tangent(double theta, const PointState& pt, const TangentVector& t);
TangentVector circle_generator(const PointState& pt);
double hamiltonian_hat(const ConformalProfile& prof, const PointState& pt);

// Coordinate basis (xdot, ydot, udot, vdot) of the chart.
std::array<TangentVector, 4> coord_basis(const CoordPoint& p);
Mat4 gram_matrix(const ConformalProfile& prof, const CoordPoint& p);
Mat4 omega_matrix(const ConformalProfile& prof, const CoordPoint& p);

struct GramSignature {
    int n_plus = 0;
    int n_minus = 0;
    bool degenerate = false;
    double min_abs_eig = 0.0;
};
GramSignature gram_signature(const ConformalProfile& prof, const CoordPoint& p, double threshold = 1e-10);
GramSignature gram_signature(const ConformalProfile& prof, const PointState& pt, double threshold = 1e-10);

// Central differences of second order by default; order 4 uses the five-point stencil.
double omega_closedness_residual(const ConformalProfile& prof, const CoordPoint& p, double h, int order = 2);

}  // namespace aklab

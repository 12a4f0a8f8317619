#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "aklab/pointmodel.hpp"
#include "aklab/scenarios.hpp"
#include "aklab/torus.hpp"

namespace aklab {

using VecF = std::vector<Vec2>;  // vector fields and 1-forms (components in dx, dy)
using EndoF = std::vector<Mat2>;
using PickF = std::vector<Pick>;

// Field data in standard coordinates: A[k] = A(d_k). Per node, pick_to_frame
// gives the PointState representation used by the point model.
struct FieldState {
    TorusGrid grid;
    EndoF J;
    PickF A;
};

// Jdot and Adot = g_J^{-1} Cdot, standard coordinates.
struct TangentFieldState {
    EndoF Jdot;
    PickF Adot;
};

TangentFieldState zero_tangent(const TorusGrid& g);
TangentFieldState operator+(const TangentFieldState& a, const TangentFieldState& b);
TangentFieldState operator*(double s, const TangentFieldState& a);

FieldState sample_field(const TorusGrid& grid, const AnalyticPair& pair);
Scalar sample_scalar(const TorusGrid& grid, const TrigScalar& s);
VecF sample_vector_field(const TorusGrid& grid, const TrigVectorField& v);

PointState point_at(const FieldState& fs, std::size_t k);
TangentVector tangent_at(const FieldState& fs, const TangentFieldState& t, std::size_t k);
double field_invariant_residual(const FieldState& fs);
double tangent_field_invariant_residual(const FieldState& fs, const TangentFieldState& t);

// Levi-Civita data of g_J = rho(., J.). Gam[b](a, c) = Gamma^a_{bc}.
struct Geometry {
    EndoF g, gi;
    std::array<EndoF, 2> Gam;
    double spectral_tail = 0.0;
    bool smooth_warning = false;
};

Geometry christoffel_from_metric(const TorusGrid& grid, const EndoF& g);
Geometry christoffel_from_J(const FieldState& fs);
// max |nabla g|
double metric_compat_residual(const TorusGrid& grid, const Geometry& geo);

std::array<EndoF, 2> nabla_endo(const TorusGrid& grid, const Geometry& geo, const EndoF& B);
std::array<PickF, 2> nabla_pick(const TorusGrid& grid, const Geometry& geo, const PickF& A);
// M(a, b) = nabla_b V^a
EndoF nabla_vec(const TorusGrid& grid, const Geometry& geo, const VecF& V);

VecF div_endo(const TorusGrid& grid, const Geometry& geo, const EndoF& B);
VecF div_endo(const FieldState& fs, const EndoF& B);
Scalar div_vec(const TorusGrid& grid, const Geometry& geo, const VecF& V);
// d alpha / rho
Scalar d_oneform(const TorusGrid& grid, const VecF& alpha);
// (alpha o B)_j = alpha_i B^i_j
VecF compose(const VecF& alpha, const EndoF& B);
Scalar pair(const VecF& alpha, const VecF& V);
VecF apply(const EndoF& B, const VecF& V);
double max_abs(const Scalar& s);
double max_abs(const VecF& v);
double max_abs(const EndoF& e);

// (d^nabla P)(d_x, d_y) per node; equals the value on (e1, e2) since det g_J = 1.
EndoF d_nabla_pick(const TorusGrid& grid, const Geometry& geo, const PickF& P);
double codazzi_residual(const FieldState& fs);

Scalar gauss_curvature(const TorusGrid& grid, const Geometry& geo);
Scalar gauss_curvature(const FieldState& fs);
// J_eps = (J + eps Jdot) / sqrt(1 + eps^2 det Jdot)
EndoF advance_J(const EndoF& J, const EndoF& Jdot, double eps);
// Pointwise difference of the central-difference variation of K and 1/2 d(div Jdot)/rho
Scalar curvature_variation_residual(const FieldState& fs, const EndoF& Jdot, double eps);

TangentFieldState lie_derivative(const FieldState& fs, const VecF& X);
// Flat divergence of X, i.e. d(iota_X rho)/rho
Scalar symplectic_defect(const TorusGrid& grid, const VecF& X);
double complex_structure_lie_check(const FieldState& fs, const VecF& X, double symplectic_tol = 1e-8);
TangentFieldState field_cplx_I(const FieldState& fs, const TangentFieldState& t);

EndoF linearized_codazzi_residual(const FieldState& fs, const TangentFieldState& t);

struct WSystemResidual {
    VecF alpha1, alpha2;
    Scalar d_alpha1, d_alpha2;
    EndoF codazzi;
    double max_d_alpha1 = 0.0, max_d_alpha2 = 0.0, max_codazzi = 0.0;
};
WSystemResidual w_system_residual(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t);

HodgeParts hodge_decompose(const TorusGrid& grid, const VecF& alpha);

struct VMembership {
    bool member = false;
    double harmonic1 = 0.0, harmonic2 = 0.0, codazzi = 0.0;
};
VMembership V_membership_test(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t,
                              double tol);

// X = V + W + J0 W', V constant, W and W' Hamiltonian (flat reference structure).
struct VectorFieldSplit {
    VecF V, W, JWp;
    Scalar H_W, H_Wp;
};
VectorFieldSplit decompose_vector_field(const TorusGrid& grid, const VecF& X);
VecF hamiltonian_vector_field(const TorusGrid& grid, const Scalar& H);

struct MuTildeTerms {
    Scalar cubic;      // -(f'/6) <nabla_e1 A, (nabla_e2 A) J>
    Scalar curvature;  // 2 K (f - 1)
    Scalar laplacian;  // d(df o J)
    Scalar total;      // sum + 2c
};
MuTildeTerms moment_field_terms(const ConformalProfile& prof, const FieldState& fs);
Scalar moment_field_mu_tilde(const ConformalProfile& prof, const FieldState& fs);
// The right side -2 e^F (K_h - ||tau||_h^2 + 1) on its own.
Scalar wang_bridge_rhs(const ConformalProfile& prof, const FieldState& fs);
Scalar wang_bridge_residual(const ConformalProfile& prof, const FieldState& fs);

// Per-node norm0_sq(A), f and f' at that value.
struct ProfileValues {
    Scalar t, f, fp;
};
ProfileValues profile_values(const ConformalProfile& prof, const FieldState& fs);

VecF dmu_primitive(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t);
// (J, C) -> (J_eps, C + eps Cdot) with Cdot = g_J Adot lowered
FieldState advance(const FieldState& fs, const TangentFieldState& t, double eps);
// max |(mu(+eps) - mu(-eps)) / 2eps - d(primitive)|
double dmu_fd_consistency(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t, double eps);

struct IbpResult {
    double lhs = 0.0, rhs = 0.0;
};
IbpResult integration_by_parts_check(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t,
                                     const VecF& V, double symplectic_tol = 1e-8);

Scalar pointwise_metric(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& a,
                        const TangentFieldState& b);
Scalar pointwise_omega(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& a,
                       const TangentFieldState& b);
double integrate(const TorusGrid& grid, const Scalar& s);

struct WpPairing {
    double omega_wp = 0.0, g_wp = 0.0;
};
WpPairing wp_pairings(const TorusGrid& grid, const EndoF& J, const EndoF& Jd1, const EndoF& Jd2);
// |int g_hat(t1, t2) - 4 g_wp(Jd1, Jd2)|, requires A = 0
double fuchsian_restriction_check(const ConformalProfile& prof, const FieldState& fs, const TangentFieldState& t1,
                                  const TangentFieldState& t2);

double field_hamiltonian(const ConformalProfile& prof, const FieldState& fs);
FieldState circle_act_field(double theta, const FieldState& fs);
TangentFieldState field_circle_generator(const FieldState& fs);

struct TraceLemma {
    Scalar lhs;        // 1/2 tr(Jdot J L_X J)
    Scalar literal;    // (div Jdot)(X) - div(J X)
    Scalar jdot_form;  // (div Jdot)(X) - div(Jdot X)
    double literal_residual = 0.0, jdot_residual = 0.0;
};
TraceLemma trace_lemma_check(const FieldState& fs, const EndoF& Jdot, const VecF& X);

// Tangent of the pointwise action of a random smooth sl2 field plus a random fibre direction.
TangentFieldState random_tangent(const FieldState& fs, std::uint64_t seed, double amplitude);
// Jdot = g^{-1} Re(a th^2), Adot = g^{-1} Re(b th^3) with th the pulled-back dz of a warped pair.
TangentFieldState holomorphic_tangent(const TorusGrid& grid, const WarpedTiteicaPair& pair, std::complex<double> a,
                                      std::complex<double> b);

}  // namespace aklab

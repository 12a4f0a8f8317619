#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aklab {

using cplx = std::complex<double>;
using Mat3c = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3d;

// Blaschke metric e^psi |dz|^2 and cubic differential Q dz^3 on a planar domain,
// with the derivatives the connection needs given analytically.
class SurfaceData {
public:
    virtual ~SurfaceData() = default;
    virtual double psi(cplx z) const = 0;
    virtual cplx psi_z(cplx z) const = 0;
    virtual double psi_zzbar(cplx z) const = 0;
    virtual cplx Q(cplx z) const = 0;
    virtual cplx Q_zbar(cplx z) const = 0;
    virtual std::string name() const = 0;
};

// Titeica data reparametrised by the holomorphic map phi(z) = z + beta z^2:
// Q = Q0 phi'^3, psi = (2/3) ln|Q0| + 2 ln|phi'|.
class TiteicaData : public SurfaceData {
public:
    explicit TiteicaData(cplx Q0, cplx beta = 0.0);
    double psi(cplx z) const override;
    cplx psi_z(cplx z) const override;
    double psi_zzbar(cplx) const override { return 0.0; }
    cplx Q(cplx z) const override;
    cplx Q_zbar(cplx) const override { return 0.0; }
    std::string name() const override { return "titeica"; }

private:
    cplx Q0_, beta_;
};

// Q = 0 and e^psi = 4|g'|^2 / (1 - |g|^2)^2 for g(z) = alpha z + gamma z^2.
class LiouvilleData : public SurfaceData {
public:
    LiouvilleData(cplx alpha, cplx gamma);
    double psi(cplx z) const override;
    cplx psi_z(cplx z) const override;
    double psi_zzbar(cplx z) const override;
    cplx Q(cplx) const override { return 0.0; }
    cplx Q_zbar(cplx) const override { return 0.0; }
    std::string name() const override { return "liouville"; }

private:
    cplx alpha_, gamma_;
};

// psi shifted by a constant; off-shell whenever the base is on-shell.
class ShiftedPsiData : public SurfaceData {
public:
    ShiftedPsiData(std::shared_ptr<const SurfaceData> base, double delta) : base_(std::move(base)), delta_(delta) {}
    double psi(cplx z) const override { return base_->psi(z) + delta_; }
    cplx psi_z(cplx z) const override { return base_->psi_z(z); }
    double psi_zzbar(cplx z) const override { return base_->psi_zzbar(z); }
    cplx Q(cplx z) const override { return base_->Q(z); }
    cplx Q_zbar(cplx z) const override { return base_->Q_zbar(z); }
    std::string name() const override { return base_->name() + "+shift"; }

private:
    std::shared_ptr<const SurfaceData> base_;
    double delta_;
};

// Titeica psi of Q0 with Q = Q0 + kappa conj(z), so dQ/dzbar = kappa.
class NonHolomorphicQData : public SurfaceData {
public:
    NonHolomorphicQData(cplx Q0, cplx kappa) : base_(Q0), Q0_(Q0), kappa_(kappa) {}
    double psi(cplx z) const override { return base_.psi(z); }
    cplx psi_z(cplx z) const override { return base_.psi_z(z); }
    double psi_zzbar(cplx) const override { return 0.0; }
    cplx Q(cplx z) const override { return Q0_ + kappa_ * std::conj(z); }
    cplx Q_zbar(cplx) const override { return kappa_; }
    std::string name() const override { return "non-holomorphic-Q"; }

private:
    TiteicaData base_;
    cplx Q0_, kappa_;
};

// Frame rows (f_z, f_zbar, f): F_z = A F, F_zbar = B F.
struct ConnectionPair {
    Mat3c A, B;
};
ConnectionPair connection_matrices(const SurfaceData& d, cplx z);
// A_zbar - B_z + [A, B] with analytic derivatives of A and B.
Mat3c curvature_matrix(const SurfaceData& d, cplx z);
double curvature_residual(const SurfaceData& d, cplx z);
double curvature_residual(const SurfaceData& d, const std::vector<cplx>& points);
// Residuals of psi_zzbar + |Q|^2 e^{-2psi}/2 - e^psi/2 and |Q_zbar|.
double integrability_residual(const SurfaceData& d, cplx z);

struct FrameState {
    Mat3c F;

    Vec3 position() const;
    // (f_x, f_y, f) as rows; f_x = f_z + f_zbar, f_y = i (f_z - f_zbar).
    Eigen::Matrix3d real_frame() const;
    // max of |f_zbar - conj(f_z)| and |Im f|
    double reality_defect() const;
    // Throws PreconditionError unless the reality defect is below tol and the real frame is nondegenerate.
    void validate(double tol = 1e-10) const;
};

// f_z = e^{psi0/2}/2 (1, -i, 0), f_zbar = conj(f_z), f = (0, 0, 1).
FrameState canonical_frame(double psi0);

struct IntegrationResult {
    FrameState end;
    // Largest reality defect plus the deviation of det F from det F0 e^{psi - psi0} seen along the path.
    double drift = 0.0;
    int steps = 0;
};

// RK4 along the polyline, each segment split into steps no longer than max_step.
// Throws NumericalError when the drift exceeds 1e-6.
IntegrationResult integrate_frame(const SurfaceData& d, const FrameState& F0, const std::vector<cplx>& path,
                                  double max_step = 1.0 / 256.0);
// || F_end F_start^{-1} - I || around a closed polyline.
double holonomy_deviation(const SurfaceData& d, const FrameState& F0, const std::vector<cplx>& loop,
                          double max_step = 1.0 / 256.0);
// Difference between the x-then-y and y-then-x integrations from z0 to z1.
double path_independence(const SurfaceData& d, const FrameState& F0, cplx z0, cplx z1,
                         double max_step = 1.0 / 256.0);

// For constant Q: exact F(x + iy) = exp(x (A + B) + i y (A - B)) F0.
FrameState exact_titeica_frame(cplx Q, cplx z);
struct Rk4OrderResult {
    std::vector<double> steps, errors;
    double observed_order = 0.0;
};
// Errors against the exact frame for each step; the drift guard is not applied so coarse steps can be measured.
Rk4OrderResult rk4_order(cplx Q, cplx z_end, const std::vector<double>& steps);

struct TiteicaMesh {
    cplx Q;
    double psi = 0.0;
    double extent = 0.0, spacing = 0.0;
    int side = 0;               // points per side
    std::vector<Vec3> points;   // index i * side + j, node (x_i, y_j)
    double max_drift = 0.0;
    double coord(int i) const { return -extent + spacing * i; }
    const Vec3& at(int i, int j) const { return points[static_cast<std::size_t>(i) * side + j]; }
};
// Samples f over [-extent, extent]^2 with the given spacing, integrating from the origin
// along the x axis and then vertically, starting at the canonical frame.
TiteicaMesh titeica_immersion(cplx Q, double extent, double spacing, double max_step = 1.0 / 256.0);

struct TiteicaHooks {
    double xi_residual = 0.0;        // max |xi - f| / |f|, xi = e^{-psi}/2 (f_xx + f_yy)
    double blaschke_residual = 0.0;  // max |h_ij - e^psi delta_ij| / e^psi
    double min_transversality = 0.0; // min |det(f_x, f_y, f)| over the interior
};
// Finite differences of fourth order on the interior (two-node margin).
TiteicaHooks titeica_hooks(const TiteicaMesh& mesh);

// The ordering convention used by the connection, for reports.
std::string frame_convention();

}  // namespace aklab

#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "aklab/errors.hpp"
#include "aklab/framesphere.hpp"
#include "aklab/scenarios.hpp"

using namespace aklab;

namespace {

double frame_diff(const FrameState& a, const FrameState& b) { return (a.F - b.F).cwiseAbs().maxCoeff(); }

std::vector<cplx> random_points(Rng& rng, int n, double r) {
    std::vector<cplx> pts;
    for (int k = 0; k < n; ++k) pts.emplace_back(rng.uniform(-r, r), rng.uniform(-r, r));
    return pts;
}

}  // namespace

TEST(FrameSphere, TiteicaConnectionIsFlat) {
    Rng rng(1);
    for (cplx Q : {cplx(1.0, 0.0), cplx(0.3, -2.0), cplx(-4.0, 1.0)}) {
        TiteicaData d(Q);
        EXPECT_NEAR(std::exp(3 * d.psi(0.0)), std::norm(Q), 1e-12 * std::norm(Q));
        EXPECT_LE(curvature_residual(d, random_points(rng, 20, 2.0)), 1e-12);
    }
}

TEST(FrameSphere, ZeroCurvatureIffIntegrable) {
    Rng rng(2);
    int checked = 0;
    for (int k = 0; k < 50; ++k) {
        std::shared_ptr<const SurfaceData> d;
        if (k % 2 == 0)
            d = std::make_shared<TiteicaData>(cplx(rng.uniform(-2, 2), rng.uniform(-2, 2)),
                                              cplx(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)));
        else
            d = std::make_shared<LiouvilleData>(cplx(rng.uniform(0.5, 1.0), rng.uniform(-0.3, 0.3)),
                                                cplx(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)));
        auto pts = random_points(rng, 10, 0.3);
        ShiftedPsiData off(d, 0.01);
        for (cplx z : pts) {
            EXPECT_LE(integrability_residual(*d, z), 1e-10);
            EXPECT_LE(curvature_residual(*d, z), 1e-10);
            EXPECT_GE(integrability_residual(off, z), 1e-3);
            EXPECT_GE(curvature_residual(off, z), 1e-3);
            ++checked;
        }
    }
    EXPECT_EQ(checked, 500);
    NonHolomorphicQData nh(1.0, 0.05);
    EXPECT_GE(curvature_residual(nh, cplx(0.1, 0.2)), 1e-3);
    EXPECT_NEAR(integrability_residual(nh, cplx(0.1, 0.2)), 0.05, 1e-3);
}

TEST(FrameSphere, CanonicalFrameAndValidation) {
    FrameState F = canonical_frame(0.3);
    EXPECT_NO_THROW(F.validate());
    EXPECT_LE(F.reality_defect(), 1e-15);
    EXPECT_LE((F.position() - Vec3(0, 0, 1)).norm(), 1e-15);
    FrameState bad = F;
    bad.F(2, 0) += cplx(0.0, 1e-3);
    EXPECT_THROW(bad.validate(), PreconditionError);
    EXPECT_FALSE(frame_convention().empty());
}

TEST(FrameSphere, IntegrationMatchesExactTiteicaFrame) {
    const cplx Q(1.0, 0.5);
    TiteicaData d(Q);
    FrameState F0 = canonical_frame(d.psi(0.0));
    EXPECT_LE(frame_diff(integrate_frame(d, F0, {0.0}).end, F0), 0.0);
    EXPECT_LE(frame_diff(integrate_frame(d, F0, {0.4, 0.4}).end, F0), 0.0);
    EXPECT_EQ(frame_diff(exact_titeica_frame(Q, 0.0), F0), 0.0);
    for (cplx z : {cplx(0.7, 0.0), cplx(0.0, -0.6), cplx(0.5, 0.5)}) {
        IntegrationResult r = integrate_frame(d, F0, {0.0, z.real(), z});
        EXPECT_LE(frame_diff(r.end, exact_titeica_frame(Q, z)), 1e-9) << z;
        EXPECT_LE(r.drift, 1e-8);
    }
}

TEST(FrameSphere, HolonomyAndPathIndependence) {
    TiteicaData t(1.0);
    EXPECT_LE(holonomy_deviation(t, canonical_frame(t.psi(0.0)), {0.0, 1.0, cplx(1, 1), cplx(0, 1), 0.0}), 1e-6);
    LiouvilleData l(cplx(0.7, 0.1), cplx(0.1, -0.1));
    FrameState Fl = canonical_frame(l.psi(0.0));
    EXPECT_LE(holonomy_deviation(l, Fl, {0.0, 0.5, cplx(0.5, 0.5), cplx(0, 0.5), 0.0}), 1e-6);
    EXPECT_LE(path_independence(l, Fl, 0.0, cplx(0.4, 0.3)), 1e-6);
    // An off-shell connection is not flat, so the loop does not close.
    ShiftedPsiData off(std::make_shared<TiteicaData>(1.0), 0.01);
    EXPECT_GE(holonomy_deviation(off, canonical_frame(off.psi(0.0)), {0.0, 1.0, cplx(1, 1), cplx(0, 1), 0.0}), 1e-4);
}

TEST(FrameSphere, RungeKuttaFourthOrder) {
    Rk4OrderResult r = rk4_order(1.0, cplx(1.0, 0.5), {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64});
    EXPECT_NEAR(r.observed_order, 4.0, 0.3);
    for (std::size_t k = 1; k < r.errors.size(); ++k) EXPECT_LT(r.errors[k], r.errors[k - 1]);
}

TEST(FrameSphere, DriftGuardAndPreconditions) {
    TiteicaData d(8.0);
    EXPECT_THROW(integrate_frame(d, canonical_frame(d.psi(0.0)), {0.0, 2.0}, 0.5), NumericalError);
    EXPECT_THROW(integrate_frame(d, canonical_frame(d.psi(0.0)), {0.0, 1.0}, 0.0), PreconditionError);
    EXPECT_THROW(TiteicaData(0.0), DomainError);
    EXPECT_THROW(titeica_immersion(0.0, 1.0, 0.1), DomainError);
}

TEST(FrameSphere, TiteicaImmersionHooks) {
    TiteicaMesh m = titeica_immersion(1.0, 1.0, 1.0 / 32);
    TiteicaHooks h = titeica_hooks(m);
    EXPECT_LE(m.max_drift, 1e-8);
    EXPECT_LE(h.xi_residual, 1e-5);
    EXPECT_LE(h.blaschke_residual, 1e-5);
    EXPECT_GT(h.min_transversality, 1e-6);
}

TEST(FrameSphere, TiteicaSurfaceIsALevelSetOfACubic) {
    // With constant data F(x, y) = exp(x M1 + y M2) F0 for commuting M1 = A + B, M2 = i(A - B) of zero trace.
    // In the common eigenbasis the position has coordinates e^{l_k(x, y)} whose product is 1.
    const cplx Q(1.0, 0.0);
    TiteicaData d(Q);
    ConnectionPair cp = connection_matrices(d, 0.0);
    Mat3c M1 = cp.A + cp.B, M2 = cplx(0, 1) * (cp.A - cp.B);
    ASSERT_LE((M1 * M2 - M2 * M1).cwiseAbs().maxCoeff(), 1e-12);
    // M1 alone has a repeated eigenvalue; a generic combination has the common eigenbasis.
    Eigen::ComplexEigenSolver<Mat3c> es(M1 + 0.37 * M2);
    Mat3c R = es.eigenvectors(), L = R.inverse();
    FrameState F0 = canonical_frame(d.psi(0.0));
    Mat3c W;
    for (int k = 0; k < 3; ++k) W.col(k) = (R(2, k) * (L.row(k) * F0.F)).transpose();
    Mat3c Wi = W.inverse();
    TiteicaMesh m = titeica_immersion(Q, 1.0, 1.0 / 16);
    double err = 0.0;
    for (const Vec3& p : m.points) {
        Eigen::Vector3cd a = Wi * p.cast<cplx>();
        err = std::max(err, std::abs(a(0) * a(1) * a(2) - 1.0));
    }
    EXPECT_LE(err, 1e-8);
}

TEST(FrameSphere, MirrorAndScalingSymmetry) {
    const cplx Q(1.0, 0.4);
    TiteicaMesh m = titeica_immersion(Q, 0.5, 1.0 / 16), mc = titeica_immersion(std::conj(Q), 0.5, 1.0 / 16);
    double mir = 0.0;
    for (int i = 0; i < m.side; ++i)
        for (int j = 0; j < m.side; ++j) {
            Vec3 b = m.at(i, m.side - 1 - j);
            b(1) = -b(1);
            mir = std::max(mir, (mc.at(i, j) - b).norm());
        }
    EXPECT_LE(mir, 1e-9);
    const double lam = 1.5;
    TiteicaMesh ms = titeica_immersion(lam * lam * lam * Q, 0.5 / lam, 1.0 / 16 / lam, 1.0 / 256 / lam);
    EXPECT_NEAR(ms.psi - m.psi, 2.0 * std::log(lam), 1e-12);
    double sc = 0.0;
    for (std::size_t k = 0; k < m.points.size(); ++k) sc = std::max(sc, (ms.points[k] - m.points[k]).norm());
    EXPECT_LE(sc, 1e-8);
}

#include "aklab/framesphere.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "aklab/errors.hpp"
#include "aklab/parallel.hpp"

namespace aklab {

namespace {
const double a_coef = 1.0 / std::sqrt(2.0);
const cplx I1(0.0, 1.0);

double titeica_psi(cplx Q) { return 2.0 / 3.0 * std::log(std::abs(Q)); }
}  // namespace

TiteicaData::TiteicaData(cplx Q0, cplx beta) : Q0_(Q0), beta_(beta) {
    if (Q0 == 0.0) throw DomainError("TiteicaData: Q0 must be nonzero");
}

double TiteicaData::psi(cplx z) const { return titeica_psi(Q0_) + 2.0 * std::log(std::abs(1.0 + 2.0 * beta_ * z)); }

cplx TiteicaData::psi_z(cplx z) const { return 2.0 * beta_ / (1.0 + 2.0 * beta_ * z); }

cplx TiteicaData::Q(cplx z) const {
    cplx d = 1.0 + 2.0 * beta_ * z;
    return Q0_ * d * d * d;
}

LiouvilleData::LiouvilleData(cplx alpha, cplx gamma) : alpha_(alpha), gamma_(gamma) {}

double LiouvilleData::psi(cplx z) const {
    cplx g = alpha_ * z + gamma_ * z * z;
    cplx gp = alpha_ + 2.0 * gamma_ * z;
    double r = 1.0 - std::norm(g);
    if (r <= 0.0) throw DomainError("LiouvilleData: |g| >= 1");
    return std::log(4.0 * std::norm(gp)) - 2.0 * std::log(r);
}

cplx LiouvilleData::psi_z(cplx z) const {
    cplx g = alpha_ * z + gamma_ * z * z;
    cplx gp = alpha_ + 2.0 * gamma_ * z;
    return 2.0 * gamma_ / gp + 2.0 * std::conj(g) * gp / (1.0 - std::norm(g));
}

double LiouvilleData::psi_zzbar(cplx z) const {
    cplx g = alpha_ * z + gamma_ * z * z;
    cplx gp = alpha_ + 2.0 * gamma_ * z;
    double r = 1.0 - std::norm(g);
    return 2.0 * std::norm(gp) / (r * r);
}

ConnectionPair connection_matrices(const SurfaceData& d, cplx z) {
    double ps = d.psi(z);
    double e = std::exp(ps), em = std::exp(-ps);
    cplx pz = d.psi_z(z);
    cplx Q = d.Q(z);
    ConnectionPair cp;
    cp.A << pz, a_coef * Q * em, 0.0, 0.0, 0.0, e / 2.0, 1.0, 0.0, 0.0;
    cp.B << 0.0, 0.0, e / 2.0, a_coef * std::conj(Q) * em, std::conj(pz), 0.0, 0.0, 1.0, 0.0;
    return cp;
}

Mat3c curvature_matrix(const SurfaceData& d, cplx z) {
    double ps = d.psi(z);
    double e = std::exp(ps), em = std::exp(-ps);
    cplx pz = d.psi_z(z), pzb = std::conj(pz);
    double pzz = d.psi_zzbar(z);
    cplx Q = d.Q(z), Qzb = d.Q_zbar(z);
    Mat3c Azb = Mat3c::Zero(), Bz = Mat3c::Zero();
    Azb(0, 0) = pzz;
    Azb(0, 1) = a_coef * (Qzb - Q * pzb) * em;
    Azb(1, 2) = pzb * e / 2.0;
    Bz(0, 2) = pz * e / 2.0;
    Bz(1, 0) = a_coef * (std::conj(Qzb) - std::conj(Q) * pz) * em;
    Bz(1, 1) = pzz;
    ConnectionPair cp = connection_matrices(d, z);
    return Azb - Bz + cp.A * cp.B - cp.B * cp.A;
}

double curvature_residual(const SurfaceData& d, cplx z) { return curvature_matrix(d, z).cwiseAbs().maxCoeff(); }

double curvature_residual(const SurfaceData& d, const std::vector<cplx>& points) {
    double r = 0.0;
    for (cplx z : points) r = std::max(r, curvature_residual(d, z));
    return r;
}

double integrability_residual(const SurfaceData& d, cplx z) {
    double ps = d.psi(z);
    double r1 = d.psi_zzbar(z) + 0.5 * std::norm(d.Q(z)) * std::exp(-2.0 * ps) - 0.5 * std::exp(ps);
    return std::max(std::abs(r1), std::abs(d.Q_zbar(z)));
}

Vec3 FrameState::position() const { return F.row(2).real().transpose(); }

Eigen::Matrix3d FrameState::real_frame() const {
    Eigen::Matrix3d R;
    R.row(0) = (F.row(0) + F.row(1)).real();
    R.row(1) = (I1 * (F.row(0) - F.row(1))).real();
    R.row(2) = F.row(2).real();
    return R;
}

double FrameState::reality_defect() const {
    double r = (F.row(1) - F.row(0).conjugate()).cwiseAbs().maxCoeff();
    return std::max(r, F.row(2).imag().cwiseAbs().maxCoeff());
}

void FrameState::validate(double tol) const {
    double r = reality_defect();
    if (!(r <= tol)) throw PreconditionError("FrameState: reality constraint violated by " + std::to_string(r));
    if (std::abs(real_frame().determinant()) < 1e-12) throw PreconditionError("FrameState: degenerate frame");
}

FrameState canonical_frame(double psi0) {
    double s = std::exp(psi0 / 2.0) / 2.0;
    FrameState fs;
    fs.F << s, -I1 * s, 0.0, s, I1 * s, 0.0, 0.0, 0.0, 1.0;
    return fs;
}

namespace {

Mat3c generator(const SurfaceData& d, cplx z, cplx dz) {
    ConnectionPair cp = connection_matrices(d, z);
    return cp.A * dz + cp.B * std::conj(dz);
}

double det_drift(const SurfaceData& d, const Mat3c& F, cplx z, cplx det0, double psi0) {
    cplx expected = det0 * std::exp(d.psi(z) - psi0);
    return std::abs(F.determinant() - expected) / std::abs(expected);
}

}  // namespace

namespace {

IntegrationResult integrate_unchecked(const SurfaceData& d, const FrameState& F0, const std::vector<cplx>& path,
                                      double max_step) {
    if (!(max_step > 0.0)) throw PreconditionError("integrate_frame: max_step must be positive");
    F0.validate();
    IntegrationResult res;
    res.end = F0;
    if (path.size() < 2) return res;
    Mat3c F = F0.F;
    const cplx det0 = F.determinant();
    const double psi0 = d.psi(path.front());
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
        cplx z0 = path[s], z1 = path[s + 1];
        double len = std::abs(z1 - z0);
        if (len == 0.0) continue;
        int m = static_cast<int>(std::ceil(len / max_step - 1e-12));
        cplx dz = (z1 - z0) / static_cast<double>(m);
        for (int k = 0; k < m; ++k) {
            cplx z = z0 + dz * static_cast<double>(k);
            Mat3c k1 = generator(d, z, dz) * F;
            Mat3c k2 = generator(d, z + 0.5 * dz, dz) * (F + 0.5 * k1);
            Mat3c k3 = generator(d, z + 0.5 * dz, dz) * (F + 0.5 * k2);
            Mat3c k4 = generator(d, z + dz, dz) * (F + k3);
            F += (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            ++res.steps;
        }
        FrameState cur{F};
        res.drift = std::max(res.drift, cur.reality_defect() + det_drift(d, F, z1, det0, psi0));
    }
    res.end.F = F;
    return res;
}

}  // namespace

IntegrationResult integrate_frame(const SurfaceData& d, const FrameState& F0, const std::vector<cplx>& path,
                                  double max_step) {
    IntegrationResult res = integrate_unchecked(d, F0, path, max_step);
    if (res.drift > 1e-6)
        throw NumericalError("integrate_frame: invariant drift " + std::to_string(res.drift) + " above 1e-6, refine the step",
                             res.drift);
    return res;
}

double holonomy_deviation(const SurfaceData& d, const FrameState& F0, const std::vector<cplx>& loop,
                          double max_step) {
    IntegrationResult r = integrate_frame(d, F0, loop, max_step);
    Mat3c H = r.end.F * F0.F.inverse();
    return (H - Mat3c::Identity()).cwiseAbs().maxCoeff();
}

double path_independence(const SurfaceData& d, const FrameState& F0, cplx z0, cplx z1, double max_step) {
    cplx cx(z1.real(), z0.imag()), cy(z0.real(), z1.imag());
    Mat3c a = integrate_frame(d, F0, {z0, cx, z1}, max_step).end.F;
    Mat3c b = integrate_frame(d, F0, {z0, cy, z1}, max_step).end.F;
    return (a - b).cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff();
}

FrameState exact_titeica_frame(cplx Q, cplx z) {
    TiteicaData d(Q);
    ConnectionPair cp = connection_matrices(d, 0.0);
    Mat3c G = z.real() * (cp.A + cp.B) + z.imag() * I1 * (cp.A - cp.B);
    FrameState F0 = canonical_frame(d.psi(0.0));
    return FrameState{G.exp() * F0.F};
}

Rk4OrderResult rk4_order(cplx Q, cplx z_end, const std::vector<double>& steps) {
    TiteicaData d(Q);
    FrameState F0 = canonical_frame(d.psi(0.0));
    Mat3c exact = exact_titeica_frame(Q, z_end).F;
    Rk4OrderResult out;
    for (double h : steps) {
        Mat3c F = integrate_unchecked(d, F0, {0.0, z_end}, h).end.F;
        out.steps.push_back(h);
        out.errors.push_back((F - exact).cwiseAbs().maxCoeff() / exact.cwiseAbs().maxCoeff());
    }
    std::size_t n = out.errors.size();
    if (n >= 2)
        out.observed_order = std::log(out.errors[n - 2] / out.errors[n - 1]) / std::log(out.steps[n - 2] / out.steps[n - 1]);
    return out;
}

TiteicaMesh titeica_immersion(cplx Q, double extent, double spacing, double max_step) {
    if (Q == 0.0) throw DomainError("titeica_immersion: Q must be nonzero");
    if (!(extent > 0.0) || !(spacing > 0.0)) throw PreconditionError("titeica_immersion: extent and spacing must be positive");
    const int half = static_cast<int>(std::lround(extent / spacing));
    if (half < 3) throw PreconditionError("titeica_immersion: need at least three mesh steps per half-side");
    TiteicaData d(Q);
    TiteicaMesh mesh;
    mesh.Q = Q;
    mesh.psi = d.psi(0.0);
    mesh.spacing = spacing;
    mesh.extent = spacing * half;
    mesh.side = 2 * half + 1;
    mesh.points.resize(static_cast<std::size_t>(mesh.side) * mesh.side);
    FrameState F0 = canonical_frame(mesh.psi);
    const double step = std::min(max_step, spacing);

    // Frames on the x axis, marching outwards from the origin.
    std::vector<FrameState> axis(mesh.side);
    axis[half] = F0;
    for (int dir : {-1, 1}) {
        FrameState F = F0;
        for (int k = 1; k <= half; ++k) {
            int i = half + dir * k;
            IntegrationResult r = integrate_frame(d, F, {cplx(mesh.coord(i - dir), 0.0), cplx(mesh.coord(i), 0.0)}, step);
            F = r.end;
            mesh.max_drift = std::max(mesh.max_drift, r.drift);
            axis[i] = F;
        }
    }
    std::vector<double> col_drift(mesh.side, 0.0);
    parallel_for(static_cast<std::size_t>(mesh.side), [&](std::size_t ci) {
        int i = static_cast<int>(ci);
        double x = mesh.coord(i);
        mesh.points[static_cast<std::size_t>(i) * mesh.side + half] = axis[i].position();
        for (int dir : {-1, 1}) {
            FrameState F = axis[i];
            for (int k = 1; k <= half; ++k) {
                int j = half + dir * k;
                IntegrationResult r =
                    integrate_frame(d, F, {cplx(x, mesh.coord(j - dir)), cplx(x, mesh.coord(j))}, step);
                F = r.end;
                col_drift[ci] = std::max(col_drift[ci], r.drift);
                if (std::abs(F.real_frame().determinant()) < 1e-12)
                    throw NumericalError("titeica_immersion: frame lost transversality", 0.0);
                mesh.points[static_cast<std::size_t>(i) * mesh.side + j] = F.position();
            }
        }
    });
    for (double v : col_drift) mesh.max_drift = std::max(mesh.max_drift, v);
    return mesh;
}

TiteicaHooks titeica_hooks(const TiteicaMesh& mesh) {
    const int s = mesh.side;
    const double h = mesh.spacing;
    if (s < 5) throw PreconditionError("titeica_hooks: mesh too small");
    auto d1 = [&](auto get, int k) -> Vec3 {
        return (-get(k + 2) + 8.0 * get(k + 1) - 8.0 * get(k - 1) + get(k - 2)) / (12.0 * h);
    };
    auto d2 = [&](auto get, int k) -> Vec3 {
        return (-get(k + 2) + 16.0 * get(k + 1) - 30.0 * get(k) + 16.0 * get(k - 1) - get(k - 2)) / (12.0 * h * h);
    };
    const double e = std::exp(mesh.psi);
    TiteicaHooks out;
    out.min_transversality = std::numeric_limits<double>::infinity();
    for (int i = 2; i < s - 2; ++i)
        for (int j = 2; j < s - 2; ++j) {
            Vec3 f = mesh.at(i, j);
            Vec3 fx = d1([&](int k) { return Vec3(mesh.at(k, j)); }, i);
            Vec3 fy = d1([&](int k) { return Vec3(mesh.at(i, k)); }, j);
            Vec3 fxx = d2([&](int k) { return Vec3(mesh.at(k, j)); }, i);
            Vec3 fyy = d2([&](int k) { return Vec3(mesh.at(i, k)); }, j);
            Vec3 fxy = d1([&](int k) { return Vec3(d1([&](int m) { return Vec3(mesh.at(k, m)); }, j)); }, i);
            Vec3 xi = (fxx + fyy) / (2.0 * e);
            out.xi_residual = std::max(out.xi_residual, (xi - f).norm() / f.norm());
            Eigen::Matrix3d B;
            B.col(0) = fx;
            B.col(1) = fy;
            B.col(2) = f;
            out.min_transversality = std::min(out.min_transversality, std::abs(B.determinant()));
            auto lu = B.partialPivLu();
            double hxx = lu.solve(fxx)(2), hxy = lu.solve(fxy)(2), hyy = lu.solve(fyy)(2);
            double r = std::max({std::abs(hxx - e), std::abs(hxy), std::abs(hyy - e)}) / e;
            out.blaschke_residual = std::max(out.blaschke_residual, r);
        }
    return out;
}

std::string frame_convention() {
    return "rows (f_z, f_zbar, f); F_z = A F, F_zbar = B F; zero curvature A_zbar - B_z + A B - B A = 0";
}

}  // namespace aklab

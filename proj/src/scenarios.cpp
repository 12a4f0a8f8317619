#include "aklab/scenarios.hpp"

#include <cmath>
#include <numbers>

#include "aklab/errors.hpp"

namespace aklab {

namespace {
constexpr double tp = 2.0 * std::numbers::pi;

Mat2 expm_sl2(const Mat2& S) {
    // S^2 = -det(S) I for trace-free S
    double d = -S.determinant();
    double c, s;
    if (d > 1e-300) {
        double r = std::sqrt(d);
        c = std::cosh(r);
        s = std::sinh(r) / r;
    } else if (d < -1e-300) {
        double r = std::sqrt(-d);
        c = std::cos(r);
        s = std::sin(r) / r;
    } else {
        c = 1.0 + d / 2.0;
        s = 1.0 + d / 6.0;
    }
    return c * Mat2::Identity() + s * S;
}
}  // namespace

Cubic lower_pick(const Mat2& g, const Pick& A) { return Pick{{A[0].transpose() * g, A[1].transpose() * g}}; }

Pick raise_cubic(const Mat2& g, const Cubic& C) {
    Mat2 gi = g.inverse();
    return Pick{{gi * C[0].transpose(), gi * C[1].transpose()}};
}

Cubic cubic_from_coefficient(std::complex<double> coef, const std::array<std::complex<double>, 2>& th) {
    Cubic C;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int l = 0; l < 2; ++l) C[k](i, l) = (coef * th[k] * th[i] * th[l]).real();
    return C;
}

std::array<std::complex<double>, 2> holomorphic_coframe(const Mat2& J) {
    Mat2 g = metric_of(J);
    Mat2 E = frame_of(J);
    Eigen::Vector2d a = g * E.col(0), b = g * E.col(1);
    return {std::complex<double>(a(0), b(0)), std::complex<double>(a(1), b(1))};
}

double TrigScalar::value(double x, double y) const {
    double s = 0.0;
    for (const auto& m : modes) {
        double ph = tp * (m.kx * x + m.ky * y);
        s += m.a * std::cos(ph) + m.b * std::sin(ph);
    }
    return s;
}

Vec2 TrigScalar::gradient(double x, double y) const {
    Vec2 g = Vec2::Zero();
    for (const auto& m : modes) {
        double ph = tp * (m.kx * x + m.ky * y);
        double d = -m.a * std::sin(ph) + m.b * std::cos(ph);
        g(0) += tp * m.kx * d;
        g(1) += tp * m.ky * d;
    }
    return g;
}

Mat2 TrigScalar::hessian(double x, double y) const {
    Mat2 h = Mat2::Zero();
    for (const auto& m : modes) {
        double ph = tp * (m.kx * x + m.ky * y);
        double d2 = -(m.a * std::cos(ph) + m.b * std::sin(ph)) * tp * tp;
        h(0, 0) += d2 * m.kx * m.kx;
        h(0, 1) += d2 * m.kx * m.ky;
        h(1, 1) += d2 * m.ky * m.ky;
    }
    h(1, 0) = h(0, 1);
    return h;
}

TrigScalar TrigScalar::random(Rng& rng, int kmax, int count, double amplitude) {
    TrigScalar t;
    for (int i = 0; i < count; ++i) {
        int kx = 0, ky = 0;
        while (kx == 0 && ky == 0) {
            kx = rng.integer(-kmax, kmax);
            ky = rng.integer(-kmax, kmax);
        }
        double a = rng.uniform(-amplitude, amplitude);
        double b = rng.uniform(-amplitude, amplitude);
        t.modes.push_back({kx, ky, a, b});
    }
    return t;
}

Vec2 TrigVectorField::value(double x, double y) const { return Vec2(X0.value(x, y), X1.value(x, y)); }

Mat2 TrigVectorField::jacobian(double x, double y) const {
    Mat2 D;
    D.row(0) = X0.gradient(x, y).transpose();
    D.row(1) = X1.gradient(x, y).transpose();
    return D;
}

TrigVectorField TrigVectorField::random(Rng& rng, int kmax, int count, double amplitude) {
    TrigVectorField v;
    v.X0 = TrigScalar::random(rng, kmax, count, amplitude);
    v.X1 = TrigScalar::random(rng, kmax, count, amplitude);
    return v;
}

TrigVectorField TrigVectorField::hamiltonian(const TrigScalar& H) {
    // derivative of a cos + b sin along k is tp k (b cos - a sin)
    TrigVectorField v;
    for (const auto& m : H.modes) {
        v.X0.modes.push_back({m.kx, m.ky, tp * m.ky * m.b, -tp * m.ky * m.a});
        v.X1.modes.push_back({m.kx, m.ky, -tp * m.kx * m.b, tp * m.kx * m.a});
    }
    return v;
}

TrigVectorField TrigVectorField::constant(double a, double b) {
    TrigVectorField v;
    v.X0.modes.push_back({0, 0, a, 0.0});
    v.X1.modes.push_back({0, 0, b, 0.0});
    return v;
}

Cubic TiteicaPair::C(double, double) const {
    return cubic_from_coefficient(std::conj(w_), {std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 1.0)});
}

WarpedTiteicaPair::WarpedTiteicaPair(double eps, std::complex<double> w) : eps_(eps), w_(w) {
    if (!(std::abs(eps) < 0.1)) throw DomainError("WarpedTiteicaPair: |eps| must be below 0.1");
}

Mat2 WarpedTiteicaPair::jacobian(double x, double y) const {
    // V = (0.5 cos 2pi x + sin 2pi y, 0.7 cos 2pi x + 0.3 sin 2pi(x+y))
    Mat2 D;
    D(0, 0) = 1.0 + eps_ * (-0.5 * tp * std::sin(tp * x));
    D(0, 1) = eps_ * tp * std::cos(tp * y);
    D(1, 0) = eps_ * (-0.7 * tp * std::sin(tp * x) + 0.3 * tp * std::cos(tp * (x + y)));
    D(1, 1) = 1.0 + eps_ * 0.3 * tp * std::cos(tp * (x + y));
    return D;
}

Mat2 WarpedTiteicaPair::J(double x, double y) const {
    Mat2 D = jacobian(x, y);
    return D.inverse() * J0() * D;
}

Cubic WarpedTiteicaPair::C(double x, double y) const {
    Mat2 D = jacobian(x, y);
    std::array<std::complex<double>, 2> th{std::complex<double>(D(0, 0), D(1, 0)),
                                           std::complex<double>(D(0, 1), D(1, 1))};
    return cubic_from_coefficient(std::conj(w_), th);
}

RandomSmoothPair::RandomSmoothPair(std::uint64_t seed, double amplitude) {
    Rng rng(seed);
    s00_ = TrigScalar::random(rng, 2, 3, amplitude);
    s01_ = TrigScalar::random(rng, 2, 3, amplitude);
    s10_ = TrigScalar::random(rng, 2, 3, amplitude);
    qre_ = TrigScalar::random(rng, 2, 3, amplitude);
    qim_ = TrigScalar::random(rng, 2, 3, amplitude);
    q0_ = std::complex<double>(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
}

Mat2 RandomSmoothPair::J(double x, double y) const {
    Mat2 S;
    double a = s00_.value(x, y);
    S << a, s01_.value(x, y), s10_.value(x, y), -a;
    Mat2 P = expm_sl2(S);
    return P * J0() * P.inverse();
}

Cubic RandomSmoothPair::C(double x, double y) const {
    std::complex<double> Q = q0_ + std::complex<double>(qre_.value(x, y), qim_.value(x, y));
    return cubic_from_coefficient(Q, holomorphic_coframe(J(x, y)));
}

std::unique_ptr<AnalyticPair> make_scenario(const std::string& name, std::uint64_t seed, std::complex<double> w,
                                            double eps) {
    if (name == "titeica") return std::make_unique<TiteicaPair>(w);
    if (name == "patch-holomorphic") return std::make_unique<WarpedTiteicaPair>(eps, w);
    if (name == "random-smooth") return std::make_unique<RandomSmoothPair>(seed, 0.15);
    throw DomainError("unknown scenario '" + name + "' (expected titeica, patch-holomorphic or random-smooth)");
}

}  // namespace aklab

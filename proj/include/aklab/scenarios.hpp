#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "aklab/pointmodel.hpp"

namespace aklab {

using Vec2 = Eigen::Vector2d;

// Seeded generator whose uniform draws do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }

private:
    std::mt19937_64 gen_;
};

// Lowered cubic form C[k](i,l) = C(d_k, d_i, d_l) in standard coordinates.
using Cubic = Pick;
Cubic lower_pick(const Mat2& g, const Pick& Astd);
Pick raise_cubic(const Mat2& g, const Cubic& C);
// C = Re(coef * th_k th_i th_l)
Cubic cubic_from_coefficient(std::complex<double> coef, const std::array<std::complex<double>, 2>& th);
// th = g(e1, .) + i g(e2, .) for the g_J-orthonormal frame
std::array<std::complex<double>, 2> holomorphic_coframe(const Mat2& J);

// Finite trigonometric sum sum_m a_m cos(2 pi k_m.p) + b_m sin(2 pi k_m.p).
struct TrigScalar {
    struct Mode {
        int kx, ky;
        double a, b;
    };
    std::vector<Mode> modes;

    double value(double x, double y) const;
    Vec2 gradient(double x, double y) const;
    Mat2 hessian(double x, double y) const;
    static TrigScalar random(Rng& rng, int kmax, int count, double amplitude);
};

struct TrigVectorField {
    TrigScalar X0, X1;
    Vec2 value(double x, double y) const;
    // D(a, b) = d_b X^a
    Mat2 jacobian(double x, double y) const;
    static TrigVectorField random(Rng& rng, int kmax, int count, double amplitude);
    // X = (H_y, -H_x), so iota_X rho = dH
    static TrigVectorField hamiltonian(const TrigScalar& H);
    static TrigVectorField constant(double a, double b);
};

class AnalyticPair {
public:
    virtual ~AnalyticPair() = default;
    virtual Mat2 J(double x, double y) const = 0;
    virtual Cubic C(double x, double y) const = 0;
    virtual std::string name() const = 0;
};

// Constant J0 and constant cubic Re(conj(w) dz^3).
class TiteicaPair : public AnalyticPair {
public:
    explicit TiteicaPair(std::complex<double> w) : w_(w) {}
    Mat2 J(double, double) const override { return J0(); }
    Cubic C(double x, double y) const override;
    std::string name() const override { return "titeica"; }

private:
    std::complex<double> w_;
};

// Pull-back of the Titeica pair by the periodic map p -> p + eps V(p); Codazzi everywhere.
class WarpedTiteicaPair : public AnalyticPair {
public:
    // |eps| < 0.1 keeps det(Id + eps DV) > 0, so the warp is a diffeomorphism.
    WarpedTiteicaPair(double eps, std::complex<double> w);
    Mat2 jacobian(double x, double y) const;
    Mat2 J(double x, double y) const override;
    Cubic C(double x, double y) const override;
    std::string name() const override { return "patch-holomorphic"; }

private:
    double eps_;
    std::complex<double> w_;
};

// J = e^S J0 e^{-S} with S a random smooth sl2 field, C = Re(Q th^3) with Q random smooth.
class RandomSmoothPair : public AnalyticPair {
public:
    RandomSmoothPair(std::uint64_t seed, double amplitude);
    Mat2 J(double x, double y) const override;
    Cubic C(double x, double y) const override;
    std::string name() const override { return "random-smooth"; }

private:
    TrigScalar s00_, s01_, s10_, qre_, qim_;
    std::complex<double> q0_;
};

std::unique_ptr<AnalyticPair> make_scenario(const std::string& name, std::uint64_t seed, std::complex<double> w,
                                            double eps);

}  // namespace aklab

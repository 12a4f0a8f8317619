#include "aklab/torus.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "aklab/errors.hpp"

namespace aklab {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct TorusGrid::Impl {
    int n;
    int nh;
    double* rbuf = nullptr;
    fftw_complex* cbuf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::mutex mu;

    explicit Impl(int n_) : n(n_), nh(n_ / 2 + 1) {
        std::lock_guard<std::mutex> lk(planner_mutex());
        rbuf = fftw_alloc_real(static_cast<std::size_t>(n) * n);
        cbuf = fftw_alloc_complex(static_cast<std::size_t>(n) * nh);
        // FFTW_ESTIMATE keeps the algorithm choice, and hence round-off, reproducible between runs.
        fwd = fftw_plan_dft_r2c_2d(n, n, rbuf, cbuf, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_2d(n, n, cbuf, rbuf, FFTW_ESTIMATE);
    }
    ~Impl() {
        std::lock_guard<std::mutex> lk(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(rbuf);
        fftw_free(cbuf);
    }
};

TorusGrid::TorusGrid(int n) : n_(n) {
    if (n < 8 || n % 2 != 0) throw DomainError("TorusGrid: n must be even and at least 8");
    impl_ = std::make_shared<Impl>(n);
}

double TorusGrid::wavenumber(int i) const {
    int m = i < n_ / 2 ? i : i - n_;
    return 2.0 * std::numbers::pi * m;
}

std::vector<std::complex<double>> TorusGrid::forward(const Scalar& u) const {
    if (u.size() != size()) throw DomainError("TorusGrid: field size mismatch");
    std::lock_guard<std::mutex> lk(impl_->mu);
    std::copy(u.begin(), u.end(), impl_->rbuf);
    fftw_execute(impl_->fwd);
    const std::size_t m = static_cast<std::size_t>(n_) * impl_->nh;
    std::vector<std::complex<double>> c(m);
    const double s = 1.0 / (static_cast<double>(n_) * n_);
    for (std::size_t k = 0; k < m; ++k) c[k] = std::complex<double>(impl_->cbuf[k][0], impl_->cbuf[k][1]) * s;
    return c;
}

Scalar TorusGrid::inverse(const std::vector<std::complex<double>>& c) const {
    std::lock_guard<std::mutex> lk(impl_->mu);
    const std::size_t m = static_cast<std::size_t>(n_) * impl_->nh;
    for (std::size_t k = 0; k < m; ++k) {
        impl_->cbuf[k][0] = c[k].real();
        impl_->cbuf[k][1] = c[k].imag();
    }
    fftw_execute(impl_->bwd);
    return Scalar(impl_->rbuf, impl_->rbuf + size());
}

namespace {

template <class Fn>
std::vector<std::complex<double>> map_modes(const TorusGrid& g, std::vector<std::complex<double>> c, Fn fn) {
    const int n = g.n(), nh = n / 2 + 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < nh; ++j) {
            auto& v = c[static_cast<std::size_t>(i) * nh + j];
            v = fn(i, j, v);
        }
    return c;
}

}  // namespace

Scalar TorusGrid::dx(const Scalar& u) const {
    const int h = n_ / 2;
    return inverse(map_modes(*this, forward(u), [&](int i, int, std::complex<double> v) {
        if (i == h) return std::complex<double>(0.0, 0.0);
        return std::complex<double>(0.0, wavenumber(i)) * v;
    }));
}

Scalar TorusGrid::dy(const Scalar& u) const {
    const int h = n_ / 2;
    return inverse(map_modes(*this, forward(u), [&](int, int j, std::complex<double> v) {
        if (j == h) return std::complex<double>(0.0, 0.0);
        return std::complex<double>(0.0, wavenumber(j)) * v;
    }));
}

std::array<Scalar, 2> TorusGrid::grad(const Scalar& u) const {
    const int h = n_ / 2;
    auto c = forward(u);
    auto cx = map_modes(*this, c, [&](int i, int, std::complex<double> v) {
        if (i == h) return std::complex<double>(0.0, 0.0);
        return std::complex<double>(0.0, wavenumber(i)) * v;
    });
    auto cy = map_modes(*this, c, [&](int, int j, std::complex<double> v) {
        if (j == h) return std::complex<double>(0.0, 0.0);
        return std::complex<double>(0.0, wavenumber(j)) * v;
    });
    return {inverse(cx), inverse(cy)};
}

Scalar TorusGrid::laplacian(const Scalar& u) const {
    return inverse(map_modes(*this, forward(u), [&](int i, int j, std::complex<double> v) {
        double kx = wavenumber(i), ky = wavenumber(j);
        return -(kx * kx + ky * ky) * v;
    }));
}

Scalar TorusGrid::inverse_laplacian(const Scalar& u) const {
    return inverse(map_modes(*this, forward(u), [&](int i, int j, std::complex<double> v) {
        if (i == 0 && j == 0) return std::complex<double>(0.0, 0.0);
        double kx = wavenumber(i), ky = wavenumber(j);
        return -v / (kx * kx + ky * ky);
    }));
}

Scalar TorusGrid::shifted_inverse(const Scalar& u, double s) const {
    return inverse(map_modes(*this, forward(u), [&](int i, int j, std::complex<double> v) {
        double kx = wavenumber(i), ky = wavenumber(j);
        return v / (kx * kx + ky * ky + s);
    }));
}

double TorusGrid::mean(const Scalar& u) const {
    double s = 0.0;
    for (double v : u) s += v;
    return s / static_cast<double>(u.size());
}

double TorusGrid::spectral_tail(const Scalar& u) const {
    auto c = forward(u);
    const int nh = n_ / 2 + 1;
    double all = 0.0, tail = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < nh; ++j) {
            double a = std::abs(c[static_cast<std::size_t>(i) * nh + j]);
            int mi = std::abs(i < n_ / 2 ? i : i - n_);
            all = std::max(all, a);
            if (3 * std::max(mi, j) > n_) tail = std::max(tail, a);
        }
    return all > 0.0 ? tail / all : 0.0;
}

HodgeParts hodge_decompose_oneform(const TorusGrid& g, const std::vector<Eigen::Vector2d>& alpha) {
    const std::size_t N = g.size();
    const int n = g.n(), nh = n / 2 + 1;
    Scalar a0(N), a1(N);
    for (std::size_t k = 0; k < N; ++k) {
        a0[k] = alpha[k](0);
        a1[k] = alpha[k](1);
    }
    auto c0 = g.forward(a0), c1 = g.forward(a1);
    const std::size_t M = c0.size();
    std::vector<std::complex<double>> e0(M), e1(M), h0(M), h1(M), H(M), G(M);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < nh; ++j) {
            std::size_t m = static_cast<std::size_t>(i) * nh + j;
            if (i == 0 && j == 0) {
                h0[m] = c0[m];
                h1[m] = c1[m];
                continue;
            }
            double kx = g.wavenumber(i), ky = g.wavenumber(j);
            double k2 = kx * kx + ky * ky;
            std::complex<double> kd = (kx * c0[m] + ky * c1[m]) / k2;
            e0[m] = kd * kx;
            e1[m] = kd * ky;
            H[m] = std::complex<double>(0.0, -1.0) * kd;
            std::complex<double> lam = (-ky * c0[m] + kx * c1[m]) / k2;
            G[m] = std::complex<double>(0.0, -1.0) * lam;
        }
    Scalar E0 = g.inverse(e0), E1 = g.inverse(e1), H0 = g.inverse(h0), H1 = g.inverse(h1);
    HodgeParts out;
    out.exact.resize(N);
    out.coexact.resize(N);
    out.harmonic.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
        out.exact[k] = Eigen::Vector2d(E0[k], E1[k]);
        out.harmonic[k] = Eigen::Vector2d(H0[k], H1[k]);
        out.coexact[k] = alpha[k] - out.exact[k] - out.harmonic[k];
    }
    out.exact_potential = g.inverse(H);
    out.coexact_potential = g.inverse(G);
    return out;
}

}  // namespace aklab

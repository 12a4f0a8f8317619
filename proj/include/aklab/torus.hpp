#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace aklab {

using Scalar = std::vector<double>;

// Uniform n x n grid on the unit torus [0,1)^2, node (i, j) at (i/n, j/n),
// stored at index i*n + j. Area form rho = dx ^ dy, total area 1.
class TorusGrid {
public:
    explicit TorusGrid(int n);

    int n() const { return n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }
    double x(std::size_t k) const { return static_cast<double>(k / n_) / n_; }
    double y(std::size_t k) const { return static_cast<double>(k % n_) / n_; }
    // Angular wavenumber of index i along an axis (fftfreq convention).
    double wavenumber(int i) const;

    Scalar dx(const Scalar& u) const;
    Scalar dy(const Scalar& u) const;
    std::array<Scalar, 2> grad(const Scalar& u) const;
    Scalar laplacian(const Scalar& u) const;
    // Zero-mean solution v of laplacian(v) = u - mean(u).
    Scalar inverse_laplacian(const Scalar& u) const;
    // Solves (-laplacian + s) v = u for s > 0.
    Scalar shifted_inverse(const Scalar& u, double s) const;
    double mean(const Scalar& u) const;
    // Largest spectral magnitude with max(|kx|,|ky|) > n/3 (in index units), relative to the largest overall.
    double spectral_tail(const Scalar& u) const;

    // Spectral coefficients, layout n x (n/2+1), normalised so that a constant field c has coefficient c.
    std::vector<std::complex<double>> forward(const Scalar& u) const;
    Scalar inverse(const std::vector<std::complex<double>>& c) const;

private:
    struct Impl;
    int n_;
    std::shared_ptr<Impl> impl_;
};

// Spectral gradient of every double component of a field of fixed-size records
// (Eigen matrices, Pick, ...).
template <class T>
std::array<std::vector<T>, 2> grad_field(const TorusGrid& g, const std::vector<T>& f) {
    constexpr std::size_t m = sizeof(T) / sizeof(double);
    static_assert(sizeof(T) == m * sizeof(double), "field record must consist of doubles");
    std::array<std::vector<T>, 2> out{f, f};
    const std::size_t N = g.size();
    Scalar comp(N);
    const double* src = reinterpret_cast<const double*>(f.data());
    double* d0 = reinterpret_cast<double*>(out[0].data());
    double* d1 = reinterpret_cast<double*>(out[1].data());
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t i = 0; i < N; ++i) comp[i] = src[i * m + c];
        auto gr = g.grad(comp);
        for (std::size_t i = 0; i < N; ++i) {
            d0[i * m + c] = gr[0][i];
            d1[i * m + c] = gr[1][i];
        }
    }
    return out;
}

struct HodgeParts {
    std::vector<Eigen::Vector2d> exact, coexact, harmonic;
    Scalar exact_potential;    // exact = dH
    Scalar coexact_potential;  // coexact = *dG, with *dx = dy, *dy = -dx
};

// Flat-torus Hodge decomposition of a 1-form (components alpha_x, alpha_y) by spectral projection.
HodgeParts hodge_decompose_oneform(const TorusGrid& g, const std::vector<Eigen::Vector2d>& alpha);

}  // namespace aklab

#include "aklab/wangsolver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>

#include "aklab/errors.hpp"
#include "aklab/parallel.hpp"

namespace aklab {
namespace {

// Matrix-free -Delta + diag(D) on a TorusGrid, for Eigen's iterative solvers.
class ShiftedLaplacian;

}  // namespace
}  // namespace aklab

namespace Eigen::internal {
template <>
struct traits<aklab::ShiftedLaplacian> : public traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace aklab {
namespace {

class ShiftedLaplacian : public Eigen::EigenBase<ShiftedLaplacian> {
public:
    using Scalar = double;
    using RealScalar = double;
    using StorageIndex = int;
    enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

    ShiftedLaplacian(const TorusGrid& grid, const std::vector<double>& D) : grid_(&grid), D_(&D) {}

    Eigen::Index rows() const { return static_cast<Eigen::Index>(grid_->size()); }
    Eigen::Index cols() const { return rows(); }

    template <typename Rhs>
    Eigen::Product<ShiftedLaplacian, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
        return Eigen::Product<ShiftedLaplacian, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        std::vector<double> v(x.data(), x.data() + x.size());
        std::vector<double> lap = grid_->laplacian(v);
        Eigen::VectorXd out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = -lap[i] + (*D_)[i] * x(i);
        return out;
    }

private:
    const TorusGrid* grid_;
    const std::vector<double>* D_;
};

// (-Delta + s)^{-1} applied spectrally.
class SpectralPreconditioner {
public:
    SpectralPreconditioner() = default;
    void setup(const TorusGrid& grid, double shift) {
        grid_ = &grid;
        shift_ = shift;
    }
    template <typename M>
    SpectralPreconditioner& analyzePattern(const M&) { return *this; }
    template <typename M>
    SpectralPreconditioner& factorize(const M&) { return *this; }
    template <typename M>
    SpectralPreconditioner& compute(const M&) { return *this; }
    template <typename Rhs>
    Eigen::VectorXd solve(const Rhs& b) const {
        std::vector<double> v(b.size());
        for (Eigen::Index i = 0; i < b.size(); ++i) v[i] = b(i);
        std::vector<double> r = grid_->shifted_inverse(v, shift_);
        return Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
    }
    Eigen::ComputationInfo info() const { return Eigen::Success; }

private:
    const TorusGrid* grid_ = nullptr;
    double shift_ = 1.0;
};

}  // namespace
}  // namespace aklab

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<aklab::ShiftedLaplacian, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<aklab::ShiftedLaplacian, Rhs,
                                generic_product_impl<aklab::ShiftedLaplacian, Rhs>> {
    using Scalar = typename Product<aklab::ShiftedLaplacian, Rhs>::Scalar;
    template <typename Dest>
    static void scaleAndAddTo(Dest& dst, const aklab::ShiftedLaplacian& lhs, const Rhs& rhs, const Scalar& alpha) {
        dst.noalias() += alpha * lhs.apply(rhs);
    }
};
}  // namespace Eigen::internal

namespace aklab {
namespace {

double sup(const Scalar& s) {
    double r = 0.0;
    for (double v : s) r = std::max(r, std::abs(v));
    return r;
}

constexpr int dense_threshold = 32;

struct LinearResult {
    Scalar x;
    int iterations = 0;
};

LinearResult solve_linear(const TorusGrid& grid, const Scalar& D, const Scalar& rhs, bool symmetric_definite) {
    const auto N = static_cast<Eigen::Index>(grid.size());
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), N);
    LinearResult out;
    if (grid.n() < dense_threshold) {
        Eigen::MatrixXd M(N, N);
        Scalar e(grid.size(), 0.0);
        for (Eigen::Index c = 0; c < N; ++c) {
            e[c] = 1.0;
            Scalar col = grid.laplacian(e);
            e[c] = 0.0;
            for (Eigen::Index r = 0; r < N; ++r) M(r, c) = -col[r];
            M(c, c) += D[c];
        }
        Eigen::VectorXd x = M.partialPivLu().solve(b);
        out.x.assign(x.data(), x.data() + N);
        return out;
    }
    ShiftedLaplacian A(grid, D);
    double shift = std::max(grid.mean(D), 1e-3);
    Eigen::VectorXd x;
    if (symmetric_definite) {
        Eigen::ConjugateGradient<ShiftedLaplacian, Eigen::Lower | Eigen::Upper, SpectralPreconditioner> cg;
        cg.preconditioner().setup(grid, shift);
        cg.setTolerance(1e-14);
        cg.setMaxIterations(1000);
        cg.compute(A);
        x = cg.solve(b);
        out.iterations = static_cast<int>(cg.iterations());
        if (cg.info() != Eigen::Success && cg.error() > 1e-10)
            throw NumericalError("solve_wang: conjugate gradient did not converge", cg.error());
    } else {
        Eigen::BiCGSTAB<ShiftedLaplacian, SpectralPreconditioner> bi;
        bi.preconditioner().setup(grid, shift);
        bi.setTolerance(1e-14);
        bi.setMaxIterations(1000);
        bi.compute(A);
        x = bi.solve(b);
        out.iterations = static_cast<int>(bi.iterations());
        if (bi.info() != Eigen::Success && bi.error() > 1e-10)
            throw NumericalError("solve_wang: BiCGSTAB did not converge", bi.error());
    }
    out.x.assign(x.data(), x.data() + N);
    return out;
}

}  // namespace

void WangProblem::validate() const {
    if (phi.size() != grid.size()) throw PreconditionError("WangProblem: phi has the wrong size");
    if (!(newton_tol > 0.0)) throw PreconditionError("WangProblem: newton_tol must be positive");
    if (max_iters < 1) throw PreconditionError("WangProblem: max_iters must be at least 1");
    if (!(k0 <= 0.0)) throw PreconditionError("WangProblem: k0 must be non-positive for a solution to exist");
    double phi_max = 0.0;
    for (double v : phi) {
        if (!std::isfinite(v)) throw PreconditionError("WangProblem: phi is not finite");
        if (v < 0.0 && !allow_signed_phi) throw PreconditionError("WangProblem: phi must be non-negative");
        phi_max = std::max(phi_max, v);
    }
    if (k0 == 0.0 && phi_max == 0.0) throw PreconditionError("WangProblem: k0 = 0 needs phi > 0 somewhere");
}

Scalar wang_residual(const WangProblem& p, const Scalar& u) {
    Scalar r = p.grid.laplacian(u);
    parallel_for(r.size(), [&](std::size_t k) {
        r[k] += p.phi[k] * std::exp(-2.0 * u[k]) - 2.0 * std::exp(u[k]) - 2.0 * p.k0;
    });
    return r;
}

WangSolution solve_wang(const WangProblem& p, const Scalar& u0) {
    p.validate();
    if (u0.size() != p.grid.size()) throw PreconditionError("solve_wang: initial guess has the wrong size");
    const std::size_t N = p.grid.size();
    WangSolution sol;
    sol.u = u0;
    Scalar R = wang_residual(p, sol.u);
    double rn = sup(R);
    sol.residual_history.push_back(rn);
    Scalar D(N);
    while (rn > p.newton_tol) {
        if (sol.iterations >= p.max_iters)
            throw NumericalError("solve_wang: no convergence after " + std::to_string(p.max_iters) + " Newton steps",
                                 rn, sol.residual_history);
        double dmin = std::numeric_limits<double>::infinity();
        double emin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < N; ++k) {
            double eu = std::exp(sol.u[k]);
            D[k] = 2.0 * p.phi[k] / (eu * eu) + 2.0 * eu;
            dmin = std::min(dmin, D[k]);
            emin = std::min(emin, eu);
        }
        sol.jacobian_bound_history.push_back(-dmin);
        sol.stability_threshold_history.push_back(-2.0 * emin);
        bool definite = dmin > 0.0;
        if (!definite && !p.allow_signed_phi)
            throw NumericalError("solve_wang: Newton Jacobian lost definiteness", rn, sol.residual_history);
        LinearResult lin = solve_linear(p.grid, D, R, definite && !p.allow_signed_phi);
        sol.linear_iterations.push_back(lin.iterations);
        double step = 1.0;
        Scalar trial(N), Rt;
        double rt = rn;
        for (int ls = 0; ls < 30; ++ls) {
            for (std::size_t k = 0; k < N; ++k) trial[k] = sol.u[k] + step * lin.x[k];
            Rt = wang_residual(p, trial);
            rt = sup(Rt);
            if (std::isfinite(rt) && rt < (1.0 - 1e-4 * step) * rn) break;
            step *= 0.5;
        }
        if (!(rt < rn)) {
            // At round-off level the sup norm stagnates; accept the step if it is already converged.
            if (rt > p.newton_tol)
                throw NumericalError("solve_wang: line search failed", rn, sol.residual_history);
        }
        sol.u = trial;
        R = std::move(Rt);
        rn = rt;
        ++sol.iterations;
        sol.residual_history.push_back(rn);
    }
    sol.residual_inf = rn;
    return sol;
}

WangSolution solve_wang(const WangProblem& p) { return solve_wang(p, Scalar(p.grid.size(), 0.0)); }

double wang_constant_root(double k, double k0) {
    if (k < 0.0) throw DomainError("wang_constant_root: k must be non-negative");
    if (!(k0 <= 0.0)) throw DomainError("wang_constant_root: k0 must be non-positive");
    if (k0 == 0.0 && k == 0.0) throw DomainError("wang_constant_root: no root for k = k0 = 0");
    // k e^{-2u} - 2 e^u - 2 k0 is strictly decreasing in u
    auto h = [&](double u) { return k * std::exp(-2.0 * u) - 2.0 * std::exp(u) - 2.0 * k0; };
    double lo = -1.0, hi = 1.0;
    while (h(lo) < 0.0) lo *= 2.0;
    while (h(hi) > 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Scalar phi_from_q(const Scalar& q_norm_sq, bool cubic_rescale_half) {
    Scalar phi(q_norm_sq.size());
    double s = cubic_rescale_half ? 2.0 : 4.0;
    for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = s * q_norm_sq[k];
    return phi;
}

Scalar q_norm_sq_field(const FieldState& fs) {
    Scalar q(fs.grid.size());
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = 2.0 * norm0_sq(point_at(fs, k).A);
    return q;
}

Scalar vortex_residual(const TorusGrid& grid, const Scalar& u, const Scalar& q_norm_sq, double k0) {
    Scalar lap = grid.laplacian(u);
    Scalar r(u.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        double Kh = std::exp(-u[k]) * (k0 - 0.5 * lap[k]);
        r[k] = Kh + 1.0 - q_norm_sq[k] * std::exp(-3.0 * u[k]);
    }
    return r;
}

Scalar conformal_metric_F(const ConformalProfile& prof, const FieldState& fs) {
    Scalar out(fs.grid.size());
    parallel_for(out.size(), [&](std::size_t k) { out[k] = std::exp(eval_F(prof, norm0_sq(point_at(fs, k).A))); });
    return out;
}

}  // namespace aklab

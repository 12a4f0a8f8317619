#pragma once

#include <vector>

#include "aklab/scalarfuncs.hpp"
#include "aklab/surfacefields.hpp"
#include "aklab/torus.hpp"

namespace aklab {

// Delta u + phi e^{-2u} - 2 e^u - 2 k0 = 0 on the flat unit torus.
struct WangProblem {
    TorusGrid grid;
    Scalar phi;
    double newton_tol = 1e-11;
    int max_iters = 50;
    double k0 = -1.0;
    // Signed phi (manufactured solutions) switches the linear solver to BiCGSTAB.
    bool allow_signed_phi = false;

    void validate() const;
};

struct WangSolution {
    Scalar u;
    double residual_inf = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;
    // Upper bound -min(2 phi e^{-2u} + 2 e^u) on the largest Jacobian eigenvalue, per iterate.
    std::vector<double> jacobian_bound_history;
    // -2 min e^u per iterate, the bound the Jacobian must stay below.
    std::vector<double> stability_threshold_history;
    std::vector<int> linear_iterations;
};

Scalar wang_residual(const WangProblem& p, const Scalar& u);
WangSolution solve_wang(const WangProblem& p, const Scalar& u0);
WangSolution solve_wang(const WangProblem& p);

// Constant solution for phi == k by bisection on k e^{-2u} - 2 e^u - 2 k0.
double wang_constant_root(double k, double k0 = -1.0);

// phi = 2 ||q||^2 with the halved cubic differential, 4 ||q||^2 otherwise.
Scalar phi_from_q(const Scalar& q_norm_sq, bool cubic_rescale_half);
// ||q||^2_{g0} per node of a field state, computed as 2 norm0_sq(A).
Scalar q_norm_sq_field(const FieldState& fs);

// K_h + 1 - ||q||^2 e^{-3u} with K_h = e^{-u}(k0 - Delta u / 2).
Scalar vortex_residual(const TorusGrid& grid, const Scalar& u, const Scalar& q_norm_sq, double k0 = -1.0);

// Per-node conformal factor e^{F(norm0_sq(A))} of h = e^F g_J.
Scalar conformal_metric_F(const ConformalProfile& prof, const FieldState& fs);

}  // namespace aklab

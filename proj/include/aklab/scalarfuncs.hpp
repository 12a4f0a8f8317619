#pragma once

namespace aklab {

struct ConformalProfile {
    double c = -1.0;
    double root_tol = 1e-10;
    int quad_order = 20;

    void validate() const;
};

// y = F(t) solves c e^{-y} - 2t e^{-3y} + 1 = 0 (Newton on e^{-y}, bisection fallback).
double eval_F(const ConformalProfile& p, double t);
// Cube-root closed form of F, t > 0.
double eval_F_closed(const ConformalProfile& p, double t);
double eval_F_prime(const ConformalProfile& p, double t);
// f(t) = -t^{1/3} \int_0^t F'(s) s^{-1/3} ds, computed after s = sigma^3.
double eval_f(const ConformalProfile& p, double t);
// f'(t) = -F'(t) + f(t)/(3t); at t = 0 returns the limit -3/2 F'(0).
double eval_f_prime(const ConformalProfile& p, double t);

// Both values at once (shares the quadrature).
struct FValues {
    double f;
    double fp;
};
FValues eval_f_both(const ConformalProfile& p, double t);

double zeta(const ConformalProfile& p);
// g(t) = cbrt(1+s) + cbrt(1-s), s = sqrt(1 + zeta/t), and its t-derivative.
double aux_g(const ConformalProfile& p, double t);
double aux_g_prime(const ConformalProfile& p, double t);

double functional_residual(const ConformalProfile& p, double t, double F);

}  // namespace aklab

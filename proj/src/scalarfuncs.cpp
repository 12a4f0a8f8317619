#include "aklab/scalarfuncs.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "aklab/errors.hpp"

namespace aklab {

namespace {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

GaussRule make_gauss_rule(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        r.x[i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

const GaussRule& gauss_rule(int n) {
    thread_local std::vector<GaussRule> cache;
    if (static_cast<int>(cache.size()) <= n) cache.resize(n + 1);
    if (cache[n].x.empty()) cache[n] = make_gauss_rule(n);
    return cache[n];
}

void check_t(double t, const char* op) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError(std::string(op) + ": t must be a finite nonnegative number, got " + std::to_string(t));
}

// Root of 2t y^3 - c y - 1 on y > 0.
double solve_y(const ConformalProfile& p, double t) {
    const double ac = -p.c;
    if (t == 0.0) return 1.0 / ac;
    auto poly = [&](double y) { return 2.0 * t * y * y * y + ac * y - 1.0; };
    // Both candidates lie to the right of the root; the cubic is convex there, so Newton decreases monotonically.
    double y = std::min(1.0 / ac, std::cbrt(1.0 / (2.0 * t)));
    for (int it = 0; it < 200; ++it) {
        double v = poly(y);
        double d = 6.0 * t * y * y + ac;
        double step = v / d;
        double yn = y - step;
        if (!(yn > 0.0)) break;
        y = yn;
        if (std::abs(step) <= 4e-16 * y) break;
    }
    double res = std::abs(poly(y));
    if (res <= 0.25 * p.root_tol) return y;

    double lo = 0.0, hi = std::min(1.0 / ac, std::cbrt(1.0 / (2.0 * t)));
    for (int it = 0; it < 400 && hi - lo > 1e-17 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (poly(mid) > 0.0) hi = mid; else lo = mid;
    }
    y = 0.5 * (lo + hi);
    res = std::abs(poly(y));
    if (res > p.root_tol)
        throw NumericalError("eval_F: root finder did not reach root_tol at t=" + std::to_string(t), res);
    return y;
}

}  // namespace

void ConformalProfile::validate() const {
    if (!(c < 0.0)) throw DomainError("ConformalProfile: c must be strictly negative");
    if (!(root_tol > 0.0)) throw DomainError("ConformalProfile: root_tol must be positive");
    if (quad_order < 8) throw DomainError("ConformalProfile: quad_order must be at least 8");
}

double functional_residual(const ConformalProfile& p, double t, double F) {
    double y = std::exp(-F);
    return p.c * y - 2.0 * t * y * y * y + 1.0;
}

double eval_F(const ConformalProfile& p, double t) {
    p.validate();
    check_t(t, "eval_F");
    if (t == 0.0) return std::log(-p.c);
    return -std::log(solve_y(p, t));
}

double zeta(const ConformalProfile& p) {
    double ac = -p.c;
    return 2.0 * ac * ac * ac / 27.0;
}

double aux_g(const ConformalProfile& p, double t) {
    p.validate();
    if (!(t > 0.0)) throw DomainError("aux_g: t must be positive");
    double r = zeta(p) / t;
    double s = std::sqrt(1.0 + r);
    double a = std::cbrt(1.0 + s);
    double b = -std::cbrt(r / (1.0 + s));  // cbrt(1 - s) without cancellation
    return 2.0 / (a * a - a * b + b * b);
}

double aux_g_prime(const ConformalProfile& p, double t) {
    p.validate();
    if (!(t > 0.0)) throw DomainError("aux_g_prime: t must be positive");
    double z = zeta(p);
    double r = z / t;
    double s = std::sqrt(1.0 + r);
    double a = std::cbrt(1.0 + s);
    double b = -std::cbrt(r / (1.0 + s));
    double ds = -z / (2.0 * t * t * s);
    return ds / 3.0 * (1.0 / (a * a) - 1.0 / (b * b));
}

double eval_F_closed(const ConformalProfile& p, double t) {
    if (!(t > 0.0)) throw DomainError("eval_F_closed: t must be positive");
    return std::log(std::cbrt(4.0 * t) / aux_g(p, t));
}

double eval_F_prime(const ConformalProfile& p, double t) {
    double F = eval_F(p, t);
    return 2.0 / (6.0 * t - p.c * std::exp(2.0 * F));
}

FValues eval_f_both(const ConformalProfile& p, double t) {
    p.validate();
    check_t(t, "eval_f");
    if (t == 0.0) return {0.0, -1.5 * eval_F_prime(p, 0.0)};
    const GaussRule& rule = gauss_rule(p.quad_order);
    const double S = std::cbrt(t);
    const double a0 = 0.5 * (-p.c);
    double integral = 0.0;
    double lo = 0.0;
    double hi = std::min(S, a0);
    while (lo < S) {
        double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        double acc = 0.0;
        for (size_t i = 0; i < rule.x.size(); ++i) {
            double sg = mid + half * rule.x[i];
            acc += rule.w[i] * 3.0 * sg * eval_F_prime(p, sg * sg * sg);
        }
        integral += half * acc;
        lo = hi;
        hi = std::min(S, 2.0 * hi);
    }
    double f = -S * integral;
    double fp = -eval_F_prime(p, t) + f / (3.0 * t);
    return {f, fp};
}

double eval_f(const ConformalProfile& p, double t) { return eval_f_both(p, t).f; }

double eval_f_prime(const ConformalProfile& p, double t) { return eval_f_both(p, t).fp; }

}  // namespace aklab

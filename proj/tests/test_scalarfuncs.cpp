#include <cmath>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_roots.h>
#include <gtest/gtest.h>

#include "aklab/errors.hpp"
#include "aklab/scalarfuncs.hpp"

using namespace aklab;

namespace {

// Independent oracles: Brent on the cubic in y = e^{-F}, and adaptive quadrature for f.
double oracle_y(double c, double t) {
    struct P {
        double c, t;
    } par{c, t};
    gsl_function fn;
    fn.function = [](double y, void* v) {
        auto* p = static_cast<P*>(v);
        return 2.0 * p->t * y * y * y - p->c * y - 1.0;
    };
    fn.params = &par;
    gsl_root_fsolver* s = gsl_root_fsolver_alloc(gsl_root_fsolver_brent);
    gsl_root_fsolver_set(s, &fn, 0.0, 1.0 / -c);
    double y = 0.0;
    for (int it = 0; it < 200; ++it) {
        gsl_root_fsolver_iterate(s);
        y = gsl_root_fsolver_root(s);
        if (gsl_root_test_interval(gsl_root_fsolver_x_lower(s), gsl_root_fsolver_x_upper(s), 0.0, 1e-16) == GSL_SUCCESS)
            break;
    }
    gsl_root_fsolver_free(s);
    return y;
}

double oracle_F(double c, double t) { return -std::log(oracle_y(c, t)); }

// F'(t) from implicit differentiation at the oracle root.
double oracle_Fp(double c, double t) {
    double y = oracle_y(c, t);
    return 2.0 * y * y * y / (6.0 * t * y * y * y - c * y);
}

double oracle_f(double c, double t) {
    struct P {
        double c;
    } par{c};
    gsl_function fn;
    fn.function = [](double s, void* v) {
        auto* p = static_cast<P*>(v);
        return oracle_Fp(p->c, s) / std::cbrt(s);
    };
    fn.params = &par;
    gsl_integration_workspace* w = gsl_integration_workspace_alloc(1000);
    double result = 0.0, err = 0.0;
    gsl_integration_qags(&fn, 0.0, t, 1e-13, 1e-11, 1000, w, &result, &err);
    gsl_integration_workspace_free(w);
    return -std::cbrt(t) * result;
}

const std::vector<double> cs{-0.5, -1.0, -2.0};
const std::vector<double> ts{1e-6, 1e-3, 0.1, 1.0, 3.0, 50.0, 1e3};

}  // namespace

TEST(ScalarFuncs, FAtZeroIsLogAbsC) {
    for (double c : cs) EXPECT_NEAR(eval_F({c}, 0.0), std::log(-c), 1e-15);
}

TEST(ScalarFuncs, FMatchesBrentOracle) {
    for (double c : cs)
        for (double t : ts) EXPECT_NEAR(eval_F({c}, t), oracle_F(c, t), 1e-12) << "c=" << c << " t=" << t;
}

TEST(ScalarFuncs, FAtOneForMinusOne) {
    EXPECT_NEAR(eval_F({-1.0}, 1.0), 0.5280, 5e-5);
}

TEST(ScalarFuncs, FunctionalResidualSmall) {
    for (double c : cs)
        for (double t : ts) EXPECT_LE(std::abs(functional_residual({c}, t, eval_F({c}, t))), 1e-12);
}

TEST(ScalarFuncs, ClosedFormAgreesWithRoot) {
    for (double c : cs)
        for (double t : ts) EXPECT_NEAR(eval_F_closed({c}, t), eval_F({c}, t), 1e-12) << "c=" << c << " t=" << t;
}

TEST(ScalarFuncs, CubeRootConstantMustUseCubedC) {
    // The same closed form with the constant 2|c|/27 misses the root whenever |c| != 1.
    const double c = -0.5, t = 1e-3;
    const double z = 2.0 * 0.5 / 27.0;
    const double s = std::sqrt(1.0 + z / t);
    const double g = std::cbrt(1.0 + s) + std::cbrt(1.0 - s);
    const double F_other = std::log(std::cbrt(4.0 * t) / g);
    EXPECT_GT(std::abs(F_other - eval_F({c}, t)), 1e-2);
    EXPECT_NEAR(zeta({c}), 2.0 * 0.125 / 27.0, 1e-17);
}

TEST(ScalarFuncs, FPrimeAtZero) {
    for (double c : cs) EXPECT_NEAR(eval_F_prime({c}, 0.0), 2.0 / std::pow(-c, 3), 1e-14);
}

TEST(ScalarFuncs, FPrimeMatchesCentralDifference) {
    const double h = 1e-6;
    for (double c : cs)
        for (double t : {0.1, 1.0, 3.0}) {
            double fd = (eval_F({c}, t + h) - eval_F({c}, t - h)) / (2 * h);
            EXPECT_NEAR(eval_F_prime({c}, t), fd, 1e-6 * std::abs(fd));
        }
    // The implicit derivative at c = -1, t = 1 is 0.225349, not 0.2329.
    EXPECT_NEAR(eval_F_prime({-1.0}, 1.0), 0.2253488, 1e-7);
}

TEST(ScalarFuncs, fMatchesAdaptiveQuadrature) {
    for (double c : cs)
        for (double t : ts) {
            double o = oracle_f(c, t);
            EXPECT_NEAR(eval_f({c}, t), o, 1e-10 * std::max(1.0, std::abs(o))) << "c=" << c << " t=" << t;
        }
    EXPECT_LT(eval_f({-1.0}, 1.0), 0.0);
}

TEST(ScalarFuncs, fAtZeroAndSmallTLimit) {
    for (double c : cs) EXPECT_EQ(eval_f({c}, 0.0), 0.0);
    EXPECT_NEAR(eval_f_prime({-1.0}, 0.0), -3.0, 1e-14);
    EXPECT_NEAR(eval_f_prime({-1.0}, 1e-9), -3.0, 1e-4);
}

TEST(ScalarFuncs, fPrimeMatchesCentralDifference) {
    const double h = 1e-5;
    for (double c : cs)
        for (double t : {0.1, 1.0, 10.0}) {
            double fd = (eval_f({c}, t + h) - eval_f({c}, t - h)) / (2 * h);
            EXPECT_NEAR(eval_f_prime({c}, t), fd, 1e-6 * std::abs(fd));
        }
}

TEST(ScalarFuncs, LemmaCombinationPositiveAndMatchesAuxG) {
    for (double c : cs)
        for (double t : ts) {
            FValues v = eval_f_both({c}, t);
            double L = 1.0 - v.f + 3.0 * t * v.fp;
            EXPECT_GT(L, 0.0);
            double ratio = 3.0 * t * aux_g_prime({c}, t) / aux_g({c}, t);
            EXPECT_NEAR(L, ratio, 1e-9 * std::abs(ratio));
        }
}

TEST(ScalarFuncs, FPrimeNegativeAndIncreasing) {
    for (double c : cs) {
        double prev = -1e300;
        for (double t = 1e-4; t < 1e4; t *= 1.5) {
            double fp = eval_f_prime({c}, t);
            EXPECT_LT(fp, 0.0);
            EXPECT_GT(fp, prev);
            prev = fp;
        }
    }
}

TEST(ScalarFuncs, DomainErrors) {
    EXPECT_THROW(eval_F({-1.0}, -1e-3), DomainError);
    EXPECT_THROW(eval_F({-1.0}, std::nan("")), DomainError);
    EXPECT_THROW(eval_F({0.0}, 1.0), DomainError);
    EXPECT_THROW(eval_F({1.0}, 1.0), DomainError);
    EXPECT_THROW(eval_f({-1.0}, -2.0), DomainError);
    EXPECT_THROW(aux_g({-1.0}, 0.0), DomainError);
}

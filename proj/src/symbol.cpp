#include "aklab/symbol.hpp"

#include "aklab/errors.hpp"

namespace aklab {

Eigen::Matrix4d symbol_matrix(const ConformalProfile& prof, std::complex<double> w, const Eigen::Vector2d& xi,
                              SymbolEntry13 entry) {
    const double u = w.real(), v = w.imag();
    const double w2 = std::norm(w);
    const double x1 = xi(0), x2 = xi(1);
    const double n2 = x1 * x1 + x2 * x2;
    FValues fv = eval_f_both(prof, w2 / 2.0);
    const double f = fv.f, fp = fv.fp;
    const double e13 = entry == SymbolEntry13::norm_squared ? -fp * u * n2 : -fp * u * (x1 * x1 * x2 * x2);
    Eigen::Matrix4d M;
    M << -2.0 * (f - 1.0) * x1 * x2, (f - 1.0) * (x1 * x1 - x2 * x2) + 1.5 * w2 * fp * n2, e13, -fp * v * n2,
        (f - 1.0) * (x2 * x2 - x1 * x1) - 1.5 * w2 * fp * n2, -2.0 * (f - 1.0) * x1 * x2, -fp * v * n2, fp * u * n2,
        -3.0 * u * x1, -3.0 * v * x1, -x2, x1,
        -3.0 * v * x1, 3.0 * u * x1, -x1, -x2;
    return M;
}

double symbol_det(const ConformalProfile& prof, std::complex<double> w, const Eigen::Vector2d& xi,
                  SymbolEntry13 entry) {
    return symbol_matrix(prof, w, xi, entry).determinant();
}

double symbol_det_schur(const ConformalProfile& prof, std::complex<double> w, const Eigen::Vector2d& xi,
                        SymbolEntry13 entry) {
    if (xi.squaredNorm() == 0.0) throw DomainError("symbol_det_schur: xi must be nonzero");
    Eigen::Matrix4d M = symbol_matrix(prof, w, xi, entry);
    Eigen::Matrix2d Theta = M.topLeftCorner<2, 2>();
    Eigen::Matrix2d Xi = M.topRightCorner<2, 2>();
    Eigen::Matrix2d Gamma = M.bottomLeftCorner<2, 2>();
    Eigen::Matrix2d Delta = M.bottomRightCorner<2, 2>();
    // det Delta = |xi|^2
    return Delta.determinant() * (Theta - Xi * Delta.inverse() * Gamma).determinant();
}

double symbol_det_formula(const ConformalProfile& prof, std::complex<double> w, const Eigen::Vector2d& xi) {
    const double w2 = std::norm(w);
    FValues fv = eval_f_both(prof, w2 / 2.0);
    const double n2 = xi.squaredNorm();
    const double k = 1.0 - fv.f + 1.5 * fv.fp * w2;
    return n2 * n2 * n2 * k * k;
}

}  // namespace aklab

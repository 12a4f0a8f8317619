#pragma once

#include <complex>

#include <Eigen/Dense>

#include "aklab/scalarfuncs.hpp"

namespace aklab {

enum class SymbolEntry13 {
    norm_squared,   // -f' u |xi|^2, the reading whose determinant factors
    printed_product  // -f' u xi1^2 xi2^2, as printed
};

// Principal symbol at (i, w) of the linearised W-system, unknowns (xdot, ydot, udot, vdot).
Eigen::Matrix4d symbol_matrix(const ConformalProfile& prof, std::complex<double> w, const Eigen::Vector2d& xi,
                              SymbolEntry13 entry = SymbolEntry13::norm_squared);
double symbol_det(const ConformalProfile& prof, std::complex<double> w, const Eigen::Vector2d& xi,
                  SymbolEntry13 entry = SymbolEntry13::norm_squared);
// |xi|^2 det(Theta - Xi Delta^{-1} Gamma) from the 2x2 blocks, xi != 0.
double symbol_det_schur(const ConformalProfile& prof, std::complex<double> w, const Eigen::Vector2d& xi,
                        SymbolEntry13 entry = SymbolEntry13::norm_squared);
// |xi|^6 (1 - f + 3/2 f' |w|^2)^2
double symbol_det_formula(const ConformalProfile& prof, std::complex<double> w, const Eigen::Vector2d& xi);

}  // namespace aklab

#pragma once

#include <functional>
#include <vector>

#include "oswald/types.hpp"

namespace oswald {

/// Adaptive Gauss-Kronrod (G7,K15) integration of a complex integrand on [a,b].
/// Error estimate per panel is |K15 - G7|; panels are bisected until the sum of
/// estimates meets abs_tol + rel_tol*|I|.
Cplx integrate_gk(const std::function<Cplx(double)>& f, double a, double b,
                  double abs_tol = 1e-11, double rel_tol = 1e-11,
                  int max_depth = 28);

/// Same, splitting the interval at the given interior breakpoints first
/// (kernel kinks such as x = z).
Cplx integrate_gk_split(const std::function<Cplx(double)>& f, double a, double b,
                        std::vector<double> kinks, double abs_tol = 1e-11,
                        double rel_tol = 1e-11);

/// Gauss-Legendre nodes/weights on [-1,1], any n >= 1.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss-Legendre nodes/weights mapped to [a,b].
void gauss_legendre_ab(int n, double a, double b, std::vector<double>& nodes,
                       std::vector<double>& weights);

}  // namespace oswald

#pragma once

#include <complex>

namespace heavycomb {

/// 1 - E[exp(-z (U - 1))] for U ~ Pareto(shape a, scale 1), Re z > 0.
///
/// The Laplace transform of U is a * E_{a+1}(z) (generalized exponential
/// integral). The complement is evaluated directly, without forming
/// 1 - (something close to 1), by a power series for |z| <= 1 (separate
/// branches for integer and non-integer a) and a Legendre continued fraction
/// for e^z E_{a+1}(z) otherwise.
std::complex<double> pareto_laplace_complement(double a, std::complex<double> z);

/// P(U_1 + ... + U_n > t) for i.i.d. U_i = P_i^(-eta), P_i ~ Uniform(0,1),
/// i.e. the exact independence null of the Box-Cox statistic.
///
/// Computed by Euler-accelerated Fourier-series inversion of the Laplace
/// transform of the survival function of S - n (Abate & Whitt). The
/// discretization error is proportional to G(3t) e^{-A}, so the result is
/// accurate to roughly 1e-8 relative, also far in the tail.
double box_cox_sum_survival(double eta, int n, double t);

/// Smallest t with box_cox_sum_survival(eta, n, t) <= alpha (0 < alpha < 1).
double box_cox_sum_quantile(double eta, int n, double alpha);

}  // namespace heavycomb

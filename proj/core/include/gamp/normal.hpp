#pragma once

#include <span>
#include <vector>

namespace gamp {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Standard normal density.
double norm_pdf(double x);
// Standard normal cdf, accurate in both tails.
double norm_cdf(double x);
// log Phi(x) without underflow for very negative x.
double log_norm_cdf(double x);
// phi(x) / Phi(x). Uses a continued fraction below x = -8 where the direct ratio is 0/0-prone.
double inv_mills(double x);
// Inverse of the standard normal cdf on (0, 1).
double norm_quantile(double p);

// log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

// log N(x; mean, var).
double log_gauss_pdf(double x, double mean, double var);

// Logistic sigmoid 1 / (1 + exp(-x)), overflow-safe.
double sigmoid(double x);

// E[sigmoid(A)] for A ~ N(mean, var). Exact to ~1e-12 for any var, including steep regimes.
double logistic_gauss_expectation(double mean, double var);

// Quadrature rule on a reference measure.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Hermite rule for E[f(U)], U ~ N(0, 1). Weights sum to 1.
const QuadratureRule& gauss_hermite(int n);
// n-point Gauss-Legendre rule on [-1, 1]. Weights sum to 2.
const QuadratureRule& gauss_legendre(int n);

}  // namespace gamp

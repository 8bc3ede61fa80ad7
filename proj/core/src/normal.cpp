#include "gamp/normal.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "gamp/errors.hpp"

namespace gamp {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kMillsSwitch = -8.0;

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights scale the
// squared first eigenvector components.
QuadratureRule golub_welsch(int n, double mass, double (*offdiag)(int)) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = offdiag(k);
    jacobi(k - 1, k) = offdiag(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mass * v0 * v0;
  }
  return rule;
}

double hermite_offdiag(int k) { return std::sqrt(static_cast<double>(k)); }
double legendre_offdiag(int k) {
  const double kk = static_cast<double>(k);
  return kk / std::sqrt(4.0 * kk * kk - 1.0);
}

const QuadratureRule& cached_rule(int n, bool hermite) {
  static std::mutex mutex;
  static std::map<std::pair<int, bool>, std::unique_ptr<QuadratureRule>> cache;
  if (n < 1) throw DomainError("quadrature order must be >= 1");
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{n, hermite}];
  if (!slot) {
    slot = std::make_unique<QuadratureRule>(
        hermite ? golub_welsch(n, 1.0, hermite_offdiag) : golub_welsch(n, 2.0, legendre_offdiag));
  }
  return *slot;
}

}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double inv_mills(double x) {
  if (x >= kMillsSwitch) return norm_pdf(x) / norm_cdf(x);
  // Phi(-t)/phi(t) = 1/(t + 1/(t + 2/(t + 3/(t + ...)))), t = -x.
  const double t = -x;
  double f = t;
  for (int k = 120; k >= 1; --k) f = t + k / f;
  return f;
}

double log_norm_cdf(double x) {
  if (x < kMillsSwitch) return -0.5 * x * x - kLogSqrt2Pi - std::log(inv_mills(x));
  if (x < 0.0) return std::log(norm_cdf(x));
  return std::log1p(-0.5 * std::erfc(x / kSqrt2));
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("norm_quantile: p must lie in (0, 1)");
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double log_gauss_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * d * d / var - 0.5 * std::log(var) - kLogSqrt2Pi;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_gauss_expectation(double mean, double var) {
  if (!(var > 1e-300)) return sigmoid(mean);
  const double s = std::sqrt(var);
  if (s <= 0.5) {
    const auto& gh = gauss_hermite(63);
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) acc += gh.weights[i] * sigmoid(mean + s * gh.nodes[i]);
    return acc;
  }
  // Wide Gaussian: sigmoid(a) = 1{a > 0} + r(a), where r decays like exp(-|a|).
  // The step integrates in closed form; r is integrated panel-wise on [-L, L].
  constexpr double kHalfWidth = 36.0;
  constexpr int kPanels = 18;
  const auto& gl = gauss_legendre(16);
  const double h = kHalfWidth / kPanels;
  double remainder = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = p * h;
    const double mid = lo + 0.5 * h;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double a = mid + 0.5 * h * gl.nodes[i];
      const double w = 0.5 * h * gl.weights[i];
      const double tail = sigmoid(-a);
      // a > 0 contributes -sigmoid(-a); its mirror -a < 0 contributes +sigmoid(-a).
      remainder += w * tail * (std::exp(log_gauss_pdf(-a, mean, var)) - std::exp(log_gauss_pdf(a, mean, var)));
    }
  }
  return norm_cdf(mean / s) + remainder;
}

const QuadratureRule& gauss_hermite(int n) { return cached_rule(n, true); }
const QuadratureRule& gauss_legendre(int n) { return cached_rule(n, false); }

}  // namespace gamp

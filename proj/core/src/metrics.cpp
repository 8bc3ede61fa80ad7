#include "gamp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "gamp/errors.hpp"
#include "gamp/normal.hpp"

namespace gamp {

double closed_form_error(const Vector& w_true, const Vector& w_hat, double v) {
  if (w_true.size() != w_hat.size()) throw DomainError("closed_form_error: length mismatch");
  if (!(v > 0.0)) throw DomainError("closed_form_error: v must be positive");
  const double norm2 = w_hat.squaredNorm();
  if (!(norm2 > 0.0)) throw DomainError("closed_form_error: degenerate classifier (w_hat = 0)");
  return norm_cdf(-w_true.dot(w_hat) / std::sqrt(v * norm2));
}

double jaccard_consistency(const std::vector<Support>& supports) {
  const std::size_t n = supports.size();
  if (n < 2) throw DomainError("jaccard_consistency: need at least two supports");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Support& a = supports[i];
      const Support& b = supports[j];
      Support inter;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
      const std::size_t uni = a.size() + b.size() - inter.size();
      total += uni == 0 ? 1.0 : static_cast<double>(inter.size()) / static_cast<double>(uni);
    }
  }
  return total / static_cast<double>(n * (n - 1));
}

Index max_identifiable_K(Index N, Index M) {
  if (N < 1 || M < 1) throw DomainError("max_identifiable_K: need N >= 1 and M >= 1");
  Index best = 0;
  for (Index K = 1; K <= N; ++K) {
    const double bits = static_cast<double>(K) * std::log2(static_cast<double>(N) / static_cast<double>(K));
    if (static_cast<double>(M) < bits) break;
    best = K;
  }
  return best;
}

Support estimated_support(const Vector& nonzero_probs, double threshold) {
  Support out;
  for (Index n = 0; n < nonzero_probs.size(); ++n)
    if (nonzero_probs(n) > threshold) out.push_back(n);
  return out;
}

Support support_of(const Vector& w) {
  Support out;
  for (Index n = 0; n < w.size(); ++n)
    if (w(n) != 0.0) out.push_back(n);
  return out;
}

double weight_density(const Vector& w) {
  if (w.size() == 0) return 0.0;
  return static_cast<double>((w.array() != 0.0).count()) / static_cast<double>(w.size());
}

double error_rate(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size()) throw DomainError("error_rate: length mismatch");
  if (y_true.size() == 0) return 0.0;
  return static_cast<double>((y_true.array() != y_pred.array()).count()) / static_cast<double>(y_true.size());
}

}  // namespace gamp

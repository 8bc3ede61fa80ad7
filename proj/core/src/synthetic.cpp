#include "gamp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gamp/errors.hpp"
#include "gamp/normal.hpp"

namespace gamp {

SyntheticTruth gen_sparse_weights(Index N, Index K, Amplitude amplitude, Rng& rng) {
  if (K <= 0 || K > N) throw DomainError("gen_sparse_weights: need 0 < K <= N");
  std::vector<Index> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), Index{0});
  // partial Fisher-Yates: the first K slots are a uniform K-subset
  for (Index k = 0; k < K; ++k) {
    std::uniform_int_distribution<Index> pick(k, N - 1);
    std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(pick(rng))]);
  }
  SyntheticTruth truth;
  truth.w = Vector::Zero(N);
  truth.K = K;
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index k = 0; k < K; ++k) {
    double a = 0.0;
    if (amplitude == Amplitude::kPlusMinusOne) {
      a = coin(rng) ? 1.0 : -1.0;
    } else {
      // a standard normal draw of exactly 0 would break ||w||_0 = K
      do a = gauss(rng); while (a == 0.0);
    }
    truth.w(perm[static_cast<std::size_t>(k)]) = a;
  }
  return truth;
}

SyntheticTruth gen_bernoulli_gaussian_weights(Index N, double pi, double slab_var, Rng& rng) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw DomainError("gen_bernoulli_gaussian_weights: pi must lie in [0, 1]");
  if (!(slab_var > 0.0)) throw DomainError("gen_bernoulli_gaussian_weights: slab variance must be positive");
  SyntheticTruth truth;
  truth.w = Vector::Zero(N);
  std::bernoulli_distribution active(pi);
  std::normal_distribution<double> gauss(0.0, std::sqrt(slab_var));
  for (Index n = 0; n < N; ++n)
    if (active(rng)) truth.w(n) = gauss(rng);
  truth.K = static_cast<Index>((truth.w.array() != 0.0).count());
  return truth;
}

Dataset gen_probit_data(const SyntheticTruth& truth, Index M, double feature_var, double v, Rng& rng) {
  if (!(feature_var > 0.0)) throw DomainError("gen_probit_data: feature_var must be positive");
  if (!(v >= 0.0)) throw DomainError("gen_probit_data: v must be non-negative");
  const Index N = truth.w.size();
  std::normal_distribution<double> feat(0.0, std::sqrt(feature_var));
  DenseMatrix x(M, N);
  // row-major fill order keeps the stream layout independent of Eigen storage
  for (Index m = 0; m < M; ++m)
    for (Index n = 0; n < N; ++n) x(m, n) = feat(rng);
  Vector y(M);
  const Vector z = x * truth.w;
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sd = std::sqrt(v);
  for (Index m = 0; m < M; ++m) {
    const double e = v > 0.0 ? sd * noise(rng) : 0.0;
    y(m) = (z(m) - e) >= 0.0 ? 1.0 : -1.0;
  }
  return Dataset{FeatureMatrix(std::move(x)), std::move(y)};
}

Dataset gen_class_conditional(const Vector& w, Index M, double noise_var, bool balanced, Rng& rng) {
  if (!(noise_var > 0.0)) throw DomainError("gen_class_conditional: noise variance must be positive");
  const Index N = w.size();
  Vector y(M);
  if (balanced) {
    const Index positives = (M + 1) / 2;
    for (Index m = 0; m < M; ++m) y(m) = m < positives ? 1.0 : -1.0;
    std::shuffle(y.data(), y.data() + M, rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (Index m = 0; m < M; ++m) y(m) = coin(rng) ? 1.0 : -1.0;
  }
  std::normal_distribution<double> noise(0.0, std::sqrt(noise_var));
  DenseMatrix x(M, N);
  for (Index m = 0; m < M; ++m)
    for (Index n = 0; n < N; ++n) x(m, n) = y(m) * w(n) + noise(rng);
  return Dataset{FeatureMatrix(std::move(x)), std::move(y)};
}

double class_mean_for_bayes_error(Index N, Index M, double eps_bayes) {
  if (!(eps_bayes > 0.0 && eps_bayes < 0.5)) throw DomainError("class_mean_for_bayes_error: need 0 < eps_bayes < 0.5");
  return -norm_quantile(eps_bayes) / std::sqrt(static_cast<double>(N) * static_cast<double>(M));
}

std::pair<Dataset, SyntheticTruth> gen_class_conditional(Index N, Index M, double eps_bayes, bool balanced,
                                                         Rng& rng) {
  SyntheticTruth truth;
  truth.mu = class_mean_for_bayes_error(N, M, eps_bayes);
  truth.w = Vector::Constant(N, truth.mu);
  truth.K = N;
  truth.model = GenerativeModel::kClassConditional;
  truth.v = 1.0 / static_cast<double>(M);
  Dataset data = gen_class_conditional(truth.w, M, truth.v, balanced, rng);
  return {std::move(data), std::move(truth)};
}

std::pair<Vector, Vector> flip_labels(const Vector& y, double gamma, Rng& rng) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("flip_labels: gamma must lie in [0, 1]");
  std::bernoulli_distribution flip(gamma);
  Vector out = y;
  Vector beta = Vector::Ones(y.size());
  for (Index m = 0; m < y.size(); ++m) {
    if (flip(rng)) {
      out(m) = -y(m);
      beta(m) = 0.0;
    }
  }
  return {std::move(out), std::move(beta)};
}

}  // namespace gamp

#pragma once

#include <random>
#include <utility>

#include "gamp/dataset.hpp"

namespace gamp {

using Rng = std::mt19937_64;

enum class Amplitude { kPlusMinusOne, kGaussian };
enum class GenerativeModel { kProbitScore, kClassConditional };

struct SyntheticTruth {
  Vector w;
  Index K = 0;
  GenerativeModel model = GenerativeModel::kProbitScore;
  double v = 0.0;   // probit score noise variance, or per-feature variance for class-conditional data
  double mu = 0.0;  // class-mean scale of the dense class-conditional generator (0 otherwise)
};

// Exactly K nonzeros on a uniformly drawn support. Throws DomainError unless 0 < K <= N.
SyntheticTruth gen_sparse_weights(Index N, Index K, Amplitude amplitude, Rng& rng);

// i.i.d. Bernoulli(pi)-Gaussian(0, slab_var) weights; K records the realized support size.
SyntheticTruth gen_bernoulli_gaussian_weights(Index N, double pi, double slab_var, Rng& rng);

// X i.i.d. N(0, feature_var); y_m = sgn(x_m^T w - e_m), e_m ~ N(0, v). sgn(0) = +1.
Dataset gen_probit_data(const SyntheticTruth& truth, Index M, double feature_var, double v, Rng& rng);

// x_m | y_m ~ N(y_m w, noise_var I). Balanced labels have exactly ceil(M/2) positives in random order.
Dataset gen_class_conditional(const Vector& w, Index M, double noise_var, bool balanced, Rng& rng);

// Dense class-conditional model: x_mn | y_m ~ N(y_m mu, 1/M) with mu chosen so that the
// Bayes error Phi(-sqrt(N M) mu) equals eps_bayes. Requires 0 < eps_bayes < 0.5.
std::pair<Dataset, SyntheticTruth> gen_class_conditional(Index N, Index M, double eps_bayes, bool balanced,
                                                         Rng& rng);

// Class mean scale mu solving eps_bayes = Phi(-sqrt(N M) mu).
double class_mean_for_bayes_error(Index N, Index M, double eps_bayes);

// Negates each label independently with probability gamma. beta_m = 0 marks a flipped label.
std::pair<Vector, Vector> flip_labels(const Vector& y, double gamma, Rng& rng);

}  // namespace gamp

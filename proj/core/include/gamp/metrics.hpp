#pragma once

#include <vector>

#include "gamp/dataset.hpp"

namespace gamp {

using Support = std::vector<Index>;  // sorted 0-based feature indices

// Expected misclassification of sgn(x^T w_hat) when y = sgn(x^T w_true - e), e ~ N(0, v),
// i.e. Phi(-w_true^T w_hat / sqrt(v ||w_hat||^2)). Throws DomainError for w_hat = 0 or v <= 0.
double closed_form_error(const Vector& w_true, const Vector& w_hat, double v);

// Mean Jaccard index over ordered pairs (i, j != i). Two empty sets score 1.
// Throws DomainError for fewer than two sets.
double jaccard_consistency(const std::vector<Support>& supports);

// Largest K reached by scanning K = 1, 2, ... while M >= K log2(N / K) holds (0 if K = 1 already fails).
Index max_identifiable_K(Index N, Index M);

// Indices whose posterior support probability is strictly above threshold.
Support estimated_support(const Vector& nonzero_probs, double threshold = 0.5);

// Indices of nonzero weights.
Support support_of(const Vector& w);

// Fraction of nonzero weights.
double weight_density(const Vector& w);

// Fraction of positions where the labels disagree.
double error_rate(const Vector& y_true, const Vector& y_pred);

}  // namespace gamp

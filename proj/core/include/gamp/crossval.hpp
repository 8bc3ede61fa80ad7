#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gamp/dataset.hpp"
#include "gamp/metrics.hpp"

namespace gamp {

struct XvalSpec {
  int folds = 2;
  std::vector<std::string> names;
  // One grid per tuned parameter; the search covers their Cartesian product.
  std::vector<std::vector<double>> grids;

  void validate() const;
  std::size_t grid_points() const;
  // Parameter vector of the i-th grid point; the first parameter varies slowest.
  std::vector<double> point(std::size_t index) const;
};

struct FittedModel {
  Vector w_hat;
  // Support used for the sparsity tie-break and Jaccard consistency.
  Support support;
  std::function<Vector(const FeatureMatrix&)> predict;  // +/-1 labels
};

using TrainFn = std::function<FittedModel(const Dataset& train, const std::vector<double>& params)>;

struct GridScore {
  std::vector<double> params;
  double error = 0.0;    // mean held-out error over folds
  double density = 0.0;  // mean support fraction over folds
  double jaccard = 1.0;  // support consistency across folds
  bool diverged = false;
};

struct XvalResult {
  std::size_t best_index = 0;
  std::vector<double> best_params;
  std::vector<GridScore> scores;
  // K * G^P: one classifier per fold and grid point.
  std::size_t classifiers_trained = 0;
  std::vector<std::string> notes;
};

// Fold assignment: a seeded permutation dealt round-robin. Returns held-out rows per fold.
std::vector<std::vector<Index>> make_folds(Index m, int folds, std::uint64_t seed);

// Minimizes held-out error; ties go to the sparser model, then to the smaller grid index.
// A grid point whose training throws a numeric error scores 1.0 and is noted.
XvalResult cross_validate(const Dataset& data, const XvalSpec& spec, const TrainFn& train, std::uint64_t seed);

// Logarithmically spaced grid of `count` values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace gamp

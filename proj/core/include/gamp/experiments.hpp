#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gamp/em.hpp"
#include "gamp/engine.hpp"
#include "gamp/state_evolution.hpp"

namespace gamp {

// Phase-plane check: state-evolution prediction versus finite-N GAMP averages under a
// Bernoulli-Gaussian prior, i.i.d. N(0, 1/M) features and probit labels.
struct Fig2Config {
  Index n = 1024;
  int trials = 200;
  double probit_v = 0.01;
  double slab_var = 1.0;
  SEConfig se;
  GampConfig gamp;
  std::uint64_t seed = 1;

  Fig2Config() {
    gamp.tol = 1e-5;
    gamp.max_iter = 300;
  }
};

struct Fig2Row {
  SweepRow row;
  double epsilon_emp_sd = 0.0;
  double mse_emp_sd = 0.0;
  int trials = 0;
  int failures = 0;
};

std::vector<Fig2Row> run_fig2(const std::vector<SweepPoint>& grid, const Fig2Config& config);
void write_fig2_csv(std::ostream& os, const std::vector<Fig2Row>& rows);

// N >> M sparse classification with +/-1 amplitudes and class-conditional features.
enum class Fig3Method { kProbit, kLogistic, kHinge, kOneBitCS };
const char* to_string(Fig3Method m);

struct Fig3Config {
  Index n = 30000;
  Index m = 300;
  std::vector<Index> ks{5, 10, 15, 20, 25, 30};
  std::vector<Fig3Method> methods{Fig3Method::kProbit};
  int trials = 50;
  double eps_bayes = 0.05;
  // Initial nonzero probability is pi0_scale * M / N.
  double pi0_scale = 0.1;
  double v0 = 1.0;
  double alpha0 = 1.0;
  double slab_var = 1.0;
  int em_iters = 5;
  GampConfig gamp;
  // OneBitCS: folds and search radius around the true K.
  int xval_folds = 2;
  Index xval_radius = 10;
  std::uint64_t seed = 1;
};

struct Fig3Row {
  Index k = 0;
  Fig3Method method = Fig3Method::kProbit;
  int trials = 0;
  int failures = 0;
  double error_mean = 0.0;
  double error_sd = 0.0;
  double khat_mean = 0.0;
  double khat_sd = 0.0;
};

// Per-trial feature noise variance that puts the Bayes error at eps_bayes for K unit weights.
double fig3_feature_variance(Index k, double eps_bayes);

std::vector<Fig3Row> run_fig3(const Fig3Config& config);
void write_fig3_csv(std::ostream& os, const std::vector<Fig3Row>& rows);

// Label-noise robustness on dense class-conditional data.
enum class Fig4Classifier { kGenieLogistic, kGenieRobust, kEmLogistic, kEmRobust };
const char* to_string(Fig4Classifier c);

struct Fig4Config {
  Index n = 512;
  Index m = 8192;
  Index test = 1024;
  std::vector<double> gammas{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  std::vector<Fig4Classifier> classifiers{Fig4Classifier::kGenieLogistic, Fig4Classifier::kGenieRobust,
                                          Fig4Classifier::kEmLogistic, Fig4Classifier::kEmRobust};
  int trials = 10;
  double eps_bayes = 0.05;
  double em_alpha = 100.0;
  double gamma0 = 0.01;
  int em_iters = 5;
  GampConfig gamp;
  std::uint64_t seed = 1;
};

struct Fig4Row {
  double gamma = 0.0;
  Fig4Classifier classifier = Fig4Classifier::kGenieLogistic;
  int trials = 0;
  int failures = 0;
  double error_mean = 0.0;
  double error_sd = 0.0;
  // Final EM estimate of gamma (robust EM classifier only, NaN otherwise).
  double gamma_hat_mean = 0.0;
};

std::vector<Fig4Row> run_fig4(const Fig4Config& config);
void write_fig4_csv(std::ostream& os, const std::vector<Fig4Row>& rows);

}  // namespace gamp

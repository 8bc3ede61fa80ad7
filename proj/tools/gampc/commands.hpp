#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "options.hpp"

namespace gampc {

struct DataOptions {
  std::string path;
  std::string format = "auto";  // auto picks csv for *.csv, libsvm otherwise
  long long features = 0;       // libsvm feature count override; 0 infers it
};

struct TrainOptions {
  ModelOptions model;
  DataOptions data;
  std::string test;
  std::string model_out;
  std::string report;
  std::string trace;
  std::string theta_trace;
  // Predictions for --test, in the same format as the predict subcommand.
  std::string predictions;
};

struct PredictOptions {
  std::string model;
  DataOptions data;
  std::string out;
};

struct XvalOptions {
  ModelOptions model;
  DataOptions data;
  // name=lo:hi:count (log-spaced) or name=a,b,c
  std::vector<std::string> grids;
  int folds = 2;
  std::uint64_t seed = 1;
  std::string report;
  std::string model_out;
};

struct SweepOptions {
  std::vector<double> m_over_n{0.2, 0.4, 0.6};
  std::vector<double> k_over_n{0.02, 0.05, 0.1};
  double v = 0.01;
  double slab_var = 1.0;
  int mc_samples = 100000;
  int se_iters = 100;
  int trials = 0;  // > 0 joins an empirical GAMP ensemble at each point
  long long n = 1024;
  std::uint64_t seed = 1;
  std::string out;
};

struct SynthOptions {
  std::string generator = "probit";  // probit, class-conditional, dense
  long long n = 1000;
  long long m = 500;
  long long k = 10;
  std::string amplitude = "pm1";
  double feature_var = 0.0;  // 0 means 1/M for probit data
  double v = 0.01;
  double eps_bayes = 0.05;
  double gamma = 0.0;
  bool unbalanced = false;
  std::string format = "libsvm";
  std::string out;
  std::string truth;
  // Optional clean held-out set drawn from the same truth.
  std::string test_out;
  long long test_m = 1000;
  std::uint64_t seed = 1;
};

struct ReproduceOptions {
  std::string figure;
  std::uint64_t seed = 1;
  int trials = 0;  // 0 keeps the experiment default
  std::string out;
  long long n = 0;
  long long m = 0;
  std::vector<long long> ks;
  std::vector<std::string> methods;
  std::vector<double> gammas;
  std::vector<std::string> points;
  int em_iters = 0;
};

int cmd_train(const TrainOptions& o);
int cmd_predict(const PredictOptions& o);
int cmd_xval(const XvalOptions& o);
int cmd_sweep(const SweepOptions& o);
int cmd_synth(const SynthOptions& o);
int cmd_reproduce(const ReproduceOptions& o);

}  // namespace gampc

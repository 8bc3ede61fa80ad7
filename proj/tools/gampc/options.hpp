#pragma once

#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gamp/em.hpp"
#include "gamp/engine.hpp"
#include "gamp/input_channel.hpp"
#include "gamp/output_channel.hpp"

namespace gampc {

// Everything needed to build a classifier from the command line or an INI file.
struct ModelOptions {
  std::string activation = "probit";
  double alpha = 1.0;
  double v = 1.0;
  bool robust = false;
  double gamma = 0.0;

  std::string prior = "gaussian";
  bool spike = false;
  double pi = 0.1;
  double mu = 0.0;
  double sigma2 = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  // "omega:mu:sigma2" triples separated by commas.
  std::string mixture;

  std::string mode = "sum-product";
  std::vector<std::string> tune;
  int em_iters = 5;
  std::string cadence = "auto";

  int max_iter = 200;
  double tol = 1e-3;
  double damping = 0.9;
  bool no_variance_damping = false;
  bool scalar_variance = false;
};

void add_model_options(CLI::App& app, ModelOptions& o);

gamp::OutputChannel make_output(const ModelOptions& o);
gamp::InputChannel make_prior(const ModelOptions& o);
gamp::GampConfig make_gamp_config(const ModelOptions& o);
gamp::TuneMask make_mask(const ModelOptions& o);
gamp::EMConfig make_em_config(const ModelOptions& o);

// Sets one named hyperparameter (alpha, v, gamma, pi, mu, sigma2, lambda1, lambda2) on o.
void set_param(ModelOptions& o, const std::string& name, double value);

std::vector<gamp::MixtureComponent> parse_mixture(const std::string& text);

}  // namespace gampc

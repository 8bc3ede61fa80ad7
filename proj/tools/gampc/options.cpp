#include "options.hpp"

#include <sstream>

#include "gamp/errors.hpp"

namespace gampc {

using gamp::ConfigError;

void add_model_options(CLI::App& app, ModelOptions& o) {
  app.add_option("--activation", o.activation, "logistic, probit or hinge")
      ->check(CLI::IsMember({"logistic", "probit", "hinge"}))
      ->capture_default_str();
  app.add_option("--alpha", o.alpha, "logistic steepness")->capture_default_str();
  app.add_option("--v", o.v, "probit noise variance")->capture_default_str();
  app.add_flag("--robust", o.robust, "wrap the activation for corrupted labels");
  app.add_option("--gamma", o.gamma, "label-corruption probability of the robust wrapper")->capture_default_str();

  app.add_option("--prior", o.prior, "gaussian, laplacian, elastic-net or mixture")
      ->check(CLI::IsMember({"gaussian", "laplacian", "elastic-net", "mixture"}))
      ->capture_default_str();
  app.add_flag("--spike", o.spike, "mix the prior with a point mass at zero");
  app.add_option("--pi", o.pi, "nonzero probability of the spike-and-slab prior")->capture_default_str();
  app.add_option("--mu", o.mu, "Gaussian prior / slab mean")->capture_default_str();
  app.add_option("--sigma2", o.sigma2, "Gaussian prior / slab variance")->capture_default_str();
  app.add_option("--lambda1", o.lambda1, "l1 weight (laplacian, elastic-net)")->capture_default_str();
  app.add_option("--lambda2", o.lambda2, "l2 weight (elastic-net)")->capture_default_str();
  app.add_option("--mixture", o.mixture, "Gaussian mixture as omega:mu:sigma2,...");

  app.add_option("--mode", o.mode, "sum-product or max-sum")
      ->check(CLI::IsMember({"sum-product", "max-sum"}))
      ->capture_default_str();
  app.add_option("--tune", o.tune, "EM-tuned parameters: alpha,v,gamma,pi,mu,sigma2,lambda1")
      ->delimiter(',')
      ->check(CLI::IsMember({"alpha", "v", "gamma", "pi", "mu", "sigma2", "lambda1"}));
  app.add_option("--em-iters", o.em_iters, "EM iterations (per-run) or minimum updates (per-iteration)")
      ->capture_default_str();
  app.add_option("--cadence", o.cadence, "auto, per-iteration or per-run")
      ->check(CLI::IsMember({"auto", "per-iteration", "per-run"}))
      ->capture_default_str();

  app.add_option("--max-iter", o.max_iter, "GAMP iteration cap")->capture_default_str();
  app.add_option("--tol", o.tol, "relative-change stopping tolerance")->capture_default_str();
  app.add_option("--damping", o.damping, "damping factor in (0, 1]; 1 disables damping")->capture_default_str();
  app.add_flag("--no-variance-damping", o.no_variance_damping, "damp only the means");
  app.add_flag("--scalar-variance", o.scalar_variance, "replace |X|^2 products by their mean (saves memory)");
}

gamp::OutputChannel make_output(const ModelOptions& o) {
  gamp::OutputChannel out = gamp::OutputChannel::probit(o.v);
  if (o.activation == "logistic") out = gamp::OutputChannel::logistic(o.alpha);
  else if (o.activation == "hinge") out = gamp::OutputChannel::hinge();
  if (o.robust || o.gamma > 0.0) out = out.robustified(o.gamma);
  return out;
}

std::vector<gamp::MixtureComponent> parse_mixture(const std::string& text) {
  std::vector<gamp::MixtureComponent> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    gamp::MixtureComponent c;
    char c1 = 0, c2 = 0;
    std::istringstream is(item);
    if (!(is >> c.omega >> c1 >> c.mu >> c2 >> c.sigma2) || c1 != ':' || c2 != ':')
      throw ConfigError("--mixture: expected omega:mu:sigma2, got '" + item + "'");
    out.push_back(c);
  }
  if (out.empty()) throw ConfigError("--mixture: no components");
  return out;
}

gamp::InputChannel make_prior(const ModelOptions& o) {
  gamp::InputChannel in = gamp::InputChannel::gaussian(o.mu, o.sigma2);
  if (o.prior == "laplacian") in = gamp::InputChannel::laplacian(o.lambda1);
  else if (o.prior == "elastic-net") in = gamp::InputChannel::elastic_net(o.lambda1, o.lambda2);
  else if (o.prior == "mixture") in = gamp::InputChannel::gaussian_mixture(parse_mixture(o.mixture));
  if (o.spike) in = gamp::InputChannel::spike_slab(o.pi, in);
  return in;
}

gamp::GampConfig make_gamp_config(const ModelOptions& o) {
  gamp::GampConfig g;
  g.mode = o.mode == "max-sum" ? gamp::Mode::kMaxSum : gamp::Mode::kSumProduct;
  g.max_iter = o.max_iter;
  g.tol = o.tol;
  g.damping = o.damping;
  g.damp_variances = !o.no_variance_damping;
  g.validate();
  return g;
}

gamp::TuneMask make_mask(const ModelOptions& o) {
  gamp::TuneMask m;
  for (const auto& t : o.tune) {
    if (t == "alpha") m.alpha = true;
    else if (t == "v") m.v = true;
    else if (t == "gamma") m.gamma = true;
    else if (t == "pi") m.pi = true;
    else if (t == "mu") m.slab_mean = true;
    else if (t == "sigma2") m.slab_var = true;
    else if (t == "lambda1") m.lambda1 = true;
  }
  return m;
}

gamp::EMConfig make_em_config(const ModelOptions& o) {
  gamp::EMConfig em;
  em.em_iters = o.em_iters;
  em.gamp = make_gamp_config(o);
  if (o.cadence == "per-iteration") em.cadence = gamp::Cadence::kPerIteration;
  else if (o.cadence == "per-run") em.cadence = gamp::Cadence::kPerRun;
  em.validate();
  return em;
}

void set_param(ModelOptions& o, const std::string& name, double value) {
  if (name == "alpha") o.alpha = value;
  else if (name == "v") o.v = value;
  else if (name == "gamma") o.gamma = value;
  else if (name == "pi") o.pi = value;
  else if (name == "mu") o.mu = value;
  else if (name == "sigma2") o.sigma2 = value;
  else if (name == "lambda1") o.lambda1 = value;
  else if (name == "lambda2") o.lambda2 = value;
  else throw ConfigError("unknown parameter '" + name + "'");
}

}  // namespace gampc

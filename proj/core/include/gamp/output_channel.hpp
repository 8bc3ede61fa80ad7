#pragma once

namespace gamp {

// Posterior summary of a scalar Gaussian-prior / likelihood product.
struct ScalarMoments {
  double mean = 0.0;
  double var = 0.0;
  // log of the normalizer C_y = \int p(y|z) N(z; p_hat, tau_p) dz (sum-product only).
  double log_scale = 0.0;
};

enum class Activation { kLogistic, kProbit, kHinge };

// Output-side scalar estimator consumed by the GAMP engine.
class OutputModel {
 public:
  virtual ~OutputModel() = default;
  // Mean/variance of z under p(y|z) N(z; p_hat, tau_p).
  virtual ScalarMoments sum_product(double y, double p_hat, double tau_p) const = 0;
  // prox_{tau_p f}(p_hat) with f = -log p(y|.), and tau_p * prox'.
  virtual ScalarMoments max_sum(double y, double p_hat, double tau_p) const = 0;
  // -log p(y|z), used for the max-sum objective.
  virtual double loss(double y, double z) const = 0;
  // P(y = +1) under z ~ N(z_hat, tau_z).
  virtual double predict_proba(double z_hat, double tau_z) const = 0;
};

// Probit sum-product moments (closed form). Requires tau_p > 0, v > 0.
ScalarMoments probit_spg(double y, double p_hat, double tau_p, double v);

struct LogisticMoments {
  ScalarMoments moments;
  double xi = 0.0;  // converged variational parameter
  int iterations = 0;
  bool converged = false;
};

// Variational fixed point for the logistic likelihood 1/(1+exp(-alpha y z)).
// Moments come from the variational Gaussian; log_scale is the exact log E[sigmoid(alpha y z)].
LogisticMoments logistic_spg(double y, double p_hat, double tau_p, double alpha, double tol = 1e-9,
                             int max_iter = 100);

// lambda(xi) = alpha/(2 xi) (sigmoid(alpha xi) - 1/2), with its xi -> 0 limit alpha^2/8.
double logistic_lambda(double xi, double alpha);

// Hinge sum-product moments for the un-normalized likelihood exp(-max(0, 1 - y z)).
ScalarMoments hinge_spg(double y, double p_hat, double tau_p);

struct RobustMoments {
  ScalarMoments moments;
  // P(label corrupted | y, p_hat, tau_p); the E-step quantity behind the gamma update.
  double responsibility = 0.0;
};

// Wraps inner moments (z*, tau_z*, log C*) for the likelihood gamma + (1 - 2 gamma) p*(y|z).
RobustMoments robust_spg(double p_hat, double tau_p, double gamma, const ScalarMoments& inner);

// Immutable activation-function description: logistic(alpha), probit(v), hinge, each optionally
// robustified with corruption probability gamma in [0, 1/2).
class OutputChannel final : public OutputModel {
 public:
  static OutputChannel logistic(double alpha);
  static OutputChannel probit(double v);
  static OutputChannel hinge();
  // Same activation wrapped as gamma + (1 - 2 gamma) p*(y|z).
  OutputChannel robustified(double gamma) const;

  Activation activation() const { return activation_; }
  double alpha() const { return alpha_; }
  double v() const { return v_; }
  double gamma() const { return gamma_; }
  bool robust() const { return robust_; }

  OutputChannel with_alpha(double alpha) const;
  OutputChannel with_v(double v) const;
  OutputChannel with_gamma(double gamma) const;

  ScalarMoments sum_product(double y, double p_hat, double tau_p) const override;
  ScalarMoments max_sum(double y, double p_hat, double tau_p) const override;
  double loss(double y, double z) const override;
  double predict_proba(double z_hat, double tau_z) const override;

  // Sum-product moments of the activation without the robust wrapper.
  ScalarMoments inner_sum_product(double y, double p_hat, double tau_p) const;
  // P(beta = 0 | y) for the robust wrapper; 0 when not robust.
  double corruption_responsibility(double y, double p_hat, double tau_p) const;

  // p(y|u) and its first two u-derivatives (un-normalized for hinge), including the robust wrapper.
  struct LikelihoodDerivs {
    double p, dp, d2p;
  };
  LikelihoodDerivs likelihood(double y, double u) const;
  // f = -log p(y|u): value, first and second derivative in u.
  double loss_derivative(double y, double u) const;
  double loss_curvature(double y, double u) const;

 private:
  OutputChannel(Activation a, double alpha, double v) : activation_(a), alpha_(alpha), v_(v) {}
  LikelihoodDerivs inner_likelihood(double y, double u) const;

  Activation activation_;
  double alpha_ = 1.0;
  double v_ = 1.0;
  double gamma_ = 0.0;
  bool robust_ = false;
};

// Max-sum prox: z = argmin_u f(u) + (u - p_hat)^2 / (2 tau_p), var = tau_p / (1 + tau_p f''(z)).
// Hinge uses its closed form; other channels bisect on the stationarity condition.
ScalarMoments msg_prox(const OutputChannel& channel, double y, double p_hat, double tau_p);

// P(y = +1 | data) = \int p(+1|z) N(z; z_hat, tau_z) dz.
double predict_proba(const OutputChannel& channel, double z_hat, double tau_z);

}  // namespace gamp

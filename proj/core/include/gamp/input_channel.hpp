#pragma once

#include <vector>

namespace gamp {

// Posterior summary of W under p(w) N(w; r_hat, tau_r).
struct PriorMoments {
  double mean = 0.0;
  double var = 0.0;
  double nonzero_prob = 1.0;
  // log \int p(w) N(w; r_hat, tau_r) dw (0 for improper flat priors).
  double log_scale = 0.0;
  // E|W| under the posterior; the Laplacian rate update needs it.
  double abs_mean = 0.0;
  // Slab-only posterior moments (equal to mean/var for priors without a spike).
  double slab_mean = 0.0;
  double slab_var = 0.0;
};

enum class PriorKind { kGaussian, kLaplacian, kElasticNet, kGaussianMixture };

struct MixtureComponent {
  double omega = 1.0;
  double mu = 0.0;
  double sigma2 = 1.0;
};

// Input-side scalar estimator consumed by the GAMP engine.
class InputModel {
 public:
  virtual ~InputModel() = default;
  virtual PriorMoments sum_product(double r_hat, double tau_r) const = 0;
  // prox of the negative log prior; var = tau_r * prox'.
  virtual PriorMoments max_sum(double r_hat, double tau_r) const = 0;
  // -log p(w) up to an additive constant.
  virtual double penalty(double w) const = 0;
  virtual bool supports_max_sum() const = 0;
  // Var(W) under the prior, used to initialize tau_w.
  virtual double prior_variance() const = 0;
};

PriorMoments gaussian_spg(double r_hat, double tau_r, double mu, double sigma2);
PriorMoments elastic_net_spg(double r_hat, double tau_r, double lambda1, double lambda2);
PriorMoments elastic_net_msg(double r_hat, double tau_r, double lambda1, double lambda2);
PriorMoments gaussian_mixture_spg(double r_hat, double tau_r, const std::vector<MixtureComponent>& mixture);
// Bernoulli mixture of a point mass at zero and the given slab moments.
PriorMoments spike_slab_spg(double r_hat, double tau_r, double pi, const PriorMoments& slab);

// Separable weight prior, optionally mixed with a point mass at zero (Bernoulli spike-and-slab).
class InputChannel final : public InputModel {
 public:
  static InputChannel gaussian(double mu, double sigma2);
  static InputChannel laplacian(double lambda1);
  static InputChannel elastic_net(double lambda1, double lambda2);
  static InputChannel gaussian_mixture(std::vector<MixtureComponent> mixture);
  static InputChannel spike_slab(double pi, const InputChannel& slab);

  PriorKind kind() const { return kind_; }
  bool spike() const { return spike_; }
  double pi() const { return pi_; }
  double mu() const { return mu_; }
  double sigma2() const { return sigma2_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  const std::vector<MixtureComponent>& mixture() const { return mixture_; }

  InputChannel with_pi(double pi) const;
  InputChannel with_gaussian(double mu, double sigma2) const;
  InputChannel with_lambda1(double lambda1) const;
  // Slab alone (the same channel without a spike).
  InputChannel slab() const;

  PriorMoments sum_product(double r_hat, double tau_r) const override;
  PriorMoments max_sum(double r_hat, double tau_r) const override;
  double penalty(double w) const override;
  bool supports_max_sum() const override;
  double prior_variance() const override;
  double prior_mean() const;

 private:
  InputChannel() = default;
  PriorMoments slab_sum_product(double r_hat, double tau_r) const;
  double slab_second_moment() const;
  double slab_mean_value() const;

  PriorKind kind_ = PriorKind::kGaussian;
  double mu_ = 0.0;
  double sigma2_ = 1.0;
  double lambda1_ = 0.0;
  double lambda2_ = 0.0;
  std::vector<MixtureComponent> mixture_;
  bool spike_ = false;
  double pi_ = 1.0;
};

}  // namespace gamp

#include "gamp/input_channel.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "gamp/errors.hpp"
#include "gamp/normal.hpp"

namespace gamp {

namespace {

void check_tau(double tau_r) {
  if (!(tau_r > 0.0)) throw DomainError("input channel: tau_r must be positive");
}

// E|X| for X ~ N(m, v).
double folded_mean(double m, double v) {
  if (v <= 0.0) return std::abs(m);
  const double s = std::sqrt(v);
  return s * std::sqrt(2.0 / kPi) * std::exp(-0.5 * m * m / v) + m * (1.0 - 2.0 * norm_cdf(-m / s));
}

PriorMoments flat(double r_hat, double tau_r) {
  PriorMoments out;
  out.mean = out.slab_mean = r_hat;
  out.var = out.slab_var = tau_r;
  out.abs_mean = folded_mean(r_hat, tau_r);
  return out;
}

// Mean and variance of N(c, s^2) truncated to (0, inf).
std::pair<double, double> positive_truncation(double c, double s) {
  const double a = c / s;
  const double q = inv_mills(a);
  return {c + s * q, std::max(s * s * (1.0 - q * (q + a)), 0.0)};
}

}  // namespace

PriorMoments gaussian_spg(double r_hat, double tau_r, double mu, double sigma2) {
  check_tau(tau_r);
  if (!(sigma2 > 0.0)) throw DomainError("gaussian_spg: sigma2 must be positive");
  PriorMoments out;
  out.var = 1.0 / (1.0 / sigma2 + 1.0 / tau_r);
  out.mean = out.var * (mu / sigma2 + r_hat / tau_r);
  out.log_scale = log_gauss_pdf(r_hat, mu, sigma2 + tau_r);
  out.abs_mean = folded_mean(out.mean, out.var);
  out.slab_mean = out.mean;
  out.slab_var = out.var;
  return out;
}

PriorMoments elastic_net_spg(double r_hat, double tau_r, double lambda1, double lambda2) {
  check_tau(tau_r);
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0)) throw DomainError("elastic_net_spg: lambdas must be non-negative");
  if (lambda1 == 0.0) {
    if (lambda2 == 0.0) return flat(r_hat, tau_r);
    return gaussian_spg(r_hat, tau_r, 0.0, 0.5 / lambda2);
  }
  const double shrink = 2.0 * lambda2 * tau_r + 1.0;
  const double sigma2 = tau_r / shrink;
  const double sigma = std::sqrt(sigma2);
  const double m = r_hat / shrink;
  const double log_k = 0.5 * std::log(sigma2 / tau_r) - r_hat * r_hat * lambda2 / shrink;

  // w > 0 piece: N(m - lambda1 sigma^2, sigma^2) truncated to (0, inf); w < 0 mirrors it.
  const double a = (m - lambda1 * sigma2) / sigma;
  const double b = (m + lambda1 * sigma2) / sigma;
  const double half_sq = 0.5 * lambda1 * lambda1 * sigma2;
  const double log_upper = -lambda1 * m + half_sq + log_norm_cdf(a);
  const double log_lower = lambda1 * m + half_sq + log_norm_cdf(-b);
  const double log_sum = log_add_exp(log_upper, log_lower);
  const double w_upper = std::exp(log_upper - log_sum);
  const double w_lower = std::exp(log_lower - log_sum);

  const double qu = inv_mills(a);
  const double mean_upper = sigma * (a + qu);
  const double var_upper = std::max(sigma2 * (1.0 - qu * (qu + a)), 0.0);
  const double ql = inv_mills(-b);
  const double mean_lower = sigma * (b - ql);
  const double var_lower = std::max(sigma2 * (1.0 - ql * (ql - b)), 0.0);

  const double gap = mean_upper - mean_lower;
  PriorMoments out;
  out.mean = w_upper * mean_upper + w_lower * mean_lower;
  out.var = w_upper * var_upper + w_lower * var_lower + w_upper * w_lower * gap * gap;
  out.abs_mean = w_upper * mean_upper - w_lower * mean_lower;

  double log_z = 0.0;
  if (lambda2 == 0.0) {
    log_z = std::log(2.0 / lambda1);
  } else {
    log_z = std::log(2.0) + 0.5 * std::log(kPi / lambda2) + lambda1 * lambda1 / (4.0 * lambda2) +
            log_norm_cdf(-lambda1 / std::sqrt(2.0 * lambda2));
  }
  out.log_scale = log_k + log_sum - log_z;
  out.slab_mean = out.mean;
  out.slab_var = out.var;
  return out;
}

PriorMoments elastic_net_msg(double r_hat, double tau_r, double lambda1, double lambda2) {
  check_tau(tau_r);
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0)) throw DomainError("elastic_net_msg: lambdas must be non-negative");
  const double shrink = 2.0 * lambda2 * tau_r + 1.0;
  const double sigma2 = tau_r / shrink;
  const double m = r_hat / shrink;
  const double mag = std::max(std::abs(m) - lambda1 * sigma2, 0.0);
  PriorMoments out;
  out.mean = mag > 0.0 ? std::copysign(mag, m) : 0.0;
  out.var = mag > 0.0 ? sigma2 : 0.0;
  out.abs_mean = mag;
  out.slab_mean = out.mean;
  out.slab_var = out.var;
  return out;
}

PriorMoments gaussian_mixture_spg(double r_hat, double tau_r, const std::vector<MixtureComponent>& mixture) {
  check_tau(tau_r);
  if (mixture.empty()) throw DomainError("gaussian_mixture_spg: empty mixture");
  std::vector<double> log_w(mixture.size());
  std::vector<PriorMoments> parts(mixture.size());
  double log_total = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < mixture.size(); ++l) {
    const MixtureComponent& c = mixture[l];
    parts[l] = gaussian_spg(r_hat, tau_r, c.mu, c.sigma2);
    log_w[l] = c.omega > 0.0 ? std::log(c.omega) + parts[l].log_scale : -std::numeric_limits<double>::infinity();
    log_total = log_add_exp(log_total, log_w[l]);
  }
  PriorMoments out;
  for (std::size_t l = 0; l < mixture.size(); ++l) {
    const double w = std::exp(log_w[l] - log_total);
    out.mean += w * parts[l].mean;
    out.abs_mean += w * parts[l].abs_mean;
  }
  double within = 0.0;
  for (std::size_t l = 0; l < mixture.size(); ++l) {
    const double w = std::exp(log_w[l] - log_total);
    const double d = parts[l].mean - out.mean;
    within += w * (parts[l].var + d * d);
  }
  out.var = within;
  out.log_scale = log_total;
  out.slab_mean = out.mean;
  out.slab_var = out.var;
  return out;
}

PriorMoments spike_slab_spg(double r_hat, double tau_r, double pi, const PriorMoments& slab) {
  check_tau(tau_r);
  if (!(pi >= 0.0 && pi <= 1.0)) throw DomainError("spike_slab_spg: pi must lie in [0, 1]");
  const double log_spike = log_gauss_pdf(0.0, r_hat, tau_r);
  PriorMoments out;
  out.slab_mean = slab.mean;
  out.slab_var = slab.var;
  if (pi == 0.0) {
    out.nonzero_prob = 0.0;
    out.log_scale = log_spike;
    return out;
  }
  if (pi == 1.0) {
    out = slab;
    out.nonzero_prob = 1.0;
    out.slab_mean = slab.mean;
    out.slab_var = slab.var;
    return out;
  }
  const double log_on = std::log(pi) + slab.log_scale;
  const double log_off = std::log1p(-pi) + log_spike;
  const double post = sigmoid(log_on - log_off);
  out.nonzero_prob = post;
  out.mean = post * slab.mean;
  out.var = post * slab.var + post * (1.0 - post) * slab.mean * slab.mean;
  out.abs_mean = post * slab.abs_mean;
  out.log_scale = log_add_exp(log_on, log_off);
  return out;
}

InputChannel InputChannel::gaussian(double mu, double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(mu)) throw DomainError("gaussian prior: sigma2 must be positive");
  InputChannel c;
  c.kind_ = PriorKind::kGaussian;
  c.mu_ = mu;
  c.sigma2_ = sigma2;
  return c;
}

InputChannel InputChannel::laplacian(double lambda1) {
  if (!(lambda1 > 0.0)) throw DomainError("laplacian prior: lambda1 must be positive");
  InputChannel c;
  c.kind_ = PriorKind::kLaplacian;
  c.lambda1_ = lambda1;
  return c;
}

InputChannel InputChannel::elastic_net(double lambda1, double lambda2) {
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0)) throw DomainError("elastic-net prior: lambdas must be non-negative");
  if (lambda1 == 0.0 && lambda2 == 0.0) throw DomainError("elastic-net prior: lambda1 and lambda2 are both zero");
  InputChannel c;
  c.kind_ = PriorKind::kElasticNet;
  c.lambda1_ = lambda1;
  c.lambda2_ = lambda2;
  return c;
}

InputChannel InputChannel::gaussian_mixture(std::vector<MixtureComponent> mixture) {
  if (mixture.empty()) throw DomainError("mixture prior: no components");
  double total = 0.0;
  for (const auto& comp : mixture) {
    if (!(comp.omega >= 0.0) || !(comp.sigma2 > 0.0)) throw DomainError("mixture prior: invalid component");
    total += comp.omega;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("mixture prior: weights must sum to 1");
  InputChannel c;
  c.kind_ = PriorKind::kGaussianMixture;
  c.mixture_ = std::move(mixture);
  return c;
}

InputChannel InputChannel::spike_slab(double pi, const InputChannel& slab) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw DomainError("spike-and-slab prior: pi must lie in [0, 1]");
  InputChannel c = slab;
  c.spike_ = true;
  c.pi_ = pi;
  return c;
}

InputChannel InputChannel::with_pi(double pi) const {
  if (!spike_) throw ConfigError("with_pi: prior has no spike");
  return spike_slab(pi, slab());
}

InputChannel InputChannel::with_gaussian(double mu, double sigma2) const {
  if (kind_ != PriorKind::kGaussian) throw ConfigError("with_gaussian: slab is not Gaussian");
  InputChannel c = gaussian(mu, sigma2);
  c.spike_ = spike_;
  c.pi_ = pi_;
  return c;
}

InputChannel InputChannel::with_lambda1(double lambda1) const {
  if (kind_ != PriorKind::kLaplacian && kind_ != PriorKind::kElasticNet)
    throw ConfigError("with_lambda1: prior has no l1 weight");
  if (!(lambda1 > 0.0)) throw DomainError("with_lambda1: lambda1 must be positive");
  InputChannel c = *this;
  c.lambda1_ = lambda1;
  return c;
}

InputChannel InputChannel::slab() const {
  InputChannel c = *this;
  c.spike_ = false;
  c.pi_ = 1.0;
  return c;
}

PriorMoments InputChannel::slab_sum_product(double r_hat, double tau_r) const {
  switch (kind_) {
    case PriorKind::kGaussian:
      return gaussian_spg(r_hat, tau_r, mu_, sigma2_);
    case PriorKind::kLaplacian:
    case PriorKind::kElasticNet:
      return elastic_net_spg(r_hat, tau_r, lambda1_, lambda2_);
    case PriorKind::kGaussianMixture:
      return gaussian_mixture_spg(r_hat, tau_r, mixture_);
  }
  return {};
}

PriorMoments InputChannel::sum_product(double r_hat, double tau_r) const {
  PriorMoments slab_m = slab_sum_product(r_hat, tau_r);
  if (!spike_) return slab_m;
  return spike_slab_spg(r_hat, tau_r, pi_, slab_m);
}

bool InputChannel::supports_max_sum() const { return !spike_ && kind_ != PriorKind::kGaussianMixture; }

PriorMoments InputChannel::max_sum(double r_hat, double tau_r) const {
  if (!supports_max_sum()) throw ConfigError("max-sum is not available for spike-and-slab or mixture priors");
  if (kind_ == PriorKind::kGaussian) {
    PriorMoments out = gaussian_spg(r_hat, tau_r, mu_, sigma2_);
    out.log_scale = 0.0;
    return out;
  }
  return elastic_net_msg(r_hat, tau_r, lambda1_, lambda2_);
}

double InputChannel::penalty(double w) const {
  double slab_pen = 0.0;
  switch (kind_) {
    case PriorKind::kGaussian:
      slab_pen = 0.5 * (w - mu_) * (w - mu_) / sigma2_;
      break;
    case PriorKind::kLaplacian:
    case PriorKind::kElasticNet:
      slab_pen = lambda1_ * std::abs(w) + lambda2_ * w * w;
      break;
    case PriorKind::kGaussianMixture: {
      double lp = -std::numeric_limits<double>::infinity();
      for (const auto& c : mixture_)
        if (c.omega > 0.0) lp = log_add_exp(lp, std::log(c.omega) + log_gauss_pdf(w, c.mu, c.sigma2));
      slab_pen = -lp;
      break;
    }
  }
  if (!spike_) return slab_pen;
  if (w == 0.0) return -std::log1p(-pi_);
  return slab_pen - std::log(pi_);
}

double InputChannel::slab_mean_value() const {
  switch (kind_) {
    case PriorKind::kGaussian:
      return mu_;
    case PriorKind::kLaplacian:
    case PriorKind::kElasticNet:
      return 0.0;
    case PriorKind::kGaussianMixture: {
      double m = 0.0;
      for (const auto& c : mixture_) m += c.omega * c.mu;
      return m;
    }
  }
  return 0.0;
}

double InputChannel::slab_second_moment() const {
  switch (kind_) {
    case PriorKind::kGaussian:
      return sigma2_ + mu_ * mu_;
    case PriorKind::kLaplacian:
    case PriorKind::kElasticNet: {
      if (lambda2_ == 0.0) return 2.0 / (lambda1_ * lambda1_);
      // |W| is N(-lambda1/(2 lambda2), 1/(2 lambda2)) truncated to (0, inf)
      const auto [m, v] = positive_truncation(-lambda1_ / (2.0 * lambda2_), std::sqrt(0.5 / lambda2_));
      return v + m * m;
    }
    case PriorKind::kGaussianMixture: {
      double s = 0.0;
      for (const auto& c : mixture_) s += c.omega * (c.sigma2 + c.mu * c.mu);
      return s;
    }
  }
  return 1.0;
}

double InputChannel::prior_mean() const { return (spike_ ? pi_ : 1.0) * slab_mean_value(); }

double InputChannel::prior_variance() const {
  const double p = spike_ ? pi_ : 1.0;
  const double mean = p * slab_mean_value();
  return std::max(p * slab_second_moment() - mean * mean, 0.0);
}

}  // namespace gamp

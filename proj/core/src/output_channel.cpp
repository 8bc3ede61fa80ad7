#include "gamp/output_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "gamp/errors.hpp"
#include "gamp/normal.hpp"

namespace gamp {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void check_tau(double tau_p) {
  if (!(tau_p > 0.0)) throw DomainError("output channel: tau_p must be positive");
}

double hinge_h(double t) { return std::exp(-std::max(0.0, 1.0 - t)); }

}  // namespace

ScalarMoments probit_spg(double y, double p_hat, double tau_p, double v) {
  check_tau(tau_p);
  if (!(v > 0.0)) throw DomainError("probit_spg: v must be positive");
  const double total = v + tau_p;
  const double s = std::sqrt(total);
  const double t = y * p_hat / s;
  const double r = inv_mills(t);
  ScalarMoments out;
  out.mean = p_hat + y * tau_p * r / s;
  out.var = std::max(tau_p - tau_p * tau_p * r * (t + r) / total, 0.0);
  out.log_scale = log_norm_cdf(t);
  return out;
}

double logistic_lambda(double xi, double alpha) {
  const double x = alpha * xi;
  if (std::abs(x) < 1e-6) return alpha * alpha / 8.0;
  // sigmoid(x) - 1/2 = tanh(x/2)/2
  return alpha * std::tanh(0.5 * x) / (4.0 * xi);
}

LogisticMoments logistic_spg(double y, double p_hat, double tau_p, double alpha, double tol, int max_iter) {
  check_tau(tau_p);
  if (!(alpha > 0.0)) throw DomainError("logistic_spg: alpha must be positive");
  LogisticMoments out;
  auto update = [&](double xi, double& z, double& tz) {
    tz = tau_p / (1.0 + 2.0 * tau_p * logistic_lambda(xi, alpha));
    z = tz * (p_hat / tau_p + 0.5 * alpha * y);
    return std::sqrt(tz + z * z);
  };
  double xi = std::sqrt(tau_p + p_hat * p_hat);
  double z = p_hat;
  double tz = tau_p;
  for (int it = 1; it <= max_iter; ++it) {
    const double next = update(xi, z, tz);
    const double delta = std::abs(next - xi);
    xi = next;
    out.iterations = it;
    if (delta < tol) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    // The plain iteration contracts slowly when alpha^2 tau_p is large. The map's fixed point
    // is bracketed by 0 and the xi that the lambda = 0 update would give, so solve it directly.
    const double hi = std::sqrt(tau_p + std::pow(std::abs(p_hat) + 0.5 * tau_p * alpha, 2)) + 1.0;
    std::uintmax_t evals = 200;
    auto gap = [&](double x) { return update(x, z, tz) - x; };
    const auto [a, b] = boost::math::tools::toms748_solve(gap, 0.0, hi, boost::math::tools::eps_tolerance<double>(50), evals);
    xi = 0.5 * (a + b);
    update(xi, z, tz);
    xi = std::sqrt(tz + z * z);
    out.iterations += static_cast<int>(evals);
    out.converged = std::abs(b - a) <= tol * std::max(1.0, xi);
  }
  out.xi = xi;
  out.moments.mean = z;
  out.moments.var = tz;
  const double mean_a = alpha * y * p_hat;
  const double var_a = alpha * alpha * tau_p;
  const double c = logistic_gauss_expectation(mean_a, var_a);
  // far in the wrong-label tail sigmoid(a) ~ exp(a), so E ~ exp(mean + var/2)
  out.moments.log_scale = c > 1e-290 ? std::log(c) : mean_a + 0.5 * var_a;
  return out;
}

ScalarMoments hinge_spg(double y, double p_hat, double tau_p) {
  check_tau(tau_p);
  // Work with u = y z ~ N(m, tau) a priori; likelihood exp(u - 1) below 1, flat above.
  const double m = y * p_hat;
  const double sd = std::sqrt(tau_p);
  const double a = (1.0 - tau_p - m) / sd;
  const double b = (m - 1.0) / sd;
  const double delta = m - 1.0 + 0.5 * tau_p;
  const double log_lower = delta + log_norm_cdf(a);
  const double log_upper = log_norm_cdf(b);
  const double log_c = log_add_exp(log_lower, log_upper);
  const double w_lower = std::exp(log_lower - log_c);
  const double w_upper = std::exp(log_upper - log_c);
  const double ra = inv_mills(a);
  const double rb = inv_mills(b);
  const double mean_lower = m + tau_p - sd * ra;
  const double var_lower = std::max(tau_p * (1.0 - ra * (ra + a)), 0.0);
  const double mean_upper = m + sd * rb;
  const double var_upper = std::max(tau_p * (1.0 - rb * (rb + b)), 0.0);
  const double gap = mean_lower - mean_upper;
  ScalarMoments out;
  out.mean = y * (w_lower * mean_lower + w_upper * mean_upper);
  out.var = w_lower * var_lower + w_upper * var_upper + w_lower * w_upper * gap * gap;
  out.log_scale = log_c;
  return out;
}

RobustMoments robust_spg(double p_hat, double tau_p, double gamma, const ScalarMoments& inner) {
  check_tau(tau_p);
  if (!(gamma >= 0.0 && gamma < 0.5)) throw DomainError("robust_spg: gamma must lie in [0, 1/2)");
  RobustMoments out;
  if (gamma == 0.0) {
    out.moments = inner;
    return out;
  }
  const double c_star = std::clamp(std::exp(inner.log_scale), 0.0, 1.0);
  const double denom = gamma + (1.0 - 2.0 * gamma) * c_star;
  const double c_y = gamma / denom;
  const double gap = p_hat - inner.mean;
  out.moments.mean = c_y * p_hat + (1.0 - c_y) * inner.mean;
  out.moments.var = c_y * tau_p + (1.0 - c_y) * inner.var + c_y * (1.0 - c_y) * gap * gap;
  out.moments.log_scale = std::log(denom);
  const double corrupt = gamma * (1.0 - c_star);
  const double clean = (1.0 - gamma) * c_star;
  out.responsibility = corrupt + clean > 0.0 ? corrupt / (corrupt + clean) : 0.0;
  return out;
}

OutputChannel OutputChannel::logistic(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("logistic channel: alpha must be positive");
  return OutputChannel(Activation::kLogistic, alpha, 1.0);
}

OutputChannel OutputChannel::probit(double v) {
  if (!(v > 0.0)) throw DomainError("probit channel: v must be positive");
  return OutputChannel(Activation::kProbit, 1.0, v);
}

OutputChannel OutputChannel::hinge() { return OutputChannel(Activation::kHinge, 1.0, 1.0); }

OutputChannel OutputChannel::robustified(double gamma) const {
  if (!(gamma >= 0.0 && gamma < 0.5)) throw DomainError("robust channel: gamma must lie in [0, 1/2)");
  OutputChannel out = *this;
  out.robust_ = true;
  out.gamma_ = gamma;
  return out;
}

OutputChannel OutputChannel::with_alpha(double alpha) const {
  if (!(alpha > 0.0)) throw DomainError("logistic channel: alpha must be positive");
  OutputChannel out = *this;
  out.alpha_ = alpha;
  return out;
}

OutputChannel OutputChannel::with_v(double v) const {
  if (!(v > 0.0)) throw DomainError("probit channel: v must be positive");
  OutputChannel out = *this;
  out.v_ = v;
  return out;
}

OutputChannel OutputChannel::with_gamma(double gamma) const { return robustified(gamma); }

ScalarMoments OutputChannel::inner_sum_product(double y, double p_hat, double tau_p) const {
  switch (activation_) {
    case Activation::kLogistic:
      return logistic_spg(y, p_hat, tau_p, alpha_).moments;
    case Activation::kProbit:
      return probit_spg(y, p_hat, tau_p, v_);
    case Activation::kHinge:
      return hinge_spg(y, p_hat, tau_p);
  }
  return {};
}

ScalarMoments OutputChannel::sum_product(double y, double p_hat, double tau_p) const {
  const ScalarMoments inner = inner_sum_product(y, p_hat, tau_p);
  if (!robust_) return inner;
  return robust_spg(p_hat, tau_p, gamma_, inner).moments;
}

double OutputChannel::corruption_responsibility(double y, double p_hat, double tau_p) const {
  if (!robust_) return 0.0;
  return robust_spg(p_hat, tau_p, gamma_, inner_sum_product(y, p_hat, tau_p)).responsibility;
}

ScalarMoments OutputChannel::max_sum(double y, double p_hat, double tau_p) const {
  return msg_prox(*this, y, p_hat, tau_p);
}

OutputChannel::LikelihoodDerivs OutputChannel::inner_likelihood(double y, double u) const {
  switch (activation_) {
    case Activation::kLogistic: {
      const double s = sigmoid(alpha_ * y * u);
      const double q = s * (1.0 - s);
      return {s, alpha_ * y * q, alpha_ * alpha_ * q * (1.0 - 2.0 * s)};
    }
    case Activation::kProbit: {
      const double sd = std::sqrt(v_);
      const double t = y * u / sd;
      const double pdf = norm_pdf(t);
      return {norm_cdf(t), y * pdf / sd, -t * pdf / v_};
    }
    case Activation::kHinge: {
      const double t = y * u;
      if (t >= 1.0) return {1.0, 0.0, 0.0};
      const double p = std::exp(t - 1.0);
      return {p, y * p, p};
    }
  }
  return {0.0, 0.0, 0.0};
}

OutputChannel::LikelihoodDerivs OutputChannel::likelihood(double y, double u) const {
  const LikelihoodDerivs inner = inner_likelihood(y, u);
  if (!robust_) return inner;
  const double k = 1.0 - 2.0 * gamma_;
  return {gamma_ + k * inner.p, k * inner.dp, k * inner.d2p};
}

double OutputChannel::loss(double y, double z) const {
  double inner = 0.0;
  switch (activation_) {
    case Activation::kLogistic:
      inner = softplus(-alpha_ * y * z);
      break;
    case Activation::kProbit:
      inner = -log_norm_cdf(y * z / std::sqrt(v_));
      break;
    case Activation::kHinge:
      inner = std::max(0.0, 1.0 - y * z);
      break;
  }
  if (!robust_ || gamma_ == 0.0) return inner;
  return -std::log(gamma_ + (1.0 - 2.0 * gamma_) * std::exp(-inner));
}

double OutputChannel::loss_derivative(double y, double u) const {
  if (!robust_ || gamma_ == 0.0) {
    switch (activation_) {
      case Activation::kLogistic:
        return -alpha_ * y * sigmoid(-alpha_ * y * u);
      case Activation::kProbit: {
        const double sd = std::sqrt(v_);
        return -(y / sd) * inv_mills(y * u / sd);
      }
      case Activation::kHinge:
        return y * u < 1.0 ? -y : 0.0;
    }
  }
  const LikelihoodDerivs l = likelihood(y, u);
  return -l.dp / l.p;
}

double OutputChannel::loss_curvature(double y, double u) const {
  if (!robust_ || gamma_ == 0.0) {
    switch (activation_) {
      case Activation::kLogistic: {
        const double s = sigmoid(alpha_ * y * u);
        return alpha_ * alpha_ * s * (1.0 - s);
      }
      case Activation::kProbit: {
        const double t = y * u / std::sqrt(v_);
        const double r = inv_mills(t);
        return r * (t + r) / v_;
      }
      case Activation::kHinge:
        return 0.0;
    }
  }
  const LikelihoodDerivs l = likelihood(y, u);
  const double g = l.dp / l.p;
  return -l.d2p / l.p + g * g;
}

double OutputChannel::predict_proba(double z_hat, double tau_z) const { return gamp::predict_proba(*this, z_hat, tau_z); }

ScalarMoments msg_prox(const OutputChannel& channel, double y, double p_hat, double tau_p) {
  check_tau(tau_p);
  ScalarMoments out;
  if (channel.activation() == Activation::kHinge && !(channel.robust() && channel.gamma() > 0.0)) {
    // minimize max(0, 1 - t) + (t - q)^2 / (2 tau) over t = y u
    const double q = y * p_hat;
    double t = 1.0;
    if (q + tau_p < 1.0) t = q + tau_p;
    else if (q > 1.0) t = q;
    out.mean = y * t;
    out.var = tau_p;
    return out;
  }

  auto g = [&](double u) { return channel.loss_derivative(y, u) + (u - p_hat) / tau_p; };
  const double g0 = g(p_hat);
  double z = p_hat;
  if (g0 != 0.0) {
    const double dir = g0 > 0.0 ? -1.0 : 1.0;
    // for convex f the point p_hat - tau_p f'(p_hat) already brackets the root
    double step = std::max(tau_p * std::abs(g0), 1e-12 * (1.0 + std::abs(p_hat)));
    double inner = p_hat;
    double outer = p_hat + dir * step;
    int expand = 0;
    while ((g(outer) > 0.0) == (g0 > 0.0)) {
      inner = outer;
      step *= 2.0;
      outer = p_hat + dir * step;
      if (++expand > 200) throw NumericError("msg_prox: failed to bracket the stationarity root");
    }
    double lo = std::min(inner, outer);
    double hi = std::max(inner, outer);
    // orient so that g(lo) < 0 < g(hi)
    const bool increasing = g(hi) > 0.0;
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      z = mid;
      if (gm == 0.0 || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) break;
      if ((gm > 0.0) == increasing) hi = mid;
      else lo = mid;
    }
  }
  out.mean = z;
  out.var = tau_p / (1.0 + tau_p * channel.loss_curvature(y, z));
  return out;
}

double predict_proba(const OutputChannel& channel, double z_hat, double tau_z) {
  if (!(tau_z >= 0.0)) throw DomainError("predict_proba: tau_z must be non-negative");
  double inner = 0.5;
  switch (channel.activation()) {
    case Activation::kProbit:
      inner = norm_cdf(z_hat / std::sqrt(channel.v() + tau_z));
      break;
    case Activation::kLogistic:
      inner = logistic_gauss_expectation(channel.alpha() * z_hat, channel.alpha() * channel.alpha() * tau_z);
      break;
    case Activation::kHinge: {
      if (tau_z > 0.0) {
        const double lp = hinge_spg(1.0, z_hat, tau_z).log_scale;
        const double lm = hinge_spg(-1.0, z_hat, tau_z).log_scale;
        inner = 1.0 / (1.0 + std::exp(lm - lp));
      } else {
        const double hp = hinge_h(z_hat);
        const double hm = hinge_h(-z_hat);
        inner = hp / (hp + hm);
      }
      break;
    }
  }
  if (!channel.robust()) return inner;
  return channel.gamma() + (1.0 - 2.0 * channel.gamma()) * inner;
}

}  // namespace gamp

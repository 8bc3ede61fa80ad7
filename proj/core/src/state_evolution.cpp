#include "gamp/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "gamp/errors.hpp"
#include "gamp/normal.hpp"

namespace gamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// E[p(+1 | Z)] for Z ~ N(mean, var).
double expected_positive(const OutputChannel& channel, double mean, double var) {
  if (var <= 0.0) return predict_proba(channel, mean, 0.0);
  if (channel.activation() != Activation::kHinge) return predict_proba(channel, mean, var);
  // The hinge class probability has kinks at z = +-1; integrate piecewise in the standardized
  // variable so each panel sees a smooth integrand.
  const QuadratureRule& gl = gauss_legendre(16);
  const double sd = std::sqrt(var);
  constexpr double kReach = 10.0;
  std::vector<double> cuts{-kReach, kReach};
  for (double kink : {-1.0, 1.0}) {
    const double u = (kink - mean) / sd;
    if (std::abs(u) < kReach) cuts.push_back(u);
  }
  std::sort(cuts.begin(), cuts.end());
  constexpr int kPanels = 8;
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double h = (cuts[c + 1] - cuts[c]) / kPanels;
    for (int p = 0; p < kPanels; ++p) {
      const double mid = cuts[c] + (p + 0.5) * h;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double u = mid + 0.5 * h * gl.nodes[i];
        total += 0.5 * h * gl.weights[i] * norm_pdf(u) * predict_proba(channel, mean + sd * u, 0.0);
      }
    }
  }
  return total;
}

}  // namespace

SigmaZ sigma_from_moments(const SEMoments& m) {
  if (!(m.delta > 0.0)) throw DomainError("sigma_from_moments: delta must be positive");
  if (m.var_w < 0.0 || m.var_what < 0.0) throw DomainError("sigma_from_moments: negative variance");
  const double inv = 1.0 / m.delta;
  SigmaZ s;
  s.s11 = inv * (m.var_w + m.e_w * m.e_w);
  s.s12 = inv * (m.cov_w_what + m.e_w * m.e_what);
  s.s22 = inv * (m.var_what + m.e_what * m.e_what);
  const double slack = 1e-12 * std::max(1.0, s.s11 * s.s22);
  if (s.s12 * s.s12 > s.s11 * s.s22 + slack) throw NumericError("sigma_from_moments: covariance is indefinite");
  return s;
}

SEMoments empirical_moments(const Vector& w, const Vector& w_hat, double delta) {
  if (w.size() != w_hat.size() || w.size() == 0) throw DomainError("empirical_moments: length mismatch");
  const double n = static_cast<double>(w.size());
  SEMoments m;
  m.delta = delta;
  m.e_w = w.mean();
  m.e_what = w_hat.mean();
  m.var_w = std::max(w.squaredNorm() / n - m.e_w * m.e_w, 0.0);
  m.var_what = std::max(w_hat.squaredNorm() / n - m.e_what * m.e_what, 0.0);
  m.cov_w_what = w.dot(w_hat) / n - m.e_w * m.e_what;
  return m;
}

double se_error_rate(const SigmaZ& sigma, const OutputChannel& channel) {
  if (!(sigma.s22 > 0.0)) throw DomainError("se_error_rate: Sigma22 must be positive");
  if (channel.activation() == Activation::kProbit && !channel.robust()) {
    // Pr{Z + E and Z_hat differ in sign} via the orthant identity.
    const double rho = std::clamp(sigma.s12 / std::sqrt((sigma.s11 + channel.v()) * sigma.s22), -1.0, 1.0);
    return 0.5 - std::asin(rho) / kPi;
  }
  return se_error_rate_quadrature(sigma, channel);
}

double se_error_rate_quadrature(const SigmaZ& sigma, const OutputChannel& channel) {
  if (!(sigma.s22 > 0.0)) throw DomainError("se_error_rate: Sigma22 must be positive");
  const double c = sigma.s12 / sigma.s22;
  const double cond_var = std::max(sigma.s11 - sigma.s12 * c, 0.0);
  const double sd = std::sqrt(sigma.s22);
  const QuadratureRule& gl = gauss_legendre(16);
  constexpr int kPanels = 40;
  constexpr double kSpan = 12.0;
  const double width = kSpan / kPanels;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double a = p * width;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double u = a + 0.5 * width * (gl.nodes[i] + 1.0);
      const double w = 0.5 * width * gl.weights[i] * norm_pdf(u);
      // u > 0 predicts +1, so the error is a -1 label; mirror for u < 0.
      total += w * (1.0 - expected_positive(channel, c * sd * u, cond_var));
      total += w * expected_positive(channel, -c * sd * u, cond_var);
    }
  }
  return std::clamp(total, 0.0, 1.0);
}

double se_mse(const SEMoments& m) {
  const double v = m.var_w + m.e_w * m.e_w + m.var_what + m.e_what * m.e_what -
                   2.0 * (m.cov_w_what + m.e_w * m.e_what);
  return std::max(v, 0.0);
}

double sample_prior(const InputChannel& prior, Rng& rng) {
  if (prior.spike()) {
    std::bernoulli_distribution on(prior.pi());
    if (!on(rng)) return 0.0;
  }
  switch (prior.kind()) {
    case PriorKind::kGaussian:
      return std::normal_distribution<double>(prior.mu(), std::sqrt(prior.sigma2()))(rng);
    case PriorKind::kLaplacian:
    case PriorKind::kElasticNet: {
      if (prior.lambda2() == 0.0) {
        const double mag = std::exponential_distribution<double>(prior.lambda1())(rng);
        return std::bernoulli_distribution(0.5)(rng) ? mag : -mag;
      }
      // Gaussian proposal for the quadratic part, accept with exp(-lambda1 |w|).
      std::normal_distribution<double> prop(0.0, std::sqrt(0.5 / prior.lambda2()));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (;;) {
        const double w = prop(rng);
        if (unif(rng) < std::exp(-prior.lambda1() * std::abs(w))) return w;
      }
    }
    case PriorKind::kGaussianMixture: {
      const auto& mix = prior.mixture();
      std::vector<double> omegas;
      for (const auto& c : mix) omegas.push_back(c.omega);
      const auto& c = mix[std::discrete_distribution<std::size_t>(omegas.begin(), omegas.end())(rng)];
      return std::normal_distribution<double>(c.mu, std::sqrt(c.sigma2))(rng);
    }
  }
  return 0.0;
}

std::vector<SEMoments> se_recursion(const InputChannel& prior, const OutputChannel& channel, double delta,
                                    const SEConfig& config) {
  if (!(delta > 0.0)) throw DomainError("se_recursion: delta must be positive");
  if (config.mc_samples < 10000) throw DomainError("se_recursion: mc_samples must be at least 1e4");
  if (config.max_iter < 1) throw DomainError("se_recursion: max_iter must be at least 1");
  constexpr double kFloor = 1e-11;
  constexpr double kCeiling = 1e11;
  const auto n = static_cast<std::size_t>(config.mc_samples);

  // Common random numbers for every iteration keep the recursion smooth in its inputs.
  Rng rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> u1(n), u2(n), v(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    u1[i] = gauss(rng);
    u2[i] = gauss(rng);
    v[i] = gauss(rng);
  }
  // Spiked priors integrate the Bernoulli switch exactly: every sample is a slab draw weighted
  // by pi, paired with a zero weighted by 1 - pi.
  const InputChannel slab = prior.slab();
  const double pi = prior.spike() ? prior.pi() : 1.0;
  for (std::size_t i = 0; i < n; ++i) w[i] = sample_prior(slab, rng);

  SEMoments cur;
  cur.delta = delta;
  cur.e_w = prior.prior_mean();
  cur.var_w = prior.prior_variance();
  cur.mean_tau_w = config.init_tau_w ? *config.init_tau_w : prior.prior_variance();
  cur.mean_tau_w = std::clamp(cur.mean_tau_w, kFloor, kCeiling);

  std::vector<SEMoments> out;
  double prev_mse = se_mse(cur);
  for (int k = 1; k <= config.max_iter; ++k) {
    const SigmaZ sig = sigma_from_moments(cur);
    const double tau_p = std::clamp(cur.mean_tau_w / delta, kFloor, kCeiling);
    const double c = sig.s22 > 0.0 ? sig.s12 / sig.s22 : 0.0;
    const double cond_var = sig.s11 - c * sig.s12;
    if (cond_var < -1e-12 * std::max(1.0, sig.s11)) throw NumericError("se_recursion: negative conditional variance");
    const double cond_sd = std::sqrt(std::max(cond_var, 0.0));
    const double p_sd = std::sqrt(std::max(sig.s22, 0.0));

    double e_ts = 0.0, e_s2 = 0.0, e_sres = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = p_sd * u2[i];
      const double resid = cond_sd * u1[i];
      const double z = c * p + resid;
      const double pp = predict_proba(channel, z, 0.0);
      for (const double y : {1.0, -1.0}) {
        const double py = y > 0.0 ? pp : 1.0 - pp;
        if (py <= 0.0) continue;
        const ScalarMoments zm = channel.sum_product(y, p, tau_p);
        const double s = (zm.mean - p) / tau_p;
        e_ts += py * std::max(1.0 / tau_p - zm.var / (tau_p * tau_p), kFloor);
        e_s2 += py * s * s;
        e_sres += py * s * resid;
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    e_ts *= inv_n;
    e_s2 *= inv_n;
    e_sres *= inv_n;
    const double tau_r = std::clamp(1.0 / e_ts, kFloor, kCeiling);
    const double alpha = cond_var > 1e-300 ? tau_r * e_sres / cond_var : 1.0;
    const double xi = tau_r * tau_r * e_s2;
    if (!(xi >= 0.0) || !std::isfinite(alpha)) throw NumericError("se_recursion: invalid effective input channel");
    const double xi_sd = std::sqrt(xi);

    double m1 = 0.0, m2 = 0.0, mw = 0.0, mt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const PriorMoments on = prior.sum_product(alpha * w[i] + xi_sd * v[i], tau_r);
      m1 += pi * on.mean;
      m2 += pi * on.mean * on.mean;
      mw += pi * w[i] * on.mean;
      mt += pi * on.var;
      if (pi < 1.0) {
        const PriorMoments off = prior.sum_product(xi_sd * v[i], tau_r);
        m1 += (1.0 - pi) * off.mean;
        m2 += (1.0 - pi) * off.mean * off.mean;
        mt += (1.0 - pi) * off.var;
      }
    }
    SEMoments next = cur;
    next.k = k;
    next.e_what = m1 * inv_n;
    next.var_what = std::max(m2 * inv_n - next.e_what * next.e_what, 0.0);
    next.cov_w_what = mw * inv_n - next.e_w * next.e_what;
    next.tau_r = tau_r;
    next.mean_tau_w = std::clamp(mt * inv_n, kFloor, kCeiling);
    if (!std::isfinite(next.e_what) || !std::isfinite(next.var_what) || !std::isfinite(next.cov_w_what))
      throw NumericError("se_recursion: non-finite moments at iteration " + std::to_string(k));
    out.push_back(next);
    cur = next;
    const double mse = se_mse(cur);
    if (k > 1 && std::abs(mse - prev_mse) <= config.tol * std::max(mse, 1e-300)) break;
    prev_mse = mse;
  }
  return out;
}

std::vector<SweepRow> se_phase_sweep(const std::vector<SweepPoint>& grid, const SweepConfig& config) {
  if (grid.empty()) throw DomainError("se_phase_sweep: empty grid");
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const auto& pt : grid) {
    SweepRow row;
    row.m_over_n = pt.m_over_n;
    row.k_over_n = pt.k_over_n;
    row.epsilon_pred = row.epsilon_emp = row.mse_pred = row.mse_emp = kNaN;
    if (pt.k_over_n > pt.m_over_n) {
      row.ill_posed = true;
      rows.push_back(row);
      continue;
    }
    try {
      const InputChannel prior = InputChannel::spike_slab(pt.k_over_n, InputChannel::gaussian(0.0, config.slab_var));
      const OutputChannel channel = OutputChannel::probit(config.probit_v);
      const auto trace = se_recursion(prior, channel, pt.m_over_n, config.se);
      const SEMoments& last = trace.back();
      row.k = last.k;
      row.mse_pred = se_mse(last);
      row.epsilon_pred = se_error_rate(sigma_from_moments(last), channel);
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "M_over_N,K_over_N,k,epsilon_pred,epsilon_emp,mse_pred,mse_emp,ill_posed\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%d,%.10g,%.10g,%.10g,%.10g,%d\n", r.m_over_n, r.k_over_n, r.k,
                  r.epsilon_pred, r.epsilon_emp, r.mse_pred, r.mse_emp, r.ill_posed ? 1 : 0);
    os << buf;
  }
}

}  // namespace gamp

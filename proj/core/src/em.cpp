#include "gamp/em.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>

#include <boost/math/tools/toms748_solve.hpp>

#include "gamp/errors.hpp"
#include "gamp/normal.hpp"

namespace gamp {

namespace {

constexpr double kAlphaLo = 1e-6;
constexpr double kAlphaHi = 1e6;
constexpr double kVLo = 1e-8;
constexpr double kVHi = 1e8;

double alpha_slope(const Vector& xi, double alpha) {
  double d = 0.0;
  for (Index m = 0; m < xi.size(); ++m) {
    const double s = sigmoid(alpha * xi(m));
    d -= xi(m) * xi(m) * s * (1.0 - s);
  }
  return d;
}

std::string fmt(const char* name, double value) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%.10g", name, value);
  return buf;
}

}  // namespace

ThetaParams snapshot(const OutputChannel& out, const InputChannel& in, const TuneMask& mask) {
  ThetaParams t;
  t.alpha = out.alpha();
  t.v = out.v();
  t.gamma = out.gamma();
  t.pi = in.spike() ? in.pi() : 1.0;
  t.slab_mu = in.mu();
  t.slab_sigma2 = in.sigma2();
  t.lambda1 = in.lambda1();
  t.lambda2 = in.lambda2();
  t.mixture = in.mixture();
  t.mask = mask;
  return t;
}

void EMConfig::validate() const {
  if (em_iters < 1) throw ConfigError("em: em_iters must be at least 1");
  if (quadrature_nodes < 3) throw ConfigError("em: quadrature_nodes must be at least 3");
  gamp.validate();
}

double alpha_residual(const Vector& z_hat, const Vector& xi, const Vector& y, double alpha) {
  double f = 0.0;
  for (Index m = 0; m < xi.size(); ++m) f += 0.5 * (z_hat(m) * y(m) - xi(m)) + xi(m) * sigmoid(-alpha * xi(m));
  return f;
}

ScalarUpdate update_alpha(const Vector& z_hat, const Vector& xi, const Vector& y, double alpha_old) {
  if (z_hat.size() != xi.size() || y.size() != xi.size()) throw DomainError("update_alpha: length mismatch");
  if (xi.size() == 0 || !(xi.array() > 0.0).all()) throw DomainError("update_alpha: xi must be positive");
  const auto f = [&](double a) { return alpha_residual(z_hat, xi, y, a); };
  ScalarUpdate out;
  // f decreases in alpha, so the bracket ends decide whether a root exists.
  const double f_lo = f(kAlphaLo);
  if (f_lo <= 0.0) return {kAlphaLo, true, f_lo};
  const double f_hi = f(kAlphaHi);
  if (f_hi >= 0.0) return {kAlphaHi, true, f_hi};

  const double tol = 1e-12 * static_cast<double>(xi.size());
  double lo = kAlphaLo;
  double hi = kAlphaHi;
  double a = std::clamp(alpha_old, kAlphaLo, kAlphaHi);
  double fa = f(a);
  for (int it = 0; it < 500 && std::abs(fa) > tol; ++it) {
    if (fa > 0.0) lo = a;
    else hi = a;
    const double slope = alpha_slope(xi, a);
    double next = slope < 0.0 ? a - fa / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    if (hi - lo <= 1e-15 * hi) break;
    a = next;
    fa = f(a);
  }
  out.value = a;
  out.residual = fa;
  return out;
}

ProbitVScore::ProbitVScore(const Vector& p_hat, const Vector& tau_p, const Vector& y, double v_old, int nodes) {
  if (p_hat.size() != tau_p.size() || y.size() != p_hat.size()) throw DomainError("update_probit_v: length mismatch");
  if (!(v_old > 0.0)) throw DomainError("update_probit_v: v must be positive");
  const QuadratureRule& gh = gauss_hermite(nodes);
  examples_ = p_hat.size();
  const std::size_t k = gh.nodes.size();
  yz_.reserve(static_cast<std::size_t>(examples_) * k);
  weight_.reserve(static_cast<std::size_t>(examples_) * k);
  std::vector<double> logw(k);
  for (Index m = 0; m < examples_; ++m) {
    if (!(tau_p(m) > 0.0)) throw DomainError("update_probit_v: tau_p must be positive");
    // Centre the rule on the z posterior and importance-correct back to it exactly.
    const ScalarMoments post = probit_spg(y(m), p_hat(m), tau_p(m), v_old);
    const double sd = std::sqrt(std::max(post.var, 1e-300));
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      const double z = post.mean + sd * gh.nodes[i];
      logw[i] = std::log(gh.weights[i]) + log_norm_cdf(y(m) * z / std::sqrt(v_old)) +
                log_gauss_pdf(z, p_hat(m), tau_p(m)) - log_gauss_pdf(z, post.mean, sd * sd);
      top = std::max(top, logw[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) total += (logw[i] = std::exp(logw[i] - top));
    for (std::size_t i = 0; i < k; ++i) {
      yz_.push_back(y(m) * (post.mean + sd * gh.nodes[i]));
      weight_.push_back(logw[i] / total);
    }
  }
}

double ProbitVScore::residual(double v) const {
  const double sd = std::sqrt(v);
  double r = 0.0;
  for (std::size_t i = 0; i < yz_.size(); ++i) {
    const double t = yz_[i] / sd;
    r -= weight_[i] * t * inv_mills(t);
  }
  return r / v;
}

double ProbitVScore::surrogate(double v) const {
  const double sd = std::sqrt(v);
  double q = 0.0;
  for (std::size_t i = 0; i < yz_.size(); ++i) q += weight_[i] * log_norm_cdf(yz_[i] / sd);
  return q;
}

ScalarUpdate update_probit_v(const Vector& p_hat, const Vector& tau_p, const Vector& y, double v_old, int nodes) {
  const ProbitVScore score(p_hat, tau_p, y, v_old, nodes);
  // The residual is d/dv of the surrogate: positive means v should grow.
  const auto g = [&](double lv) { return score.residual(std::exp(lv)); };
  double lo = std::log(kVLo);
  double hi = std::log(kVHi);
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_lo <= 0.0 && g_hi <= 0.0) return {kVLo, true, g_lo};
  if (g_lo >= 0.0 && g_hi >= 0.0) return {kVHi, true, g_hi};
  std::uintmax_t calls = 200;
  const auto root = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi,
                                                      boost::math::tools::eps_tolerance<double>(50), calls);
  const double mid = 0.5 * (root.first + root.second);
  return {std::exp(mid), false, g(mid)};
}

ScalarUpdate update_gamma(const Vector& responsibilities) {
  if (responsibilities.size() == 0) throw DomainError("update_gamma: no responsibilities");
  if (!((responsibilities.array() >= 0.0).all() && (responsibilities.array() <= 1.0).all()))
    throw DomainError("update_gamma: responsibilities must lie in [0, 1]");
  const double g = responsibilities.mean();
  ScalarUpdate out;
  out.value = std::clamp(g, 0.0, 0.5 - 1e-6);
  out.flagged = out.value != g;
  return out;
}

SpikeSlabUpdate update_spike_slab(const std::vector<PriorMoments>& moments, double mu_old, double sigma2_old,
                                  bool tune_mean, bool tune_var) {
  if (moments.empty()) throw DomainError("update_spike_slab: no moments");
  SpikeSlabUpdate out;
  out.mu = mu_old;
  out.sigma2 = sigma2_old;
  double mass = 0.0;
  for (const auto& pm : moments) mass += pm.nonzero_prob;
  out.pi = mass / static_cast<double>(moments.size());
  if (!(mass > 0.0)) {
    out.flagged = tune_mean || tune_var;
    return out;
  }
  if (tune_mean) {
    double s = 0.0;
    for (const auto& pm : moments) s += pm.nonzero_prob * pm.slab_mean;
    out.mu = s / mass;
  }
  if (tune_var) {
    double s = 0.0;
    for (const auto& pm : moments) {
      const double d = pm.slab_mean - out.mu;
      s += pm.nonzero_prob * (pm.slab_var + d * d);
    }
    out.sigma2 = s / mass;
    if (!(out.sigma2 > 0.0)) {
      out.sigma2 = sigma2_old;
      out.flagged = true;
    }
  }
  return out;
}

ScalarUpdate update_lambda1(const std::vector<PriorMoments>& moments, double lambda1_old) {
  if (moments.empty()) throw DomainError("update_lambda1: no moments");
  double s = 0.0;
  for (const auto& pm : moments) s += pm.abs_mean;
  if (!(s > 0.0) || !std::isfinite(s)) return {lambda1_old, true, 0.0};
  return {static_cast<double>(moments.size()) / s, false, 0.0};
}

namespace {

void check_mask(const OutputChannel& out, const InputChannel& in, const TuneMask& mask) {
  if (mask.alpha && out.activation() != Activation::kLogistic) throw ConfigError("em: alpha tuning needs a logistic channel");
  if (mask.v && (out.activation() != Activation::kProbit || out.robust()))
    throw ConfigError("em: v tuning needs a plain probit channel");
  if (mask.gamma && !out.robust()) throw ConfigError("em: gamma tuning needs a robust channel");
  if (mask.pi && !in.spike()) throw ConfigError("em: pi tuning needs a spike-and-slab prior");
  if ((mask.slab_mean || mask.slab_var) && in.kind() != PriorKind::kGaussian)
    throw ConfigError("em: slab mean/variance tuning needs a Gaussian prior or slab");
  if (mask.lambda1 && in.kind() != PriorKind::kLaplacian && in.kind() != PriorKind::kElasticNet)
    throw ConfigError("em: lambda1 tuning needs a Laplacian or elastic-net prior");
}

struct Tuner {
  const Dataset& data;
  const TuneMask& mask;
  const EMConfig& config;
  OutputChannel& out;
  InputChannel& in;
  std::vector<ThetaTraceRow>& trace;
  std::vector<std::string>& flags;

  void record(int iter, const char* name, double value) { trace.push_back({iter, name, value}); }

  void update(const GampState& s, int iter) {
    const Index m = data.num_examples();
    const Vector& y = data.y;
    if (mask.alpha) {
      Vector z(m), xi(m);
      for (Index i = 0; i < m; ++i) {
        const LogisticMoments lm = logistic_spg(y(i), s.p_hat(i), s.tau_p(i), out.alpha());
        z(i) = lm.moments.mean;
        xi(i) = lm.xi;
      }
      const ScalarUpdate u = update_alpha(z, xi, y, out.alpha());
      if (u.flagged) flags.push_back("em iter " + std::to_string(iter) + ": alpha at bracket boundary");
      out = out.with_alpha(u.value);
      record(iter, "alpha", u.value);
    }
    if (mask.v) {
      const ScalarUpdate u = update_probit_v(s.p_hat, s.tau_p, y, out.v(), config.quadrature_nodes);
      if (u.flagged) flags.push_back("em iter " + std::to_string(iter) + ": v at bracket boundary");
      out = out.with_v(u.value);
      record(iter, "v", u.value);
    }
    if (mask.gamma) {
      Vector rho(m);
      for (Index i = 0; i < m; ++i) rho(i) = out.corruption_responsibility(y(i), s.p_hat(i), s.tau_p(i));
      const ScalarUpdate u = update_gamma(rho);
      out = out.with_gamma(u.value);
      record(iter, "gamma", u.value);
    }
    if (mask.pi || mask.slab_mean || mask.slab_var || mask.lambda1) {
      const Index n = data.num_features();
      std::vector<PriorMoments> pm(static_cast<std::size_t>(n));
      for (Index j = 0; j < n; ++j) pm[static_cast<std::size_t>(j)] = in.sum_product(s.r_hat(j), s.tau_r(j));
      if (mask.pi || mask.slab_mean || mask.slab_var) {
        const SpikeSlabUpdate u = update_spike_slab(pm, in.mu(), in.sigma2(), mask.slab_mean, mask.slab_var);
        if (u.flagged) flags.push_back("em iter " + std::to_string(iter) + ": slab update skipped");
        if (mask.slab_mean || mask.slab_var) in = in.with_gaussian(u.mu, u.sigma2);
        if (mask.pi) {
          in = in.with_pi(u.pi);
          record(iter, "pi", u.pi);
        }
        if (mask.slab_mean) record(iter, "slab_mu", u.mu);
        if (mask.slab_var) record(iter, "slab_sigma2", u.sigma2);
      }
      if (mask.lambda1) {
        const ScalarUpdate u = update_lambda1(pm, in.lambda1());
        if (u.flagged) flags.push_back("em iter " + std::to_string(iter) + ": lambda1 update skipped");
        in = in.with_lambda1(u.value);
        record(iter, "lambda1", u.value);
      }
    }
  }
};

std::string theta_note(const OutputChannel& out, const InputChannel& in) {
  return " [" + fmt("alpha", out.alpha()) + " " + fmt("v", out.v()) + " " + fmt("gamma", out.gamma()) + " " +
         fmt("pi", in.pi()) + "]";
}

}  // namespace

EmResult em_fit(const Dataset& data, const OutputChannel& out0, const InputChannel& in0, const TuneMask& mask,
                const EMConfig& config) {
  config.validate();
  check_mask(out0, in0, mask);
  EmResult res{out0, in0, snapshot(out0, in0, mask), {}, {}, {}};
  OutputChannel& out = res.output;
  InputChannel& in = res.input;

  if (mask.empty()) {
    res.result = run_gamp(data, out, in, config.gamp);
    return res;
  }

  Cadence cadence = config.cadence;
  if (cadence == Cadence::kAuto)
    cadence = config.gamp.mode == Mode::kSumProduct ? Cadence::kPerIteration : Cadence::kPerRun;
  Tuner tuner{data, mask, config, out, in, res.trace, res.flags};

  try {
    if (cadence == Cadence::kPerIteration) {
      Gamp g(data.X, data.y, out, in, config.gamp);
      while (g.state().k < config.gamp.max_iter) {
        const bool done = g.step();
        tuner.update(g.state(), g.state().k);
        if (done && g.state().k >= config.em_iters) break;
      }
      res.result = g.result();
    } else {
      for (int it = 1; it <= config.em_iters; ++it) {
        Gamp g(data.X, data.y, out, in, config.gamp);
        g.run();
        res.result = g.result();
        tuner.update(g.state(), it);
      }
      // Final weights come from a run at the final theta.
      res.result = run_gamp(data, out, in, config.gamp);
    }
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.what() + theta_note(out, in), e.trace());
  }
  res.theta = snapshot(out, in, mask);
  return res;
}

void write_theta_csv(std::ostream& os, const std::vector<ThetaTraceRow>& trace) {
  os << "em_iter,parameter,value\n";
  char buf[128];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.10g\n", r.em_iter, r.name.c_str(), r.value);
    os << buf;
  }
}

}  // namespace gamp

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gamp/em.hpp"
#include "gamp/errors.hpp"
#include "gamp/normal.hpp"
#include "gamp/synthetic.hpp"
#include "oracles.hpp"
#include "reference.hpp"

using namespace gamp;

TEST_CASE("alpha update") {
  Vector z(1), xi(1), y(1);
  z << 0.46211715726000974;  // tanh(1/2)
  xi << 1.0;
  y << 1.0;
  const ScalarUpdate u = update_alpha(z, xi, y, 5.0);
  CHECK_FALSE(u.flagged);
  CHECK(u.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(alpha_residual(z, xi, y, u.value)) < 1e-9);

  // z y = 0 with equal xi: the residual vanishes only at alpha = 0
  Vector z0 = Vector::Zero(4), xi0 = Vector::Constant(4, 0.7), y0 = Vector::Ones(4);
  const ScalarUpdate b = update_alpha(z0, xi0, y0, 1.0);
  CHECK(b.flagged);
  CHECK(b.value == doctest::Approx(1e-6));

  Rng rng(4);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  Vector zs(200), xs(200), ys(200);
  for (Index m = 0; m < 200; ++m) {
    xs(m) = unif(rng);
    ys(m) = m % 3 ? 1.0 : -1.0;
    zs(m) = ys(m) * 0.6 * xs(m) * (unif(rng) / 2.0);
  }
  const ScalarUpdate many = update_alpha(zs, xs, ys, 1.0);
  CHECK_FALSE(many.flagged);
  CHECK(std::abs(alpha_residual(zs, xs, ys, many.value)) < 1e-9 * 200);
  CHECK(many.value > 0.0);
  CHECK_THROWS_AS(update_alpha(zs, -xs, ys, 1.0), DomainError);
}

TEST_CASE("probit v score matches quadrature of its definition") {
  Vector p(3), tau(3), y(3);
  p << 0.4, -1.2, 2.0;
  tau << 0.3, 1.5, 0.05;
  y << 1, 1, -1;
  const double v_old = 0.7;
  const ProbitVScore score(p, tau, y, v_old);
  for (double v : {0.2, 0.7, 3.0}) {
    double ref = 0.0, ref_q = 0.0;
    for (Index m = 0; m < 3; ++m) {
      auto log_post = [&](double z) { return oracle::log_Phi(y(m) * z / std::sqrt(v_old)) + oracle::log_gauss(z, p(m), tau(m)); };
      const double sd = std::sqrt(tau(m));
      const double lo = p(m) - 30 * sd, hi = p(m) + 30 * sd;
      const double mass = oracle::integrate([&](double z) { return std::exp(log_post(z)); }, lo, hi);
      ref += oracle::integrate(
                 [&](double z) {
                   const double t = y(m) * z / std::sqrt(v);
                   const double mills = std::exp(oracle::log_phi(t) - oracle::log_Phi(t));
                   return -t / v * mills * std::exp(log_post(z));
                 },
                 lo, hi) /
             mass;
      ref_q += oracle::integrate([&](double z) { return oracle::log_Phi(y(m) * z / std::sqrt(v)) * std::exp(log_post(z)); }, lo, hi) /
               mass;
    }
    CHECK(std::abs(score.residual(v) - ref) < 1e-8);
    CHECK(std::abs(score.surrogate(v) - ref_q) < 1e-8);
    // residual is (up to the chain rule factor 2) the v-derivative of the surrogate
    const double h = 1e-5 * v;
    const double deriv = (score.surrogate(v + h) - score.surrogate(v - h)) / (2 * h);
    CHECK(score.residual(v) == doctest::Approx(2.0 * deriv).epsilon(1e-5));
  }
}

TEST_CASE("probit v update") {
  Rng rng(8);
  const Index m = 400;
  std::normal_distribution<double> g;
  Vector p(m), tau(m), y(m);
  for (Index i = 0; i < m; ++i) {
    p(i) = g(rng);
    tau(i) = 0.2;
    y(i) = (p(i) + std::sqrt(1.2) * g(rng)) >= 0 ? 1.0 : -1.0;
  }
  const ScalarUpdate u = update_probit_v(p, tau, y, 1.0);
  CHECK_FALSE(u.flagged);
  CHECK(std::abs(u.residual) < 1e-8 * m);
  const ProbitVScore score(p, tau, y, 1.0);
  CHECK(score.surrogate(u.value) >= score.surrogate(1.0) - 1e-8);

  // labels agree with huge scores: v runs to the lower boundary
  Vector big = Vector::Constant(m, 50.0);
  const ScalarUpdate sep = update_probit_v(big, Vector::Constant(m, 0.01), Vector::Ones(m), 1.0);
  CHECK(sep.flagged);
  CHECK(sep.value == doctest::Approx(1e-8));
}

TEST_CASE("gamma update") {
  CHECK(update_gamma(Vector::Zero(5)).value == 0.0);
  Vector r(2);
  r << 0.2, 0.4;
  CHECK(update_gamma(r).value == doctest::Approx(0.3));
  Vector all = Vector::Ones(3);
  const ScalarUpdate clamp = update_gamma(all);
  CHECK(clamp.value < 0.5);
  CHECK(clamp.flagged);
  Vector a(4), b(4);
  a << 0.1, 0.7, 0.3, 0.05;
  b << 0.3, 0.05, 0.1, 0.7;
  CHECK(update_gamma(a).value == update_gamma(b).value);
  CHECK_THROWS_AS(update_gamma(-a), DomainError);
}

TEST_CASE("corruption responsibilities against a brute-force posterior") {
  // M = 3, N = 2 robust probit; GAMP's per-example responsibilities vs. exact P(beta_m = 0 | y)
  DenseMatrix x(3, 2);
  x << 0.3, -0.1, 0.2, 0.25, -0.15, 0.3;
  Vector y(3);
  y << 1, -1, -1;
  const double gamma = 0.2, v = 1.0;
  const OutputChannel out = OutputChannel::probit(v).robustified(gamma);
  const InputChannel in = InputChannel::gaussian(0.0, 1.0);
  const FeatureMatrix fx(x);
  GampConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 5000;
  Gamp gamp(fx, y, out, in, cfg);
  gamp.run();
  REQUIRE(gamp.converged());
  for (Index m = 0; m < 3; ++m) {
    const double rho = out.corruption_responsibility(y(m), gamp.state().p_hat(m), gamp.state().tau_p(m));
    // P(beta_m = 0 | y) = E[gamma (1 - Phi(y_m z_m)) / p(y_m | z_m)] under the exact posterior of w
    double num = 0.0, den = 0.0;
    const int pts = 801;
    const double half = 8.0, h = 2 * half / (pts - 1);
    for (int i = 0; i < pts; ++i)
      for (int j = 0; j < pts; ++j) {
        const double a = -half + i * h, b = -half + j * h;
        double lik = 1.0, corrupt = 0.0;
        for (Index k = 0; k < 3; ++k) {
          const double phi = oracle::Phi(y(k) * (x(k, 0) * a + x(k, 1) * b) / std::sqrt(v));
          const double pk = gamma + (1 - 2 * gamma) * phi;
          if (k == m) corrupt = gamma * (1 - phi) / pk;
          lik *= pk;
        }
        const double wgt = lik * std::exp(-0.5 * (a * a + b * b));
        den += wgt;
        num += wgt * corrupt;
      }
    CHECK(std::abs(rho - num / den) < 1e-3);
  }
}

TEST_CASE("spike-and-slab update") {
  std::vector<PriorMoments> all(10);
  for (auto& pm : all) {
    pm.nonzero_prob = 1.0;
    pm.slab_mean = 1.0;
    pm.slab_var = 0.5;
  }
  const SpikeSlabUpdate u = update_spike_slab(all, 0.0, 1.0, true, true);
  CHECK(u.pi == 1.0);
  CHECK(u.mu == doctest::Approx(1.0));
  CHECK(u.sigma2 == doctest::Approx(0.5));

  std::vector<PriorMoments> k_of_n(100);
  for (std::size_t i = 0; i < k_of_n.size(); ++i) {
    k_of_n[i].nonzero_prob = i < 7 ? 1.0 : 0.0;
    k_of_n[i].slab_mean = i < 7 ? (i % 2 ? 2.0 : -2.0) : 100.0;
    k_of_n[i].slab_var = 0.1;
  }
  const SpikeSlabUpdate k = update_spike_slab(k_of_n, 0.0, 1.0, false, true);
  CHECK(k.pi == doctest::Approx(0.07));
  CHECK(k.mu == 0.0);
  CHECK(k.sigma2 == doctest::Approx(4.1));

  std::vector<PriorMoments> none(5);
  for (auto& pm : none) pm.nonzero_prob = 0.0;
  const SpikeSlabUpdate z = update_spike_slab(none, 0.3, 2.0, true, true);
  CHECK(z.pi == 0.0);
  CHECK(z.flagged);
  CHECK(z.sigma2 == 2.0);
}

TEST_CASE("lambda1 update") {
  std::vector<PriorMoments> pm(8);
  for (auto& p : pm) p.abs_mean = 1.0;
  CHECK(update_lambda1(pm, 3.0).value == doctest::Approx(1.0));
  for (auto& p : pm) p.abs_mean = 0.5;
  CHECK(update_lambda1(pm, 3.0).value == doctest::Approx(2.0));
  for (auto& p : pm) p.abs_mean = 0.0;
  const ScalarUpdate z = update_lambda1(pm, 3.0);
  CHECK(z.flagged);
  CHECK(z.value == 3.0);
}

TEST_CASE("em_fit plumbing") {
  Rng rng(21);
  const SyntheticTruth truth = gen_sparse_weights(80, 4, Amplitude::kGaussian, rng);
  const Dataset d = gen_probit_data(truth, 120, 1.0 / 120.0, 0.01, rng);
  const OutputChannel out = OutputChannel::probit(1.0);
  const InputChannel in = InputChannel::spike_slab(0.1, InputChannel::gaussian(0, 1));
  EMConfig cfg;

  const EmResult none = em_fit(d, out, in, {}, cfg);
  CHECK(none.theta.v == 1.0);
  CHECK(none.theta.pi == 0.1);
  CHECK(none.trace.empty());
  const GampResult plain = run_gamp(d, out, in, cfg.gamp);
  CHECK((none.result.state.w_hat.array() == plain.state.w_hat.array()).all());

  TuneMask mask;
  mask.v = true;
  mask.pi = true;
  const EmResult fit = em_fit(d, out, in, mask, cfg);
  CHECK(fit.theta.v > 0.0);
  CHECK(fit.theta.pi >= 0.0);
  CHECK(fit.theta.pi <= 1.0);
  CHECK(fit.result.iterations >= cfg.em_iters);
  CHECK_FALSE(fit.trace.empty());
  std::ostringstream csv;
  write_theta_csv(csv, fit.trace);
  CHECK(csv.str().rfind("em_iter,parameter,value\n", 0) == 0);

  EMConfig run_cfg = cfg;
  run_cfg.cadence = Cadence::kPerRun;
  run_cfg.em_iters = 3;
  const EmResult per_run = em_fit(d, out, in, mask, run_cfg);
  CHECK(per_run.trace.size() == 6);
  CHECK(per_run.trace.back().em_iter == 3);

  TuneMask bad;
  bad.gamma = true;
  CHECK_THROWS_AS(em_fit(d, out, in, bad, cfg), ConfigError);
  TuneMask bad_alpha;
  bad_alpha.alpha = true;
  CHECK_THROWS_AS(em_fit(d, out, in, bad_alpha, cfg), ConfigError);
  EMConfig zero = cfg;
  zero.em_iters = 0;
  CHECK_THROWS_AS(em_fit(d, out, in, mask, zero), ConfigError);
}

TEST_CASE("laplacian rate is recovered by EM") {
  Rng rng(31);
  const Index n = 512, m = 4096;
  const double lambda_true = 2.0;
  SyntheticTruth truth;
  truth.w.resize(n);
  std::exponential_distribution<double> ex(lambda_true);
  std::bernoulli_distribution coin(0.5);
  for (Index j = 0; j < n; ++j) truth.w(j) = coin(rng) ? ex(rng) : -ex(rng);
  truth.K = n;
  const Dataset d = gen_probit_data(truth, m, 1.0 / m, 0.01, rng);
  TuneMask mask;
  mask.lambda1 = true;
  EMConfig cfg;
  const EmResult fit = em_fit(d, OutputChannel::probit(0.01), InputChannel::laplacian(0.5), mask, cfg);
  CHECK(fit.theta.lambda1 >= 1.0);
  CHECK(fit.theta.lambda1 <= 4.0);
}
